#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ciot/model.hpp"
#include "ciot/radio.hpp"

namespace ciot {

enum class Scenario { Good, Bad, Extreme };

std::string_view to_string(Scenario s);
Scenario scenario_from_string(std::string_view s);

struct LinkBudget {
    double tx_power_dbm = 23.0;
    double coupling_loss_db = 140.0;
    double noise_figure_db = 5.0;
    double thermal_noise_dbm_hz = -174.0;
    double bandwidth_hz = 15'000.0;

    /// 15 kHz single tone for NB-IoT, one 180 kHz PRB for LTE-M.
    static LinkBudget for_technology(Technology technology, double coupling_loss_db);
};

void validate(const LinkBudget& budget);

double rx_snr_db(const LinkBudget& budget);

/// Chase combining of N blind repetitions adds 10 log10 N.
double combined_snr_db(double snr_db, int repetitions);

struct UplinkAssignment {
    int mcs = 0;
    int repetitions = 1;
};

struct CoverageScenario {
    Scenario scenario = Scenario::Good;
    double mcl_db = 140.0;
    std::optional<UplinkAssignment> nbiot;
    std::optional<UplinkAssignment> ltem;

    [[nodiscard]] const std::optional<UplinkAssignment>& assignment(Technology t) const
    {
        return t == Technology::NbIot ? nbiot : ltem;
    }
};

class ScenarioTable {
public:
    explicit ScenarioTable(std::vector<CoverageScenario> rows);

    static ScenarioTable from_json(const nlohmann::json& doc);
    static ScenarioTable from_file(const std::filesystem::path& path);
    /// The three tabulated coverage classes, compiled in.
    static ScenarioTable builtin();

    [[nodiscard]] const CoverageScenario& get(Scenario s) const;
    [[nodiscard]] const std::vector<CoverageScenario>& rows() const { return rows_; }

private:
    std::vector<CoverageScenario> rows_;
};

/// Radio configuration for a named scenario: the tabulated (mcs, repetitions)
/// on top of the technology defaults. Every repetition count follows the
/// scenario. Throws Unreachable when the technology has no assignment.
RadioConfig scenario_radio_config(const ScenarioTable& table, Scenario scenario, Technology technology,
                                  std::shared_ptr<const TbsTable> tbs);

}  // namespace ciot
