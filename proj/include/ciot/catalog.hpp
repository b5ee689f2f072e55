#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ciot/cycle_spec.hpp"
#include "ciot/link_budget.hpp"
#include "ciot/tbs.hpp"

namespace ciot {

/// Bundled data directory: $CIOT_DATA_DIR if set, else the source tree's
/// data/ directory recorded at build time.
std::filesystem::path default_data_dir();

/// Loads and caches profiles, TBS tables, scripts and the scenario table
/// from a data directory. Safe to share between threads.
class DataCatalog {
public:
    explicit DataCatalog(std::filesystem::path root = default_data_dir());

    [[nodiscard]] const std::filesystem::path& root() const { return root_; }

    std::shared_ptr<const DeviceProfile> profile(const std::string& name);
    std::shared_ptr<const DeviceProfile> profile_file(const std::filesystem::path& path);
    std::shared_ptr<const TbsTable> tbs(Technology technology);
    std::shared_ptr<const ProcedureLibrary> procedures(const DeviceProfile& profile);
    std::shared_ptr<const ScenarioTable> scenarios();

    /// Names of the bundled device profiles, sorted.
    std::vector<std::string> profile_names() const;

private:
    std::filesystem::path root_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const DeviceProfile>> profiles_;
    std::map<Technology, std::shared_ptr<const TbsTable>> tbs_;
    std::map<std::string, std::shared_ptr<const ProcedureLibrary>> procedures_;
    std::shared_ptr<const ScenarioTable> scenarios_;
};

/// The knobs the CLI and the sweep expose. Unset optionals keep the model
/// defaults.
struct SpecRequest {
    std::string device = "n211";
    std::optional<std::filesystem::path> device_file;
    std::string scenario = "good";
    std::int64_t payload_bytes = 100;
    double cycle_hours = 1.0;
    double t3412_hours = 2.0;
    double t3324_s = 60.0;
    PsMode ps_mode = PsMode::PsmIdrx;
    bool first_cycle_attach = false;
    bool idle_only = false;
    std::optional<double> rrc_inactivity_s;
    std::optional<double> downlink_availability;
    std::optional<RapFormat> rap_format;
    std::optional<double> ul_tx_power_dbm;
    // Radio overrides on top of the scenario's assignment.
    std::optional<int> mcs;
    std::optional<int> rep_data_ul;
    std::optional<int> n_ru;
    std::optional<double> t_ru_ms;
    std::optional<GapModel> gap_override;
};

CycleSpec make_cycle_spec(DataCatalog& catalog, const SpecRequest& request);

/// Overlays the keys of a JSON object onto `base`. Keys listed in `ignore`
/// are skipped; any other unknown key or mistyped value is an
/// InvalidConfig error naming the key.
SpecRequest spec_request_from_json(const nlohmann::json& doc, SpecRequest base = {},
                                   const std::vector<std::string>& ignore = {});

GapModel gap_model_from_json(const nlohmann::json& doc, GapModel base);

}  // namespace ciot
