#include "ciot/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "ciot/error.hpp"

namespace ciot {

std::string_view to_string(Scenario s)
{
    switch (s) {
    case Scenario::Good: return "good";
    case Scenario::Bad: return "bad";
    case Scenario::Extreme: return "extreme";
    }
    return "?";
}

Scenario scenario_from_string(std::string_view s)
{
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "good") return Scenario::Good;
    if (lower == "bad") return Scenario::Bad;
    if (lower == "extreme") return Scenario::Extreme;
    throw ModelError(Errc::InvalidConfig, "unknown scenario '" + std::string(s) + "' (good|bad|extreme)");
}

LinkBudget LinkBudget::for_technology(Technology technology, double coupling_loss_db)
{
    LinkBudget b;
    b.coupling_loss_db = coupling_loss_db;
    b.bandwidth_hz = technology == Technology::NbIot ? 15'000.0 : 180'000.0;
    return b;
}

void validate(const LinkBudget& b)
{
    if (!(b.bandwidth_hz > 0.0)) {
        throw ModelError(Errc::InvalidConfig, "bandwidth_hz must be > 0");
    }
    if (!(b.coupling_loss_db > 0.0)) {
        throw ModelError(Errc::InvalidConfig, "coupling_loss_db must be > 0");
    }
}

double rx_snr_db(const LinkBudget& b)
{
    validate(b);
    const double noise_dbm = b.thermal_noise_dbm_hz + 10.0 * std::log10(b.bandwidth_hz) + b.noise_figure_db;
    return b.tx_power_dbm - b.coupling_loss_db - noise_dbm;
}

double combined_snr_db(double snr_db, int repetitions)
{
    if (repetitions < 1 || repetitions > kMaxRepetitions) {
        throw ModelError(Errc::InvalidRepetitions,
                         "repetitions must be within 1.." + std::to_string(kMaxRepetitions));
    }
    return snr_db + 10.0 * std::log10(static_cast<double>(repetitions));
}

ScenarioTable::ScenarioTable(std::vector<CoverageScenario> rows) : rows_(std::move(rows))
{
    for (const auto& row : rows_) {
        if (row.scenario == Scenario::Extreme && row.ltem) {
            throw ModelError(Errc::InvalidConfig, "LTE-M has no extreme-coverage assignment");
        }
        for (const auto& a : {row.nbiot, row.ltem}) {
            if (a && (a->repetitions < 1 || a->repetitions > kMaxRepetitions)) {
                throw ModelError(Errc::InvalidRepetitions, "scenario repetitions out of range");
            }
        }
    }
}

namespace {

std::optional<UplinkAssignment> parse_assignment(const nlohmann::json& row, const char* key)
{
    auto it = row.find(key);
    if (it == row.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->contains("mcs") || !it->contains("repetitions")) {
        throw ModelError(Errc::MissingField, std::string("scenario assignment '") + key + "' lacks mcs/repetitions");
    }
    return UplinkAssignment{it->at("mcs").get<int>(), it->at("repetitions").get<int>()};
}

}  // namespace

ScenarioTable ScenarioTable::from_json(const nlohmann::json& doc)
{
    auto it = doc.find("scenarios");
    if (it == doc.end() || !it->is_array()) {
        throw ModelError(Errc::MissingField, "scenario table lacks 'scenarios' array");
    }
    std::vector<CoverageScenario> rows;
    try {
        for (const auto& row : *it) {
            CoverageScenario s;
            s.scenario = scenario_from_string(row.at("name").get<std::string>());
            s.mcl_db = row.at("mcl_db").get<double>();
            s.nbiot = parse_assignment(row, "NBIOT");
            s.ltem = parse_assignment(row, "LTEM");
            rows.push_back(s);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(Errc::ParseError, std::string("scenario table: ") + e.what());
    }
    return ScenarioTable(std::move(rows));
}

ScenarioTable ScenarioTable::from_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ModelError(Errc::InvalidConfig, "cannot open scenario table '" + path.string() + "'");
    }
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        throw ModelError(Errc::ParseError, "scenario table is not valid JSON");
    }
    return from_json(doc);
}

ScenarioTable ScenarioTable::builtin()
{
    return ScenarioTable({
        {Scenario::Good, 140.0, UplinkAssignment{10, 1}, UplinkAssignment{5, 2}},
        {Scenario::Bad, 150.0, UplinkAssignment{2, 8}, UplinkAssignment{0, 16}},
        {Scenario::Extreme, 160.0, UplinkAssignment{0, 32}, std::nullopt},
    });
}

const CoverageScenario& ScenarioTable::get(Scenario s) const
{
    for (const auto& row : rows_) {
        if (row.scenario == s) {
            return row;
        }
    }
    throw ModelError(Errc::InvalidConfig, "scenario '" + std::string(to_string(s)) + "' is not in the table");
}

RadioConfig scenario_radio_config(const ScenarioTable& table, Scenario scenario, Technology technology,
                                  std::shared_ptr<const TbsTable> tbs)
{
    const auto& row = table.get(scenario);
    const auto& a = row.assignment(technology);
    if (!a) {
        std::ostringstream msg;
        msg << to_string(technology) << " cannot reach the " << to_string(scenario) << " scenario ("
            << row.mcl_db << " dB coupling loss)";
        throw ModelError(Errc::Unreachable, msg.str());
    }
    RadioConfig r = RadioConfig::defaults(technology, std::move(tbs));
    r.mcs = a->mcs;
    r.rep_data_ul = r.rep_data_dl = r.rep_ctrl = r.rep_rap = a->repetitions;
    validate(r);
    return r;
}

}  // namespace ciot
