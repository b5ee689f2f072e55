#include "ciot/catalog.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "ciot/error.hpp"

#ifndef CIOT_DEFAULT_DATA_DIR
#define CIOT_DEFAULT_DATA_DIR "data"
#endif

namespace ciot {

std::filesystem::path default_data_dir()
{
    if (const char* env = std::getenv("CIOT_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return CIOT_DEFAULT_DATA_DIR;
}

DataCatalog::DataCatalog(std::filesystem::path root) : root_(std::move(root)) {}

std::shared_ptr<const DeviceProfile> DataCatalog::profile(const std::string& name)
{
    std::lock_guard lock(mutex_);
    auto it = profiles_.find(name);
    if (it != profiles_.end()) {
        return it->second;
    }
    const auto path = root_ / "profiles" / (name + ".json");
    if (!std::filesystem::exists(path)) {
        throw ModelError(Errc::InvalidConfig, "unknown device '" + name + "' (no " + path.string() + ")");
    }
    auto p = std::make_shared<const DeviceProfile>(load_device_profile_file(path));
    profiles_.emplace(name, p);
    return p;
}

std::shared_ptr<const DeviceProfile> DataCatalog::profile_file(const std::filesystem::path& path)
{
    return std::make_shared<const DeviceProfile>(load_device_profile_file(path));
}

std::shared_ptr<const TbsTable> DataCatalog::tbs(Technology technology)
{
    std::lock_guard lock(mutex_);
    auto it = tbs_.find(technology);
    if (it != tbs_.end()) {
        return it->second;
    }
    const auto dir = root_ / "tbs";
    const char* file = technology == Technology::NbIot ? "nbiot_npusch.csv" : "ltem_pusch.csv";
    auto t = std::make_shared<const TbsTable>(load_tbs_table(dir / file, dir / "SHA256SUMS", technology));
    tbs_.emplace(technology, t);
    return t;
}

std::shared_ptr<const ProcedureLibrary> DataCatalog::procedures(const DeviceProfile& profile)
{
    // Scripts are per technology, but delays are per device.
    const std::string key = profile.name + "|" + std::string(to_string(profile.technology));
    std::lock_guard lock(mutex_);
    auto it = procedures_.find(key);
    if (it != procedures_.end()) {
        return it->second;
    }
    auto lib = std::make_shared<const ProcedureLibrary>(load_procedure_library(root_ / "scripts", profile));
    procedures_.emplace(key, lib);
    return lib;
}

std::shared_ptr<const ScenarioTable> DataCatalog::scenarios()
{
    std::lock_guard lock(mutex_);
    if (!scenarios_) {
        const auto path = root_ / "scenarios.json";
        scenarios_ = std::make_shared<const ScenarioTable>(std::filesystem::exists(path)
                                                               ? ScenarioTable::from_file(path)
                                                               : ScenarioTable::builtin());
    }
    return scenarios_;
}

std::vector<std::string> DataCatalog::profile_names() const
{
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(root_ / "profiles", ec)) {
        if (entry.path().extension() == ".json") {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

CycleSpec make_cycle_spec(DataCatalog& catalog, const SpecRequest& req)
{
    CycleSpec spec;
    spec.device = req.device_file ? *catalog.profile_file(*req.device_file) : *catalog.profile(req.device);
    if (spec.device.name.empty()) {
        spec.device.name = req.device_file ? req.device_file->stem().string() : req.device;
    }
    const Technology tech = spec.device.technology;
    spec.scenario = req.scenario;
    spec.radio = scenario_radio_config(*catalog.scenarios(), scenario_from_string(req.scenario), tech,
                                       catalog.tbs(tech));
    if (req.rap_format) spec.radio.rap_format = *req.rap_format;
    if (req.ul_tx_power_dbm) spec.radio.ul_tx_power_dbm = *req.ul_tx_power_dbm;
    if (req.mcs) spec.radio.mcs = *req.mcs;
    if (req.rep_data_ul) spec.radio.rep_data_ul = *req.rep_data_ul;
    if (req.n_ru) spec.radio.n_ru = *req.n_ru;
    if (req.t_ru_ms) spec.radio.t_ru = Milliseconds(*req.t_ru_ms);

    if (!(req.cycle_hours > 0.0)) {
        throw ModelError(Errc::InvalidConfig, "cycle_hours must be > 0");
    }
    spec.traffic = TrafficProfile::from_cycle(req.payload_bytes, hours(req.cycle_hours));
    spec.timers.t3412 = hours(req.t3412_hours);
    spec.timers.t3324 = seconds(req.t3324_s);
    spec.timers.idrx_ondur = spec.device.t_edrx_ondur;
    if (req.rrc_inactivity_s) spec.timers.rrc_inactivity = seconds(*req.rrc_inactivity_s);

    spec.ps_mode = req.ps_mode;
    spec.first_cycle_attach = req.first_cycle_attach;
    spec.idle_only = req.idle_only;
    if (req.downlink_availability) spec.downlink_availability = *req.downlink_availability;
    spec.gap_override = req.gap_override;
    spec.procedures = catalog.procedures(spec.device);

    std::ostringstream label;
    label << spec.device.name << '/' << req.scenario << '/' << req.payload_bytes << "B/" << req.cycle_hours << 'h';
    spec.label = label.str();
    validate(spec);
    return spec;
}

GapModel gap_model_from_json(const nlohmann::json& doc, GapModel g)
{
    if (!doc.is_object()) {
        throw ModelError(Errc::InvalidConfig, "gap_override must be an object");
    }
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "tx_max_continuous_ms") g.tx_max_continuous = Milliseconds(v.get<double>());
            else if (key == "tx_gap_ms") g.tx_gap = Milliseconds(v.get<double>());
            else if (key == "dl_availability") g.dl_availability = v.get<double>();
            else if (key == "tx_gaps_enabled") g.tx_gaps_enabled = v.get<bool>();
            else if (key == "rx_gaps_enabled") g.rx_gaps_enabled = v.get<bool>();
            else throw ModelError(Errc::InvalidConfig, "unknown gap_override field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(Errc::InvalidConfig, std::string("gap_override: ") + e.what());
    }
    return g;
}

SpecRequest spec_request_from_json(const nlohmann::json& doc, SpecRequest r, const std::vector<std::string>& ignore)
{
    if (!doc.is_object()) {
        throw ModelError(Errc::InvalidConfig, "configuration must be a JSON object");
    }
    for (const auto& [key, v] : doc.items()) {
        if (std::find(ignore.begin(), ignore.end(), key) != ignore.end()) {
            continue;
        }
        try {
            if (key == "device") r.device = v.get<std::string>();
            else if (key == "device_file") r.device_file = v.get<std::string>();
            else if (key == "scenario") r.scenario = v.get<std::string>();
            else if (key == "payload_bytes") r.payload_bytes = v.get<std::int64_t>();
            else if (key == "cycle_hours") r.cycle_hours = v.get<double>();
            else if (key == "t3412_hours") r.t3412_hours = v.get<double>();
            else if (key == "t3324_s") r.t3324_s = v.get<double>();
            else if (key == "ps_mode") r.ps_mode = ps_mode_from_string(v.get<std::string>());
            else if (key == "first_cycle_attach") r.first_cycle_attach = v.get<bool>();
            else if (key == "idle_only") r.idle_only = v.get<bool>();
            else if (key == "rrc_inactivity_s") r.rrc_inactivity_s = v.get<double>();
            else if (key == "downlink_availability") r.downlink_availability = v.get<double>();
            else if (key == "rap_format") r.rap_format = rap_format_from_string(v.get<std::string>());
            else if (key == "ul_tx_power_dbm") r.ul_tx_power_dbm = v.get<double>();
            else if (key == "mcs") r.mcs = v.get<int>();
            else if (key == "rep_data_ul") r.rep_data_ul = v.get<int>();
            else if (key == "n_ru") r.n_ru = v.get<int>();
            else if (key == "t_ru_ms") r.t_ru_ms = v.get<double>();
            else if (key == "gap_override") {
                // Start from the technology defaults once the device is known;
                // NB-IoT values are the common case.
                r.gap_override = gap_model_from_json(v, GapModel::for_technology(Technology::NbIot));
            }
            else throw ModelError(Errc::InvalidConfig, "unknown configuration field '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            throw ModelError(Errc::InvalidConfig, "configuration field '" + key + "' has the wrong type");
        } catch (const ModelError& e) {
            if (e.code() == Errc::InvalidConfig) throw;
            throw ModelError(Errc::InvalidConfig, "configuration field '" + key + "': " + e.what());
        }
    }
    return r;
}

}  // namespace ciot
