#include "ciot/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ciot/error.hpp"

namespace ciot {

namespace {

constexpr double kReferenceTxDbm = 23.0;

using nlohmann::json;

double required_number(const json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        throw ModelError(Errc::MissingField, std::string("device profile lacks '") + key + "'");
    }
    if (!it->is_number()) {
        throw ModelError(Errc::ParseError, std::string("'") + key + "' must be a number");
    }
    return it->get<double>();
}

std::optional<double> optional_number(const json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        throw ModelError(Errc::ParseError, std::string("'") + key + "' must be a number");
    }
    return it->get<double>();
}

std::string required_string(const json& doc, const char* key)
{
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) {
        throw ModelError(Errc::MissingField, std::string("device profile lacks string '") + key + "'");
    }
    return it->get<std::string>();
}

void check_non_negative(double v, const char* what)
{
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ModelError(Errc::UnitViolation, std::string(what) + " must be finite and >= 0");
    }
}

DelayPowerMode delay_mode_from_string(std::string_view s)
{
    if (s == "AS_RX") return DelayPowerMode::AsRx;
    if (s == "AS_CDRX_SLEEP") return DelayPowerMode::AsCdrxSleep;
    throw ModelError(Errc::ParseError, "unknown p_delay_mode '" + std::string(s) + "'");
}

}  // namespace

Milliwatts DeviceProfile::p_delay() const
{
    return p_delay_mode == DelayPowerMode::AsRx ? p_rx : p_cdrx_sleep;
}

Milliseconds DeviceProfile::delay(std::string_view transition) const
{
    auto it = delay_table.find(transition);
    return it == delay_table.end() ? Milliseconds{} : it->second;
}

void validate(const DeviceProfile& p)
{
    check_non_negative(p.p_tx.value(), "p_tx_mw");
    check_non_negative(p.tx_gap_power().value(), "p_tx_gaps_mw");
    check_non_negative(p.p_rx.value(), "p_rx_mw");
    check_non_negative(p.rx_gap_power().value(), "p_rx_gaps_mw");
    check_non_negative(p.p_cdrx_sleep.value(), "p_cdrx_sleep_mw");
    check_non_negative(p.e_cdrx_ondur.value(), "e_cdrx_ondur_mj");
    check_non_negative(p.t_cdrx_ondur.value(), "t_cdrx_ondur_ms");
    check_non_negative(p.p_edrx_sleep.value(), "p_edrx_sleep_mw");
    check_non_negative(p.e_edrx_ondur.value(), "e_edrx_ondur_mj");
    check_non_negative(p.t_edrx_ondur.value(), "t_edrx_ondur_ms");
    check_non_negative(p.p_psm_sleep.value(), "p_psm_sleep_mw");
    check_non_negative(p.e_sync.value(), "e_sync_mj");
    check_non_negative(p.t_sync.value(), "t_sync_ms");
    check_non_negative(p.e_paging.value(), "e_paging_mj");
    check_non_negative(p.e_idrx_sync.value(), "e_idrx_sync_mj");
    check_non_negative(p.t_idrx_sync.value(), "t_idrx_sync_ms");
    for (const auto& [name, ms] : p.delay_table) {
        check_non_negative(ms.value(), ("delay '" + name + "'").c_str());
    }

    if (!(p.p_psm_sleep <= p.p_edrx_sleep && p.p_edrx_sleep <= p.p_cdrx_sleep && p.p_cdrx_sleep <= p.p_rx)) {
        throw ModelError(Errc::OrderingViolation,
                         "sleep powers must satisfy p_psm_sleep <= p_edrx_sleep <= p_cdrx_sleep <= p_rx");
    }

    for (std::size_t i = 0; i < p.tx_power_curve.size(); ++i) {
        const auto& pt = p.tx_power_curve[i];
        check_non_negative(pt.power.value(), "tx_power_curve mw");
        if (!std::isfinite(pt.dbm)) {
            throw ModelError(Errc::UnitViolation, "tx_power_curve dbm must be finite");
        }
        if (i > 0) {
            const auto& prev = p.tx_power_curve[i - 1];
            if (!(pt.dbm > prev.dbm)) {
                throw ModelError(Errc::OrderingViolation, "tx_power_curve dbm values must strictly increase");
            }
            if (pt.power < prev.power) {
                throw ModelError(Errc::OrderingViolation, "tx_power_curve must be non-decreasing");
            }
        }
        if (pt.dbm == kReferenceTxDbm && pt.power != p.p_tx) {
            throw ModelError(Errc::UnitViolation, "tx_power_curve at 23 dBm must equal p_tx_mw");
        }
    }
}

DeviceProfile load_device_profile(const json& doc)
{
    if (!doc.is_object()) {
        throw ModelError(Errc::ParseError, "device profile must be a JSON object");
    }
    DeviceProfile p;
    p.name = doc.value("name", std::string{});
    p.description = doc.value("description", std::string{});
    p.technology = technology_from_string(required_string(doc, "technology"));

    p.p_tx = Milliwatts(required_number(doc, "p_tx_mw"));
    if (auto it = doc.find("tx_power_curve"); it != doc.end()) {
        if (!it->is_array()) {
            throw ModelError(Errc::ParseError, "tx_power_curve must be an array");
        }
        for (const auto& pt : *it) {
            p.tx_power_curve.push_back({required_number(pt, "dbm"), Milliwatts(required_number(pt, "mw"))});
        }
    }
    p.tx_power_curve_note = doc.value("tx_power_curve_note", std::string{});
    if (auto v = optional_number(doc, "p_tx_gaps_mw")) {
        p.p_tx_gaps = Milliwatts(*v);
    }
    p.p_rx = Milliwatts(required_number(doc, "p_rx_mw"));
    if (auto v = optional_number(doc, "p_rx_gaps_mw")) {
        p.p_rx_gaps = Milliwatts(*v);
    }
    p.p_cdrx_sleep = Milliwatts(required_number(doc, "p_cdrx_sleep_mw"));
    p.e_cdrx_ondur = millijoules(required_number(doc, "e_cdrx_ondur_mj"));
    p.t_cdrx_ondur = Milliseconds(required_number(doc, "t_cdrx_ondur_ms"));
    p.p_edrx_sleep = Milliwatts(required_number(doc, "p_edrx_sleep_mw"));
    p.e_edrx_ondur = millijoules(required_number(doc, "e_edrx_ondur_mj"));
    p.t_edrx_ondur = Milliseconds(required_number(doc, "t_edrx_ondur_ms"));
    p.p_psm_sleep = Milliwatts(required_number(doc, "p_psm_sleep_mw"));
    p.e_sync = millijoules(required_number(doc, "e_sync_mj"));
    p.t_sync = Milliseconds(required_number(doc, "t_sync_ms"));
    p.e_paging = millijoules(required_number(doc, "e_paging_mj"));
    p.e_idrx_sync = millijoules(optional_number(doc, "e_idrx_sync_mj").value_or(0.0));
    p.t_idrx_sync = Milliseconds(optional_number(doc, "t_idrx_sync_ms").value_or(0.0));
    p.p_delay_mode = delay_mode_from_string(required_string(doc, "p_delay_mode"));
    if (auto it = doc.find("delay_table_ms"); it != doc.end()) {
        if (!it->is_object()) {
            throw ModelError(Errc::ParseError, "delay_table_ms must be an object");
        }
        for (const auto& [name, v] : it->items()) {
            if (!v.is_number()) {
                throw ModelError(Errc::ParseError, "delay '" + name + "' must be a number");
            }
            p.delay_table.emplace(name, Milliseconds(v.get<double>()));
        }
    }
    validate(p);
    return p;
}

DeviceProfile load_device_profile_text(std::string_view text)
{
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw ModelError(Errc::ParseError, "device profile is not valid JSON");
    }
    return load_device_profile(doc);
}

DeviceProfile load_device_profile_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelError(Errc::InvalidConfig, "cannot open device profile '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return load_device_profile_text(ss.str());
}

json to_json(const DeviceProfile& p)
{
    json doc;
    if (!p.name.empty()) doc["name"] = p.name;
    if (!p.description.empty()) doc["description"] = p.description;
    doc["technology"] = std::string(to_string(p.technology));
    doc["p_tx_mw"] = p.p_tx.value();
    if (!p.tx_power_curve_note.empty()) doc["tx_power_curve_note"] = p.tx_power_curve_note;
    if (!p.tx_power_curve.empty()) {
        json curve = json::array();
        for (const auto& pt : p.tx_power_curve) {
            curve.push_back({{"dbm", pt.dbm}, {"mw", pt.power.value()}});
        }
        doc["tx_power_curve"] = std::move(curve);
    }
    if (p.p_tx_gaps) doc["p_tx_gaps_mw"] = p.p_tx_gaps->value();
    doc["p_rx_mw"] = p.p_rx.value();
    if (p.p_rx_gaps) doc["p_rx_gaps_mw"] = p.p_rx_gaps->value();
    doc["p_cdrx_sleep_mw"] = p.p_cdrx_sleep.value();
    doc["e_cdrx_ondur_mj"] = to_millijoules(p.e_cdrx_ondur);
    doc["t_cdrx_ondur_ms"] = p.t_cdrx_ondur.value();
    doc["p_edrx_sleep_mw"] = p.p_edrx_sleep.value();
    doc["e_edrx_ondur_mj"] = to_millijoules(p.e_edrx_ondur);
    doc["t_edrx_ondur_ms"] = p.t_edrx_ondur.value();
    doc["p_psm_sleep_mw"] = p.p_psm_sleep.value();
    doc["e_sync_mj"] = to_millijoules(p.e_sync);
    doc["t_sync_ms"] = p.t_sync.value();
    doc["e_paging_mj"] = to_millijoules(p.e_paging);
    doc["e_idrx_sync_mj"] = to_millijoules(p.e_idrx_sync);
    doc["t_idrx_sync_ms"] = p.t_idrx_sync.value();
    doc["p_delay_mode"] = p.p_delay_mode == DelayPowerMode::AsRx ? "AS_RX" : "AS_CDRX_SLEEP";
    json delays = json::object();
    for (const auto& [name, ms] : p.delay_table) {
        delays[name] = ms.value();
    }
    doc["delay_table_ms"] = std::move(delays);
    return doc;
}

Milliwatts tx_power_consumption(const DeviceProfile& profile, double ul_power_dbm)
{
    if (ul_power_dbm == kReferenceTxDbm) {
        return profile.p_tx;
    }
    const auto& curve = profile.tx_power_curve;
    if (curve.empty() || ul_power_dbm < curve.front().dbm || ul_power_dbm > curve.back().dbm) {
        throw ModelError(Errc::OutOfDomain, "uplink power " + std::to_string(ul_power_dbm) +
                                                " dBm is outside the TX power curve of '" + profile.name + "'");
    }
    auto hi = std::lower_bound(curve.begin(), curve.end(), ul_power_dbm,
                               [](const TxPowerPoint& pt, double dbm) { return pt.dbm < dbm; });
    if (hi->dbm == ul_power_dbm) {
        return hi->power;
    }
    auto lo = std::prev(hi);
    double w = (ul_power_dbm - lo->dbm) / (hi->dbm - lo->dbm);
    return lo->power + (hi->power - lo->power) * w;
}

}  // namespace ciot
