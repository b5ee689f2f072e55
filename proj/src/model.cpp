#include "ciot/model.hpp"

#include <cmath>

#include "ciot/error.hpp"

namespace ciot {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::MissingField: return "MissingField";
    case Errc::UnitViolation: return "UnitViolation";
    case Errc::OrderingViolation: return "OrderingViolation";
    case Errc::ParseError: return "ParseError";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidRepetitions: return "InvalidRepetitions";
    case Errc::HeaderExceedsTbs: return "HeaderExceedsTbs";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::MonitoringExceedsPeriod: return "MonitoringExceedsPeriod";
    case Errc::OnDurExceedsCycle: return "OnDurExceedsCycle";
    case Errc::CycleTooShort: return "CycleTooShort";
    case Errc::PtwExceedsCycle: return "PtwExceedsCycle";
    case Errc::ActiveWindowExceedsInterval: return "ActiveWindowExceedsInterval";
    case Errc::EmptyScript: return "EmptyScript";
    case Errc::NegativeSize: return "NegativeSize";
    case Errc::TechnologyMismatch: return "TechnologyMismatch";
    case Errc::InvalidTimer: return "InvalidTimer";
    case Errc::ZeroConsumption: return "ZeroConsumption";
    case Errc::EmptyGrid: return "EmptyGrid";
    case Errc::Unreachable: return "Unreachable";
    }
    return "Unknown";
}

ModelError::ModelError(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

std::string_view to_string(Technology t)
{
    return t == Technology::NbIot ? "NBIOT" : "LTEM";
}

std::string_view to_string(PsMode m)
{
    switch (m) {
    case PsMode::PsmIdrx: return "PSM_IDRX";
    case PsMode::PsmEdrx: return "PSM_EDRX";
    case PsMode::EdrxOnly: return "EDRX_ONLY";
    case PsMode::IdrxOnly: return "IDRX_ONLY";
    }
    return "PSM_IDRX";
}

Technology technology_from_string(std::string_view s)
{
    if (s == "NBIOT" || s == "nbiot" || s == "NB-IoT") {
        return Technology::NbIot;
    }
    if (s == "LTEM" || s == "ltem" || s == "LTE-M") {
        return Technology::LteM;
    }
    throw ModelError(Errc::ParseError, "unknown technology '" + std::string(s) + "'");
}

PsMode ps_mode_from_string(std::string_view s)
{
    for (auto m : {PsMode::PsmIdrx, PsMode::PsmEdrx, PsMode::EdrxOnly, PsMode::IdrxOnly}) {
        if (s == to_string(m)) {
            return m;
        }
    }
    if (s == "psm") return PsMode::PsmIdrx;
    if (s == "psm-edrx") return PsMode::PsmEdrx;
    if (s == "edrx") return PsMode::EdrxOnly;
    if (s == "idrx") return PsMode::IdrxOnly;
    throw ModelError(Errc::ParseError, "unknown power saving mode '" + std::string(s) + "'");
}

void validate(const TimerConfig& t)
{
    auto non_negative = [](Milliseconds v, const char* name) {
        if (!(v.value() >= 0.0) || !std::isfinite(v.value())) {
            throw ModelError(Errc::InvalidTimer, std::string(name) + " must be finite and >= 0");
        }
    };
    non_negative(t.t3324, "t3324_ms");
    non_negative(t.t3412, "t3412_ms");
    non_negative(t.idrx_cycle, "idrx_cycle_ms");
    non_negative(t.idrx_ondur, "idrx_ondur_ms");
    non_negative(t.edrx_cycle, "edrx_cycle_ms");
    non_negative(t.ptw, "ptw_ms");
    non_negative(t.rrc_inactivity, "rrc_inactivity_ms");
    if (t.n_paging < 0 || t.cdrx_long_cycle_sf < 0 || t.cdrx_ondur_sf < 0 || t.uss_period_sf < 0 ||
        t.uss_monitor_sf < 0) {
        throw ModelError(Errc::InvalidTimer, "subframe counts must be >= 0");
    }
    if (t.t3412.value() <= 0.0) {
        throw ModelError(Errc::InvalidTimer, "t3412_ms must be > 0");
    }
    if (t.t3324 > t.t3412) {
        throw ModelError(Errc::InvalidTimer, "t3324_ms must not exceed t3412_ms");
    }
    if (t.ptw > t.edrx_cycle) {
        throw ModelError(Errc::PtwExceedsCycle, "ptw_ms must not exceed edrx_cycle_ms");
    }
    if (t.cdrx_ondur_sf > t.cdrx_long_cycle_sf) {
        throw ModelError(Errc::OnDurExceedsCycle, "cdrx_ondur_sf must not exceed cdrx_long_cycle_sf");
    }
    if (t.uss_monitor_sf > t.uss_period_sf) {
        throw ModelError(Errc::MonitoringExceedsPeriod, "uss_monitor_sf must not exceed uss_period_sf");
    }
}

TrafficProfile::TrafficProfile(std::int64_t payload_bytes, Milliseconds cycle)
    : payload_bytes_(payload_bytes), cycle_(cycle)
{
    if (payload_bytes_ < 0) {
        throw ModelError(Errc::NegativeSize, "payload_bytes must be >= 0");
    }
    if (!(cycle_.value() > 0.0) || !std::isfinite(cycle_.value())) {
        throw ModelError(Errc::InvalidConfig, "transmit cycle must be finite and > 0");
    }
}

TrafficProfile TrafficProfile::from_cycle(std::int64_t payload_bytes, Milliseconds cycle)
{
    return {payload_bytes, cycle};
}

TrafficProfile TrafficProfile::from_rate(std::int64_t payload_bytes, double rate_per_hour)
{
    if (!(rate_per_hour > 0.0) || !std::isfinite(rate_per_hour)) {
        throw ModelError(Errc::InvalidConfig, "rate_per_hour must be finite and > 0");
    }
    double cycle = kMsPerHour / rate_per_hour;
    // 1/24 h^-1 is not representable; snap to the whole millisecond it denotes.
    if (double whole = std::round(cycle); std::abs(cycle - whole) < 1e-6) {
        cycle = whole;
    }
    return {payload_bytes, Milliseconds(cycle)};
}

void validate(const BatteryConfig& b)
{
    if (!(b.capacity_wh > 0.0)) {
        throw ModelError(Errc::InvalidConfig, "capacity_wh must be > 0");
    }
    if (!(b.safety_factor > 0.0 && b.safety_factor <= 1.0)) {
        throw ModelError(Errc::InvalidConfig, "safety_factor must be in (0, 1]");
    }
    if (!(b.e_device_mj_per_hour >= 0.0)) {
        throw ModelError(Errc::InvalidConfig, "e_device_mj_per_hour must be >= 0");
    }
}

}  // namespace ciot
