#include "ciot/state_energy.hpp"

#include <cmath>

#include "ciot/error.hpp"

namespace ciot {

namespace {

// Guards ceil() against products such as 14 * (20/14 - 1) landing a hair
// above an integer.
constexpr double kCeilSlack = 1e-9;

double ceil_tolerant(double x)
{
    return std::ceil(x - kCeilSlack);
}

void require_non_negative_bits(std::int64_t bits)
{
    if (bits < 0) {
        throw ModelError(Errc::NegativeSize, "payload size must be >= 0 bits");
    }
}

}  // namespace

GapModel GapModel::for_technology(Technology technology, double dl_availability)
{
    GapModel g;
    g.dl_availability = dl_availability;
    g.tx_gaps_enabled = technology == Technology::NbIot;
    g.rx_gaps_enabled = technology == Technology::NbIot;
    return g;
}

void validate(const GapModel& g)
{
    if (!(g.dl_availability > 0.0 && g.dl_availability <= 1.0)) {
        throw ModelError(Errc::InvalidConfig, "downlink availability must be in (0, 1]");
    }
    if (!(g.tx_max_continuous.value() > 0.0) || g.tx_gap.value() < 0.0) {
        throw ModelError(Errc::InvalidConfig, "TX gap model needs a positive continuous limit and gap >= 0");
    }
}

void StateEnergyReport::push(EnergyTerm term)
{
    switch (term.kind) {
    case TimeKind::Active: active_ += term.duration; break;
    case TimeKind::Gap: gap_ += term.duration; break;
    case TimeKind::Sleep: sleep_ += term.duration; break;
    }
    energy_ += term.energy;
    terms_.push_back(std::move(term));
}

void StateEnergyReport::add(std::string label, Milliwatts power, Milliseconds duration, TimeKind kind)
{
    if (duration.value() == 0.0) {
        return;
    }
    push({std::move(label), power, duration, power * duration, kind});
}

void StateEnergyReport::add_lump(std::string label, Microjoules energy, Milliseconds duration, TimeKind kind)
{
    if (duration.value() == 0.0 && energy.value() == 0.0) {
        return;
    }
    Milliwatts power = duration.value() > 0.0 ? energy / duration : Milliwatts{};
    push({std::move(label), power, duration, energy, kind});
}

void StateEnergyReport::append(const StateEnergyReport& other)
{
    for (const auto& t : other.terms_) {
        push(t);
    }
}

void StateEnergyReport::append_repeated(const StateEnergyReport& other, double count)
{
    if (count <= 0.0) {
        return;
    }
    for (const auto& t : other.terms_) {
        push({t.label, t.power, t.duration * count, t.energy * count, t.kind});
    }
}

std::int64_t segments(std::int64_t payload_bits, int tbs_bits, int header_bits)
{
    require_non_negative_bits(payload_bits);
    if (tbs_bits <= header_bits) {
        throw ModelError(Errc::HeaderExceedsTbs, "TBS of " + std::to_string(tbs_bits) +
                                                     " bits leaves no room after a " + std::to_string(header_bits) +
                                                     "-bit header");
    }
    const std::int64_t usable = tbs_bits - header_bits;
    return (payload_bits + usable - 1) / usable;
}

std::int64_t ul_segments(const RadioConfig& radio, std::int64_t payload_bits)
{
    return segments(payload_bits, radio.tbs->lookup(radio.mcs, radio.ul_units()), radio.header_bits_ul);
}

std::int64_t dl_segments(const RadioConfig& radio, std::int64_t payload_bits)
{
    return segments(payload_bits, radio.tbs->lookup(radio.mcs, radio.n_sf), radio.header_bits_dl);
}

Milliseconds tx_time(const RadioConfig& radio, std::int64_t payload_bits)
{
    const double l = static_cast<double>(ul_segments(radio, payload_bits));
    if (radio.technology == Technology::NbIot) {
        return radio.t_ru * (radio.n_ru * radio.rep_data_ul * l);
    }
    return kSubframe * (radio.n_sf * radio.rep_data_ul * l);
}

Milliseconds tx_gap_time(Milliseconds t_tx, const GapModel& gaps)
{
    if (!gaps.tx_gaps_enabled || t_tx.value() <= 0.0) {
        return Milliseconds{};
    }
    return gaps.tx_gap * std::floor(t_tx / gaps.tx_max_continuous);
}

StateEnergyReport tx_energy_for(const DeviceProfile& profile, const RadioConfig& radio, Milliseconds t_tx,
                                const GapModel& gaps, const std::string& label)
{
    StateEnergyReport r;
    r.add(label, tx_power_consumption(profile, radio.ul_tx_power_dbm), t_tx, TimeKind::Active);
    r.add(label + "_gap", profile.tx_gap_power(), tx_gap_time(t_tx, gaps), TimeKind::Gap);
    return r;
}

StateEnergyReport tx_energy(const DeviceProfile& profile, const RadioConfig& radio, std::int64_t payload_bits,
                            const GapModel& gaps)
{
    return tx_energy_for(profile, radio, tx_time(radio, payload_bits), gaps);
}

Milliseconds ack_time(const RadioConfig& radio)
{
    const Milliseconds unit = radio.technology == Technology::NbIot ? Milliseconds{2.0} : kSubframe;
    return unit * radio.rep_ctrl;
}

StateEnergyReport ack_energy(const DeviceProfile& profile, const RadioConfig& radio, const GapModel& gaps)
{
    return tx_energy_for(profile, radio, ack_time(radio), gaps, "ack");
}

Milliseconds rap_duration(const RadioConfig& radio)
{
    if (radio.rep_rap < 1) {
        throw ModelError(Errc::InvalidRepetitions, "rep_rap must be >= 1");
    }
    switch (radio.rap_format) {
    case RapFormat::NbFmt0:
    case RapFormat::NbFmt1:
        if (radio.technology != Technology::NbIot) break;
        {
            const double cp = radio.rap_format == RapFormat::NbFmt0 ? kRaCpFmt0Ms : kRaCpFmt1Ms;
            return Milliseconds((cp + 5.0 * kRaSymbolMs) * 4.0 * radio.rep_rap);
        }
    case RapFormat::LteMFmt1:
        if (radio.technology != Technology::LteM) break;
        return Milliseconds(kLteMRapFmt1Ms * radio.rep_rap);
    }
    throw ModelError(Errc::UnknownFormat, "RAP format " + std::string(to_string(radio.rap_format)) +
                                              " is not defined for " + std::string(to_string(radio.technology)));
}

StateEnergyReport rap_energy(const DeviceProfile& profile, const RadioConfig& radio)
{
    StateEnergyReport r;
    r.add("rap", tx_power_consumption(profile, radio.ul_tx_power_dbm), rap_duration(radio), TimeKind::Active);
    return r;
}

Milliseconds rx_time(const RadioConfig& radio, std::int64_t payload_bits)
{
    const double l = static_cast<double>(dl_segments(radio, payload_bits));
    return kSubframe * (radio.n_sf * radio.rep_data_dl * l);
}

Milliseconds rx_gap_time(Milliseconds t_rx, const GapModel& gaps)
{
    validate(gaps);
    if (!gaps.rx_gaps_enabled || t_rx.value() <= 0.0) {
        return Milliseconds{};
    }
    return Milliseconds(ceil_tolerant(t_rx.value() * (1.0 / gaps.dl_availability - 1.0)));
}

StateEnergyReport rx_energy_for(const DeviceProfile& profile, Milliseconds t_rx, const GapModel& gaps,
                                const std::string& label)
{
    StateEnergyReport r;
    r.add(label, profile.p_rx, t_rx, TimeKind::Active);
    r.add(label + "_gap", profile.rx_gap_power(), rx_gap_time(t_rx, gaps), TimeKind::Gap);
    return r;
}

StateEnergyReport rx_energy(const DeviceProfile& profile, const RadioConfig& radio, std::int64_t payload_bits,
                            const GapModel& gaps)
{
    return rx_energy_for(profile, rx_time(radio, payload_bits), gaps);
}

StateEnergyReport uss_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers,
                                   const RadioConfig& radio, const GapModel& gaps)
{
    const int monitor_sf = timers.uss_monitor_sf * radio.rep_ctrl;
    if (monitor_sf > timers.uss_period_sf) {
        throw ModelError(Errc::MonitoringExceedsPeriod, "USS monitoring of " + std::to_string(monitor_sf) +
                                                            " SF exceeds the " +
                                                            std::to_string(timers.uss_period_sf) + " SF period");
    }
    StateEnergyReport r = rx_energy_for(profile, kSubframe * monitor_sf, gaps, "uss_monitoring");
    r.add("uss_sleep", profile.p_cdrx_sleep, kSubframe * (timers.uss_period_sf - monitor_sf), TimeKind::Sleep);
    return r;
}

StateEnergyReport cdrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers)
{
    if (timers.cdrx_ondur_sf > timers.cdrx_long_cycle_sf) {
        throw ModelError(Errc::OnDurExceedsCycle, "cDRX onDuration exceeds the long DRX cycle");
    }
    StateEnergyReport r;
    r.add_lump("cdrx_ondur", profile.e_cdrx_ondur, kSubframe * timers.cdrx_ondur_sf, TimeKind::Active);
    r.add("cdrx_sleep", profile.p_cdrx_sleep, kSubframe * (timers.cdrx_long_cycle_sf - timers.cdrx_ondur_sf),
          TimeKind::Sleep);
    return r;
}

StateEnergyReport idrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers)
{
    const Milliseconds busy = timers.idrx_ondur + profile.t_idrx_sync;
    if (timers.idrx_cycle < busy || !(timers.idrx_cycle.value() > 0.0)) {
        throw ModelError(Errc::CycleTooShort, "iDRX cycle is shorter than its onDuration plus synchronization");
    }
    StateEnergyReport r;
    r.add_lump("idrx_sync", profile.e_idrx_sync, profile.t_idrx_sync, TimeKind::Active);
    r.add_lump("paging", profile.e_paging * timers.n_paging, timers.idrx_ondur, TimeKind::Active);
    r.add("idrx_sleep", profile.p_edrx_sleep, timers.idrx_cycle - busy, TimeKind::Sleep);
    return r;
}

StateEnergyReport edrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers)
{
    if (timers.ptw > timers.edrx_cycle) {
        throw ModelError(Errc::PtwExceedsCycle, "paging time window exceeds the eDRX cycle");
    }
    StateEnergyReport r;
    if (timers.ptw.value() > 0.0) {
        const StateEnergyReport idrx = idrx_cycle_energy(profile, timers);
        r.append_repeated(idrx, ceil_tolerant(timers.ptw / timers.idrx_cycle));
    }
    r.add("edrx_sleep", profile.p_edrx_sleep, timers.edrx_cycle - timers.ptw, TimeKind::Sleep);
    return r;
}

StateEnergyReport psm_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers,
                                   Milliseconds inter_event, PsMode mode)
{
    const bool deep_sleep = mode == PsMode::PsmIdrx || mode == PsMode::PsmEdrx;
    const Milliseconds window = deep_sleep ? timers.t3324 : inter_event;
    if (window > inter_event) {
        throw ModelError(Errc::ActiveWindowExceedsInterval, "T3324 reachable window exceeds the interval to the next event");
    }
    const bool edrx = mode == PsMode::PsmEdrx || mode == PsMode::EdrxOnly;
    StateEnergyReport r;
    if (window.value() > 0.0) {
        const StateEnergyReport unit = edrx ? edrx_cycle_energy(profile, timers) : idrx_cycle_energy(profile, timers);
        const Milliseconds cycle = edrx ? timers.edrx_cycle : timers.idrx_cycle;
        r.append_repeated(unit, ceil_tolerant(window / cycle));
    }
    if (deep_sleep) {
        r.add("psm_sleep", profile.p_psm_sleep, inter_event - window, TimeKind::Sleep);
    }
    return r;
}

}  // namespace ciot
