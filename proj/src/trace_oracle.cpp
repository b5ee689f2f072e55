#include "ciot/trace_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ciot/error.hpp"

namespace ciot {

namespace {

// The oracle keeps its own copy of the frame-level constants rather than
// reading GapModel, so that a corrupted model constant shows up as a
// disagreement instead of being replayed by both sides.
constexpr std::int64_t kTxBurstLimitMs = 256;
constexpr std::int64_t kTxGapMs = 40;
constexpr std::int64_t kGridLength = 20;
constexpr std::array<bool, kGridLength> kUnavailable = [] {
    std::array<bool, kGridLength> a{};
    for (int i : {0, 4, 5, 9, 10, 15}) a[i] = true;
    return a;
}();
constexpr std::int64_t kNbAckUnitMs = 2;  // 4 slots of 0.5 ms
constexpr std::int64_t kLteMAckUnitMs = 1;

std::int64_t to_nw(Milliwatts p)
{
    return std::llround(p.value() * 1e6);
}

std::int64_t whole_ms(Milliseconds t)
{
    return std::llround(t.value());
}

/// Places a measured energy lump on the integer grid: the duration is
/// rounded up to whole ms and the power chosen to keep the energy.
void push_lump(PowerTrace& trace, TraceLabel label, Microjoules energy, Milliseconds duration,
               CycleComponent component, std::int64_t max_ms = std::numeric_limits<std::int64_t>::max())
{
    if (energy.value() == 0.0 && duration.value() == 0.0) {
        return;
    }
    std::int64_t ms = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(duration.value() - 1e-9)));
    ms = std::min(ms, max_ms);
    if (ms <= 0) {
        return;
    }
    trace.push(label, std::llround(energy.value() * 1e6 / static_cast<double>(ms)), ms, component);
}

std::int64_t transport_blocks(std::int64_t bits, int tbs, int header)
{
    if (bits < 0) {
        throw ModelError(Errc::NegativeSize, "payload size must be >= 0 bits");
    }
    const std::int64_t usable = tbs - header;
    if (usable <= 0) {
        throw ModelError(Errc::HeaderExceedsTbs, "header leaves no room in the transport block");
    }
    std::int64_t blocks = 0;
    for (std::int64_t left = bits; left > 0; left -= usable) ++blocks;
    return blocks;
}

class TimelineBuilder {
public:
    TimelineBuilder(const CycleSpec& spec, const OracleOptions& options)
        : spec_(spec), dev_(spec.device), radio_(spec.radio), options_(options), trace_(spec.label),
          nb_(spec.radio.technology == Technology::NbIot),
          p_tx_(to_nw(tx_power_consumption(spec.device, spec.radio.ul_tx_power_dbm))),
          p_tx_gap_(to_nw(spec.device.tx_gap_power())), p_rx_(to_nw(spec.device.p_rx)),
          p_rx_gap_(to_nw(spec.device.rx_gap_power()))
    {
    }

    PowerTrace take() { return std::move(trace_); }

    void transmit(std::int64_t on_air_ms, CycleComponent c, TraceLabel label = TraceLabel::Tx)
    {
        std::int64_t continuous = 0;
        while (on_air_ms > 0) {
            const std::int64_t chunk = nb_ ? std::min(on_air_ms, kTxBurstLimitMs - continuous) : on_air_ms;
            trace_.push(label, p_tx_, chunk, c);
            on_air_ms -= chunk;
            continuous += chunk;
            if (nb_ && continuous == kTxBurstLimitMs) {
                trace_.push(TraceLabel::TxGap, p_tx_gap_, kTxGapMs, c);
                continuous = 0;
            }
        }
    }

    void uplink(std::int64_t bits, CycleComponent c)
    {
        const int tbs = radio_.tbs->lookup(radio_.mcs, nb_ ? radio_.n_ru : radio_.n_sf);
        const std::int64_t blocks = transport_blocks(bits, tbs, radio_.header_bits_ul);
        const std::int64_t per_block =
            nb_ ? whole_ms(radio_.t_ru) * radio_.n_ru * radio_.rep_data_ul : std::int64_t{radio_.n_sf} * radio_.rep_data_ul;
        transmit(per_block * blocks, c);
    }

    void ack(CycleComponent c)
    {
        transmit((nb_ ? kNbAckUnitMs : kLteMAckUnitMs) * radio_.rep_ctrl, c);
    }

    void downlink(std::int64_t bits, CycleComponent c)
    {
        const int tbs = radio_.tbs->lookup(radio_.mcs, radio_.n_sf);
        std::int64_t needed =
            transport_blocks(bits, tbs, radio_.header_bits_dl) * radio_.n_sf * radio_.rep_data_dl;
        if (!nb_) {
            trace_.push(TraceLabel::Rx, p_rx_, needed, c);
            return;
        }
        std::int64_t index = ((options_.grid_phase % kGridLength) + kGridLength) % kGridLength;
        while (needed > 0) {
            if (kUnavailable[index]) {
                trace_.push(TraceLabel::RxGap, p_rx_gap_, 1, c);
            } else {
                trace_.push(TraceLabel::Rx, p_rx_, 1, c);
                --needed;
            }
            index = (index + 1) % kGridLength;
        }
    }

    void rap(CycleComponent c)
    {
        const Milliseconds d = rap_duration(radio_);
        push_lump(trace_, TraceLabel::Rap, tx_power_consumption(dev_, radio_.ul_tx_power_dbm) * d, d, c);
    }

    void script(const ProcedureScript& s, CycleComponent c)
    {
        for (const auto& step : s.steps) {
            switch (step.kind) {
            case MessageKind::Rap: rap(c); break;
            case MessageKind::DciRx:
                trace_.push(TraceLabel::Dci, p_rx_, std::int64_t{radio_.dci_sf} * radio_.rep_ctrl, c);
                break;
            case MessageKind::UlData: uplink(step.size_bits, c); break;
            case MessageKind::DlData: downlink(step.size_bits, c); break;
            case MessageKind::AckUl: ack(c); break;
            }
            trace_.push(TraceLabel::Delay, to_nw(dev_.p_delay()), whole_ms(step.delay_after), c);
        }
    }

    void sync(CycleComponent c)
    {
        push_lump(trace_, TraceLabel::Sync, dev_.e_sync, dev_.t_sync, c);
    }

    void cdrx(std::int64_t inactivity_ms)
    {
        const auto& t = spec_.timers;
        const std::int64_t cycle = t.cdrx_long_cycle_sf;
        const std::int64_t on = t.cdrx_ondur_sf;
        const std::int64_t sleep_nw = to_nw(dev_.p_cdrx_sleep);
        for (std::int64_t start = 0; start < inactivity_ms; start += cycle) {
            const std::int64_t left = inactivity_ms - start;
            if (left >= on) {
                push_lump(trace_, TraceLabel::CdrxOndur, dev_.e_cdrx_ondur, Milliseconds(static_cast<double>(on)),
                          CycleComponent::Cdrx);
                trace_.push(TraceLabel::CdrxSleep, sleep_nw, std::min(cycle, left) - on, CycleComponent::Cdrx);
            } else {
                trace_.push(TraceLabel::CdrxSleep, sleep_nw, left, CycleComponent::Cdrx);
            }
        }
    }

    /// One paging cycle, cut short at `left` ms.
    std::int64_t idrx_cycle(std::int64_t left)
    {
        const auto& t = spec_.timers;
        const std::int64_t cycle = whole_ms(t.idrx_cycle);
        const std::int64_t span = std::min(cycle, left);
        const std::int64_t before = trace_.total_ms();
        push_lump(trace_, TraceLabel::Idrx, dev_.e_idrx_sync + dev_.e_paging * t.n_paging,
                  t.idrx_ondur + dev_.t_idrx_sync, CycleComponent::Sleep, span);
        const std::int64_t busy = trace_.total_ms() - before;
        trace_.push(TraceLabel::EdrxSleep, to_nw(dev_.p_edrx_sleep), span - busy, CycleComponent::Sleep);
        return span;
    }

    std::int64_t edrx_cycle(std::int64_t left)
    {
        const auto& t = spec_.timers;
        const std::int64_t span = std::min(whole_ms(t.edrx_cycle), left);
        const std::int64_t ptw = std::min(whole_ms(t.ptw), span);
        for (std::int64_t done = 0; done < ptw;) done += idrx_cycle(ptw - done);
        trace_.push(TraceLabel::EdrxSleep, to_nw(dev_.p_edrx_sleep), span - ptw, CycleComponent::Sleep);
        return span;
    }

    void idle(std::int64_t length_ms)
    {
        if (length_ms < 0) {
            throw ModelError(Errc::CycleTooShort, "transmit cycle is shorter than the activity it contains");
        }
        const PsMode mode = spec_.ps_mode;
        const bool deep = mode == PsMode::PsmIdrx || mode == PsMode::PsmEdrx;
        const bool edrx = mode == PsMode::PsmEdrx || mode == PsMode::EdrxOnly;
        const std::int64_t window = deep ? std::min(whole_ms(spec_.timers.t3324), length_ms) : length_ms;
        for (std::int64_t done = 0; done < window;) {
            done += edrx ? edrx_cycle(window - done) : idrx_cycle(window - done);
        }
        if (deep) {
            trace_.push(TraceLabel::PsmSleep, to_nw(dev_.p_psm_sleep), length_ms - window, CycleComponent::Sleep);
        }
    }

    [[nodiscard]] std::int64_t now() const { return trace_.total_ms(); }

private:
    const CycleSpec& spec_;
    const DeviceProfile& dev_;
    const RadioConfig& radio_;
    OracleOptions options_;
    PowerTrace trace_;
    bool nb_;
    std::int64_t p_tx_;
    std::int64_t p_tx_gap_;
    std::int64_t p_rx_;
    std::int64_t p_rx_gap_;
};

}  // namespace

std::string_view to_string(TraceLabel label)
{
    switch (label) {
    case TraceLabel::Tx: return "TX";
    case TraceLabel::TxGap: return "TX_GAP";
    case TraceLabel::Rx: return "RX";
    case TraceLabel::RxGap: return "RX_GAP";
    case TraceLabel::Dci: return "DCI";
    case TraceLabel::Delay: return "DELAY";
    case TraceLabel::CdrxOndur: return "CDRX_ONDUR";
    case TraceLabel::CdrxSleep: return "CDRX_SLEEP";
    case TraceLabel::Idrx: return "IDRX";
    case TraceLabel::EdrxSleep: return "EDRX_SLEEP";
    case TraceLabel::PsmSleep: return "PSM_SLEEP";
    case TraceLabel::Sync: return "SYNC";
    case TraceLabel::Rap: return "RAP";
    }
    return "?";
}

std::string_view to_string(CycleComponent c)
{
    switch (c) {
    case CycleComponent::Sync: return "sync";
    case CycleComponent::ServiceRequest: return "service_request";
    case CycleComponent::Cdrx: return "cdrx";
    case CycleComponent::Release: return "release";
    case CycleComponent::Tau: return "tau";
    case CycleComponent::Sleep: return "sleep";
    }
    return "?";
}

void PowerTrace::push(TraceLabel label, std::int64_t power_nw, std::int64_t duration_ms, CycleComponent component)
{
    if (duration_ms <= 0) {
        return;
    }
    total_ms_ += duration_ms;
    if (!segments_.empty()) {
        auto& last = segments_.back();
        if (last.label == label && last.power_nw == power_nw && last.component == component) {
            last.duration_ms += duration_ms;
            return;
        }
    }
    segments_.push_back({label, power_nw, duration_ms, component});
}

void PowerTrace::append(const PowerTrace& other)
{
    for (const auto& s : other.segments_) {
        push(s.label, s.power_nw, s.duration_ms, s.component);
    }
}

std::int64_t integrate_pj(const PowerTrace& trace)
{
    std::int64_t total = 0;
    for (const auto& s : trace.segments()) {
        total += s.power_nw * s.duration_ms;
    }
    return total;
}

double integrate(const PowerTrace& trace)
{
    return static_cast<double>(integrate_pj(trace)) / 1e6;
}

PowerTrace trace_uplink(const CycleSpec& spec, std::int64_t payload_bits, CycleComponent component)
{
    TimelineBuilder b(spec, {});
    b.uplink(payload_bits, component);
    return b.take();
}

PowerTrace trace_downlink(const CycleSpec& spec, std::int64_t payload_bits, const OracleOptions& options,
                          CycleComponent component)
{
    TimelineBuilder b(spec, options);
    b.downlink(payload_bits, component);
    return b.take();
}

PowerTrace build_timeline(const CycleSpec& spec, const OracleOptions& options)
{
    validate(spec);
    TimelineBuilder b(spec, options);
    const std::int64_t cycle = whole_ms(spec.traffic.cycle());
    if (spec.idle_only) {
        b.idle(cycle);
        return b.take();
    }

    b.sync(CycleComponent::Sync);
    b.script(connection_script(spec), CycleComponent::ServiceRequest);
    b.cdrx(whole_ms(spec.timers.rrc_inactivity));
    b.script(spec.procedures->release, CycleComponent::Release);

    // T3412 restarts when the connection opens; each expiry before the next
    // uplink report wakes the device for a tracking area update.
    const std::int64_t t3412 = whole_ms(spec.timers.t3412);
    for (std::int64_t expiry = t3412; expiry < cycle; expiry += t3412) {
        b.idle(expiry - b.now());
        b.sync(CycleComponent::Tau);
        b.script(spec.procedures->tau, CycleComponent::Tau);
    }
    b.idle(cycle - b.now());
    return b.take();
}

OracleComparison compare(const CycleSpec& spec, const OracleOptions& options)
{
    OracleComparison out;
    out.breakdown = cycle_energy(spec);
    const auto& bd = out.breakdown;
    out.closed_form_uj = static_cast<double>(bd.total_uj);
    out.closed_form_parts_uj = {static_cast<double>(bd.sync_uj),    static_cast<double>(bd.service_request_uj),
                                static_cast<double>(bd.cdrx_uj),    static_cast<double>(bd.release_uj),
                                static_cast<double>(bd.tau_uj),     static_cast<double>(bd.sleep_uj)};

    const PowerTrace trace = build_timeline(spec, options);
    out.trace_ms = trace.total_ms();
    std::array<std::int64_t, kComponentCount> parts_pj{};
    for (const auto& s : trace.segments()) {
        parts_pj[static_cast<std::size_t>(s.component)] += s.power_nw * s.duration_ms;
    }
    for (std::size_t i = 0; i < kComponentCount; ++i) {
        out.oracle_parts_uj[i] = static_cast<double>(parts_pj[i]) / 1e6;
    }
    out.oracle_uj = integrate(trace);
    const double diff = std::abs(out.closed_form_uj - out.oracle_uj);
    out.relative_error = out.oracle_uj > 0.0 ? diff / out.oracle_uj
                                             : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return out;
}

void write_trace_csv(std::ostream& out, const PowerTrace& trace)
{
    out << "t_start_ms,label,power_mw,duration_ms\n";
    std::int64_t t = 0;
    char power[48];
    for (const auto& s : trace.segments()) {
        std::snprintf(power, sizeof power, "%.6f", s.power_mw());
        out << t << ',' << to_string(s.label) << ',' << power << ',' << s.duration_ms << '\n';
        t += s.duration_ms;
    }
}

}  // namespace ciot
