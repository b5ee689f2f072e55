#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ciot/cycle_spec.hpp"
#include "ciot/lifetime.hpp"

namespace ciot {

enum class TraceLabel {
    Tx, TxGap, Rx, RxGap, Dci, Delay, CdrxOndur, CdrxSleep, Idrx, EdrxSleep, PsmSleep, Sync, Rap,
};

std::string_view to_string(TraceLabel label);

/// Phase of the transmit cycle a segment belongs to, matching the parts of
/// CycleEnergyBreakdown.
enum class CycleComponent { Sync, ServiceRequest, Cdrx, Release, Tau, Sleep };
inline constexpr std::size_t kComponentCount = 6;

std::string_view to_string(CycleComponent c);

/// Power is held in nanowatts and duration in whole milliseconds, so a
/// segment's energy is an exact integer number of picojoules.
struct TraceSegment {
    TraceLabel label = TraceLabel::Tx;
    std::int64_t power_nw = 0;
    std::int64_t duration_ms = 0;
    CycleComponent component = CycleComponent::Sleep;

    [[nodiscard]] double power_mw() const { return static_cast<double>(power_nw) / 1e6; }
};

class PowerTrace {
public:
    PowerTrace() = default;
    explicit PowerTrace(std::string origin) : origin_(std::move(origin)) {}

    /// Appends a segment; zero-length segments are dropped and a segment
    /// identical in label, power and component to the previous one extends it.
    void push(TraceLabel label, std::int64_t power_nw, std::int64_t duration_ms, CycleComponent component);
    void append(const PowerTrace& other);

    [[nodiscard]] const std::vector<TraceSegment>& segments() const { return segments_; }
    [[nodiscard]] std::int64_t total_ms() const { return total_ms_; }
    [[nodiscard]] const std::string& origin() const { return origin_; }

private:
    std::vector<TraceSegment> segments_;
    std::int64_t total_ms_ = 0;
    std::string origin_;
};

struct OracleOptions {
    /// Position in the 20-subframe downlink window where each reception starts.
    int grid_phase = 0;
};

/// Exact energy of a trace in picojoules (nW x ms).
std::int64_t integrate_pj(const PowerTrace& trace);
/// Energy of a trace in microjoules.
double integrate(const PowerTrace& trace);

/// One uplink transmission of `payload_bits` laid out subframe by subframe.
PowerTrace trace_uplink(const CycleSpec& spec, std::int64_t payload_bits,
                        CycleComponent component = CycleComponent::ServiceRequest);
/// One downlink reception walked over the subframe availability grid.
PowerTrace trace_downlink(const CycleSpec& spec, std::int64_t payload_bits, const OracleOptions& options = {},
                          CycleComponent component = CycleComponent::ServiceRequest);

PowerTrace build_timeline(const CycleSpec& spec, const OracleOptions& options = {});

struct OracleComparison {
    double closed_form_uj = 0.0;
    double oracle_uj = 0.0;
    double relative_error = 0.0;
    std::array<double, kComponentCount> closed_form_parts_uj{};
    std::array<double, kComponentCount> oracle_parts_uj{};
    CycleEnergyBreakdown breakdown;
    std::int64_t trace_ms = 0;
};

OracleComparison compare(const CycleSpec& spec, const OracleOptions& options = {});

/// CSV with columns t_start_ms,label,power_mw,duration_ms.
void write_trace_csv(std::ostream& out, const PowerTrace& trace);

}  // namespace ciot
