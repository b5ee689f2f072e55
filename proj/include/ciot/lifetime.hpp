#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ciot/cycle_spec.hpp"

namespace ciot {

/// Per-cycle energy split into the phases of a transmit cycle. Each part is
/// rounded to whole microjoules once, and total is their integer sum.
struct CycleEnergyBreakdown {
    std::int64_t sync_uj = 0;
    std::int64_t service_request_uj = 0;
    std::int64_t cdrx_uj = 0;
    std::int64_t release_uj = 0;
    std::int64_t tau_uj = 0;
    std::int64_t sleep_uj = 0;
    std::int64_t total_uj = 0;
    int tau_count = 0;

    [[nodiscard]] std::int64_t sum_of_parts() const
    {
        return sync_uj + service_request_uj + cdrx_uj + release_uj + tau_uj + sleep_uj;
    }
};

/// TAUs inside one cycle. Every connection restarts T3412, so a cycle of
/// exactly T3412 has none.
int tau_count(Milliseconds cycle, Milliseconds t3412);

/// The uplink connection of a cycle: service request (or attach) with the
/// payload folded in.
ProcedureScript connection_script(const CycleSpec& spec);

/// Connected-mode DRX for the inactivity period: whole long cycles, with a
/// trailing partial cycle charged at sleep power.
StateEnergyReport cdrx_inactivity_energy(const DeviceProfile& profile, const TimerConfig& timers);

CycleEnergyBreakdown cycle_energy(const CycleSpec& spec);

double hourly_energy_mj(const CycleSpec& spec);
double hourly_energy_mj(const CycleEnergyBreakdown& breakdown, const TrafficProfile& traffic);

double estimate_lifetime_hours(double e_hour_mj, const BatteryConfig& battery);
double estimate_lifetime_hours(const CycleSpec& spec, const BatteryConfig& battery);

struct SweepPoint {
    std::string device;
    std::string scenario;
    std::int64_t payload_bytes = 100;
    double cycle_hours = 1.0;
    double t3412_hours = 2.0;
};

/// Axes are expanded device-major, then scenario, T3412, cycle, payload.
struct SweepGrid {
    std::vector<std::string> devices;
    std::vector<std::string> scenarios;
    std::vector<std::int64_t> payloads_bytes;
    std::vector<double> cycles_hours;
    std::vector<double> t3412_hours;

    [[nodiscard]] std::vector<SweepPoint> expand() const;
};

struct SweepRow {
    SweepPoint point;
    std::string technology;
    std::optional<CycleEnergyBreakdown> breakdown;
    double e_hour_mj = 0.0;
    double lifetime_hours = 0.0;
    std::string error;

    [[nodiscard]] bool ok() const { return error.empty(); }
};

using SpecFactory = std::function<CycleSpec(const SweepPoint&)>;

/// Evaluates every point, in parallel when threads > 1. Rows come back in
/// point order whatever the thread count. A failing point records its error
/// instead of aborting the sweep.
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, const SpecFactory& factory,
                            const BatteryConfig& battery, unsigned threads = 1);

extern const char* const kSweepCsvHeader;

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

/// Exact decimal rendering of integer microjoules as millijoules.
std::string format_mj(std::int64_t microjoules);

}  // namespace ciot
