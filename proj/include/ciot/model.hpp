#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ciot/units.hpp"

namespace ciot {

enum class Technology { NbIot, LteM };

/// Idle-mode power saving applied between transmit events.
enum class PsMode { PsmIdrx, PsmEdrx, EdrxOnly, IdrxOnly };

std::string_view to_string(Technology t);
std::string_view to_string(PsMode m);
Technology technology_from_string(std::string_view s);
PsMode ps_mode_from_string(std::string_view s);

/// Network timers. Every duration is in ms; the cDRX and USS parameters are
/// counted in subframes.
struct TimerConfig {
    Milliseconds t3324{60'000.0};
    Milliseconds t3412{2.0 * kMsPerHour};
    Milliseconds idrx_cycle{2560.0};
    Milliseconds idrx_ondur{0.0};
    int n_paging = 1;
    Milliseconds edrx_cycle{20'480.0};
    Milliseconds ptw{5120.0};
    int cdrx_long_cycle_sf = 1024;
    int cdrx_ondur_sf = 8;
    int uss_period_sf = 10;
    int uss_monitor_sf = 1;
    Milliseconds rrc_inactivity{20'000.0};
};

void validate(const TimerConfig& timers);

/// Deterministic periodic uplink traffic. The cycle length is stored and the
/// rate derived from it, so that cycle * rate == 1 h holds by construction.
class TrafficProfile {
public:
    TrafficProfile() = default;

    static TrafficProfile from_cycle(std::int64_t payload_bytes, Milliseconds cycle);
    static TrafficProfile from_rate(std::int64_t payload_bytes, double rate_per_hour);

    [[nodiscard]] std::int64_t payload_bytes() const { return payload_bytes_; }
    [[nodiscard]] std::int64_t payload_bits() const { return payload_bytes_ * 8; }
    [[nodiscard]] Milliseconds cycle() const { return cycle_; }
    [[nodiscard]] double rate_per_hour() const { return kMsPerHour / cycle_.value(); }

private:
    TrafficProfile(std::int64_t payload_bytes, Milliseconds cycle);

    std::int64_t payload_bytes_ = 100;
    Milliseconds cycle_{kMsPerHour};
};

struct BatteryConfig {
    double capacity_wh = 5.0;
    double safety_factor = 1.0;
    double e_device_mj_per_hour = 0.0;
};

void validate(const BatteryConfig& battery);

}  // namespace ciot
