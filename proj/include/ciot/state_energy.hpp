#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ciot/model.hpp"
#include "ciot/profile.hpp"
#include "ciot/radio.hpp"
#include "ciot/units.hpp"

namespace ciot {

/// Transmission and reception gap parameters.
struct GapModel {
    Milliseconds tx_max_continuous{256.0};
    Milliseconds tx_gap{40.0};
    double dl_availability = 14.0 / 20.0;
    bool tx_gaps_enabled = true;
    bool rx_gaps_enabled = true;

    /// Gaps are an NB-IoT feature; LTE-M gets none in either direction.
    static GapModel for_technology(Technology technology, double dl_availability = 14.0 / 20.0);
};

void validate(const GapModel& gaps);

enum class TimeKind { Active, Gap, Sleep };

struct EnergyTerm {
    std::string label;
    Milliwatts power;
    Milliseconds duration;
    Microjoules energy;
    TimeKind kind = TimeKind::Active;
};

/// Energy of one state or procedure together with the terms it was built
/// from. Waiting time between messages is booked as sleep.
class StateEnergyReport {
public:
    void add(std::string label, Milliwatts power, Milliseconds duration, TimeKind kind);
    /// A measured energy lump spread over its duration.
    void add_lump(std::string label, Microjoules energy, Milliseconds duration, TimeKind kind);
    void append(const StateEnergyReport& other);
    /// Appends `count` back-to-back repetitions of another report.
    void append_repeated(const StateEnergyReport& other, double count);

    [[nodiscard]] Milliseconds active() const { return active_; }
    [[nodiscard]] Milliseconds gap() const { return gap_; }
    [[nodiscard]] Milliseconds sleep() const { return sleep_; }
    [[nodiscard]] Milliseconds duration() const { return active_ + gap_ + sleep_; }
    [[nodiscard]] Microjoules energy() const { return energy_; }
    [[nodiscard]] const std::vector<EnergyTerm>& breakdown() const { return terms_; }

private:
    void push(EnergyTerm term);

    Milliseconds active_;
    Milliseconds gap_;
    Milliseconds sleep_;
    Microjoules energy_;
    std::vector<EnergyTerm> terms_;
};

/// Number of transport blocks needed for a payload, l(k).
std::int64_t segments(std::int64_t payload_bits, int tbs_bits, int header_bits);
std::int64_t ul_segments(const RadioConfig& radio, std::int64_t payload_bits);
std::int64_t dl_segments(const RadioConfig& radio, std::int64_t payload_bits);

Milliseconds tx_time(const RadioConfig& radio, std::int64_t payload_bits);
Milliseconds tx_gap_time(Milliseconds t_tx, const GapModel& gaps);
/// TX state for a given on-air time, at the configured uplink power.
StateEnergyReport tx_energy_for(const DeviceProfile& profile, const RadioConfig& radio, Milliseconds t_tx,
                                const GapModel& gaps, const std::string& label = "tx");
StateEnergyReport tx_energy(const DeviceProfile& profile, const RadioConfig& radio, std::int64_t payload_bits,
                            const GapModel& gaps);

/// An ACK occupies one RU of 1 subcarrier x 4 slots (2 ms) on NB-IoT and
/// one subframe on LTE-M, repeated rep_ctrl times.
Milliseconds ack_time(const RadioConfig& radio);
StateEnergyReport ack_energy(const DeviceProfile& profile, const RadioConfig& radio, const GapModel& gaps);

inline constexpr double kRaSymbolMs = 0.2667;
inline constexpr double kRaCpFmt0Ms = 0.0667;
inline constexpr double kRaCpFmt1Ms = 0.2667;
inline constexpr double kLteMRapFmt1Ms = 0.903;

Milliseconds rap_duration(const RadioConfig& radio);
StateEnergyReport rap_energy(const DeviceProfile& profile, const RadioConfig& radio);

Milliseconds rx_time(const RadioConfig& radio, std::int64_t payload_bits);
Milliseconds rx_gap_time(Milliseconds t_rx, const GapModel& gaps);
StateEnergyReport rx_energy_for(const DeviceProfile& profile, Milliseconds t_rx, const GapModel& gaps,
                                const std::string& label = "rx");
StateEnergyReport rx_energy(const DeviceProfile& profile, const RadioConfig& radio, std::int64_t payload_bits,
                            const GapModel& gaps);

StateEnergyReport uss_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers,
                                   const RadioConfig& radio, const GapModel& gaps);
StateEnergyReport cdrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers);
StateEnergyReport idrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers);
StateEnergyReport edrx_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers);

/// Reachable window of T3324 followed by deep sleep until the next event.
/// PsmEdrx monitors with eDRX cycles inside the window. The non-PSM modes
/// monitor for the whole interval and never enter deep sleep.
StateEnergyReport psm_cycle_energy(const DeviceProfile& profile, const TimerConfig& timers,
                                   Milliseconds inter_event, PsMode mode = PsMode::PsmIdrx);

}  // namespace ciot
