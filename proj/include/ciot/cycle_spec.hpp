#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ciot/model.hpp"
#include "ciot/procedure.hpp"
#include "ciot/profile.hpp"
#include "ciot/radio.hpp"
#include "ciot/state_energy.hpp"

namespace ciot {

/// Everything needed to evaluate one transmit cycle.
struct CycleSpec {
    DeviceProfile device;
    RadioConfig radio;
    TrafficProfile traffic;
    TimerConfig timers;
    PsMode ps_mode = PsMode::PsmIdrx;
    bool first_cycle_attach = false;
    double downlink_availability = 14.0 / 20.0;
    /// No connection at all: the whole cycle is one idle interval.
    bool idle_only = false;
    /// Replaces the technology gap model (used for fault injection).
    std::optional<GapModel> gap_override;
    std::shared_ptr<const ProcedureLibrary> procedures;
    std::string label;
    std::string scenario;

    [[nodiscard]] GapModel gaps() const;
};

void validate(const CycleSpec& spec);

}  // namespace ciot
