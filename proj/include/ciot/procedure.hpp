#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ciot/profile.hpp"
#include "ciot/radio.hpp"
#include "ciot/state_energy.hpp"

namespace ciot {

enum class MessageKind { UlData, DlData, Rap, DciRx, AckUl };

std::string_view to_string(MessageKind k);
MessageKind message_kind_from_string(std::string_view s);

struct MessageStep {
    std::string name;
    MessageKind kind = MessageKind::UlData;
    std::int64_t size_bits = 0;
    /// Transition name looked up in the device delay table; empty when the
    /// delay was given numerically or the step is last.
    std::string delay_transition;
    Milliseconds delay_after;
    bool carries_payload = false;
    bool scheduling_request = false;
};

struct ProcedureScript {
    std::string name;
    Technology technology = Technology::NbIot;
    std::vector<MessageStep> steps;

    [[nodiscard]] std::int64_t ul_total_bits() const;
    [[nodiscard]] std::int64_t dl_total_bits() const;
    [[nodiscard]] Milliseconds total_delay() const;
};

void validate(const ProcedureScript& script);

/// Accepts either {"name", "technology", "steps": [...]} or a bare array of
/// steps (which then needs `technology`). Named delays resolve against the
/// device table.
ProcedureScript load_procedure_script(const nlohmann::json& doc, const DelayTable& delays,
                                      std::optional<Technology> technology = std::nullopt);
ProcedureScript load_procedure_script_file(const std::filesystem::path& path, const DelayTable& delays,
                                           std::optional<Technology> technology = std::nullopt);

struct ProcedureLibrary {
    ProcedureScript attach;
    ProcedureScript service_request;
    ProcedureScript release;
    ProcedureScript resume;
    ProcedureScript tau;
};

/// Loads attach, service_request, release, resume and tau from `dir`.
ProcedureLibrary load_procedure_library(const std::filesystem::path& dir, const DeviceProfile& profile);

/// Adds the payload to every step flagged as carrying it.
ProcedureScript with_payload(ProcedureScript script, std::int64_t payload_bits);

/// Repeats each scheduling-request step `count` times, spaced by the
/// SR->SR delay. A count of 0 drops the step.
ProcedureScript expand_scheduling_requests(ProcedureScript script, int count, const DeviceProfile& profile);

/// Attach followed by a scheduled uplink data step carrying the payload.
ProcedureScript attach_with_payload(const ProcedureScript& attach, std::int64_t payload_bits,
                                    const DeviceProfile& profile);

Microjoules dci_energy(const DeviceProfile& profile, const RadioConfig& radio);
Milliseconds dci_time(const RadioConfig& radio);

StateEnergyReport message_energy(const MessageStep& step, const DeviceProfile& profile, const RadioConfig& radio,
                                 const GapModel& gaps);

StateEnergyReport procedure_energy(const ProcedureScript& script, const DeviceProfile& profile,
                                   const RadioConfig& radio, const GapModel& gaps);

/// Service request script with payload and scheduling requests applied.
ProcedureScript service_request_script(const ProcedureLibrary& library, const DeviceProfile& profile,
                                       const RadioConfig& radio, std::int64_t payload_bits);

StateEnergyReport service_request_energy(const ProcedureLibrary& library, const DeviceProfile& profile,
                                         const RadioConfig& radio, const GapModel& gaps,
                                         std::int64_t payload_bits);

}  // namespace ciot
