#include "ciot/procedure.hpp"

#include <fstream>

#include "ciot/error.hpp"

namespace ciot {

namespace {

constexpr std::string_view kSrToSr = "SR->SR";

std::string_view technology_dir(Technology t)
{
    return t == Technology::NbIot ? "nbiot" : "ltem";
}

MessageStep parse_step(const nlohmann::json& j, const DelayTable& delays, std::size_t index)
{
    if (!j.is_object()) {
        throw ModelError(Errc::ParseError, "script step " + std::to_string(index) + " is not an object");
    }
    MessageStep s;
    try {
        s.name = j.value("name", std::string{});
        auto kind = j.find("kind");
        if (kind == j.end()) {
            throw ModelError(Errc::MissingField, "script step " + std::to_string(index) + " lacks 'kind'");
        }
        s.kind = message_kind_from_string(kind->get<std::string>());
        s.size_bits = j.value("size_bits", std::int64_t{0});
        if (auto d = j.find("delay_after"); d != j.end() && !d->is_null()) {
            s.delay_transition = d->get<std::string>();
            auto it = delays.find(s.delay_transition);
            s.delay_after = it == delays.end() ? Milliseconds{} : it->second;
        }
        if (auto d = j.find("delay_after_ms"); d != j.end()) {
            s.delay_after = Milliseconds(d->get<double>());
        }
        s.carries_payload = j.value("carries_payload", false);
        s.scheduling_request = j.value("scheduling_request", false);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(Errc::ParseError, "script step " + std::to_string(index) + ": " + e.what());
    }
    return s;
}

}  // namespace

std::string_view to_string(MessageKind k)
{
    switch (k) {
    case MessageKind::UlData: return "UL_DATA";
    case MessageKind::DlData: return "DL_DATA";
    case MessageKind::Rap: return "RAP";
    case MessageKind::DciRx: return "DCI_RX";
    case MessageKind::AckUl: return "ACK_UL";
    }
    return "?";
}

MessageKind message_kind_from_string(std::string_view s)
{
    if (s == "UL_DATA") return MessageKind::UlData;
    if (s == "DL_DATA") return MessageKind::DlData;
    if (s == "RAP") return MessageKind::Rap;
    if (s == "DCI_RX") return MessageKind::DciRx;
    if (s == "ACK_UL") return MessageKind::AckUl;
    throw ModelError(Errc::ParseError, "unknown message kind '" + std::string(s) + "'");
}

std::int64_t ProcedureScript::ul_total_bits() const
{
    std::int64_t total = 0;
    for (const auto& s : steps) {
        if (s.kind == MessageKind::UlData || s.kind == MessageKind::AckUl) total += s.size_bits;
    }
    return total;
}

std::int64_t ProcedureScript::dl_total_bits() const
{
    std::int64_t total = 0;
    for (const auto& s : steps) {
        if (s.kind == MessageKind::DlData) total += s.size_bits;
    }
    return total;
}

Milliseconds ProcedureScript::total_delay() const
{
    Milliseconds total;
    for (const auto& s : steps) total += s.delay_after;
    return total;
}

void validate(const ProcedureScript& script)
{
    if (script.steps.empty()) {
        throw ModelError(Errc::EmptyScript, "procedure script '" + script.name + "' has no steps");
    }
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const auto& s = script.steps[i];
        if (s.size_bits < 0) {
            throw ModelError(Errc::NegativeSize, "step '" + s.name + "' has a negative size");
        }
        if (s.delay_after.value() < 0.0) {
            throw ModelError(Errc::NegativeSize, "step '" + s.name + "' has a negative delay");
        }
        if (s.kind == MessageKind::Rap && i != 0) {
            throw ModelError(Errc::OrderingViolation, "RAP must be the first step of '" + script.name + "'");
        }
    }
}

ProcedureScript load_procedure_script(const nlohmann::json& doc, const DelayTable& delays,
                                      std::optional<Technology> technology)
{
    ProcedureScript script;
    const nlohmann::json* steps = &doc;
    if (doc.is_object()) {
        script.name = doc.value("name", std::string{});
        if (auto t = doc.find("technology"); t != doc.end()) {
            script.technology = technology_from_string(t->get<std::string>());
            if (technology && *technology != script.technology) {
                throw ModelError(Errc::TechnologyMismatch, "script '" + script.name + "' is for " +
                                                               std::string(to_string(script.technology)));
            }
        } else if (technology) {
            script.technology = *technology;
        } else {
            throw ModelError(Errc::MissingField, "script '" + script.name + "' lacks 'technology'");
        }
        auto it = doc.find("steps");
        if (it == doc.end()) {
            throw ModelError(Errc::EmptyScript, "script '" + script.name + "' has no 'steps'");
        }
        steps = &*it;
    } else if (technology) {
        script.technology = *technology;
    } else {
        throw ModelError(Errc::MissingField, "a bare step list needs an explicit technology");
    }
    if (!steps->is_array()) {
        throw ModelError(Errc::ParseError, "script steps must be an array");
    }
    for (std::size_t i = 0; i < steps->size(); ++i) {
        script.steps.push_back(parse_step((*steps)[i], delays, i));
    }
    validate(script);
    return script;
}

ProcedureScript load_procedure_script_file(const std::filesystem::path& path, const DelayTable& delays,
                                           std::optional<Technology> technology)
{
    std::ifstream in(path);
    if (!in) {
        throw ModelError(Errc::InvalidConfig, "cannot open procedure script '" + path.string() + "'");
    }
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        throw ModelError(Errc::ParseError, "procedure script '" + path.string() + "' is not valid JSON");
    }
    auto script = load_procedure_script(doc, delays, technology);
    if (script.name.empty()) {
        script.name = path.stem().string();
    }
    return script;
}

ProcedureLibrary load_procedure_library(const std::filesystem::path& dir, const DeviceProfile& profile)
{
    auto load = [&](const char* name) {
        return load_procedure_script_file(dir / technology_dir(profile.technology) / (std::string(name) + ".json"),
                                          profile.delay_table, profile.technology);
    };
    return {load("attach"), load("service_request"), load("release"), load("resume"), load("tau")};
}

ProcedureScript with_payload(ProcedureScript script, std::int64_t payload_bits)
{
    if (payload_bits < 0) {
        throw ModelError(Errc::NegativeSize, "payload size must be >= 0 bits");
    }
    for (auto& s : script.steps) {
        if (s.carries_payload) s.size_bits += payload_bits;
    }
    return script;
}

ProcedureScript expand_scheduling_requests(ProcedureScript script, int count, const DeviceProfile& profile)
{
    if (count < 0) {
        throw ModelError(Errc::InvalidConfig, "scheduling request count must be >= 0");
    }
    std::vector<MessageStep> out;
    for (const auto& s : script.steps) {
        if (!s.scheduling_request) {
            out.push_back(s);
            continue;
        }
        for (int i = 0; i < count; ++i) {
            MessageStep copy = s;
            if (i + 1 < count) {
                copy.delay_transition = std::string(kSrToSr);
                copy.delay_after = profile.delay(kSrToSr);
            }
            out.push_back(std::move(copy));
        }
    }
    script.steps = std::move(out);
    return script;
}

ProcedureScript attach_with_payload(const ProcedureScript& attach, std::int64_t payload_bits,
                                    const DeviceProfile& profile)
{
    ProcedureScript script = attach;
    script.name = attach.name + "+data";
    if (!script.steps.empty() && script.steps.back().delay_transition.empty()) {
        auto& last = script.steps.back();
        last.delay_transition = last.kind == MessageKind::DlData ? "DATA_RX->DCI" : "DATA_TX->DCI";
        last.delay_after = profile.delay(last.delay_transition);
    }
    script.steps.push_back({"DCI", MessageKind::DciRx, 0, "DCI->DATA_TX", profile.delay("DCI->DATA_TX"), false, false});
    script.steps.push_back({"UL data", MessageKind::UlData, 0, "", Milliseconds{}, true, false});
    return with_payload(std::move(script), payload_bits);
}

Milliseconds dci_time(const RadioConfig& radio)
{
    return kSubframe * (radio.dci_sf * radio.rep_ctrl);
}

Microjoules dci_energy(const DeviceProfile& profile, const RadioConfig& radio)
{
    return profile.p_rx * dci_time(radio);
}

StateEnergyReport message_energy(const MessageStep& step, const DeviceProfile& profile, const RadioConfig& radio,
                                 const GapModel& gaps)
{
    switch (step.kind) {
    case MessageKind::UlData: return tx_energy(profile, radio, step.size_bits, gaps);
    case MessageKind::DlData: return rx_energy(profile, radio, step.size_bits, gaps);
    case MessageKind::Rap: return rap_energy(profile, radio);
    case MessageKind::AckUl: return ack_energy(profile, radio, gaps);
    case MessageKind::DciRx: {
        StateEnergyReport r;
        r.add("dci", profile.p_rx, dci_time(radio), TimeKind::Active);
        return r;
    }
    }
    return {};
}

StateEnergyReport procedure_energy(const ProcedureScript& script, const DeviceProfile& profile,
                                   const RadioConfig& radio, const GapModel& gaps)
{
    if (script.technology != profile.technology || script.technology != radio.technology) {
        throw ModelError(Errc::TechnologyMismatch, "script '" + script.name + "' (" +
                                                       std::string(to_string(script.technology)) +
                                                       ") does not match device or radio technology");
    }
    validate(script);
    StateEnergyReport r;
    for (const auto& step : script.steps) {
        r.append(message_energy(step, profile, radio, gaps));
        r.add("delay", profile.p_delay(), step.delay_after, TimeKind::Sleep);
    }
    return r;
}

ProcedureScript service_request_script(const ProcedureLibrary& library, const DeviceProfile& profile,
                                       const RadioConfig& radio, std::int64_t payload_bits)
{
    return expand_scheduling_requests(with_payload(library.service_request, payload_bits),
                                      radio.n_scheduling_requests, profile);
}

StateEnergyReport service_request_energy(const ProcedureLibrary& library, const DeviceProfile& profile,
                                         const RadioConfig& radio, const GapModel& gaps,
                                         std::int64_t payload_bits)
{
    return procedure_energy(service_request_script(library, profile, radio, payload_bits), profile, radio, gaps);
}

}  // namespace ciot
