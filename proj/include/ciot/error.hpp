#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ciot {

enum class Errc {
    MissingField,
    UnitViolation,
    OrderingViolation,
    ParseError,
    ChecksumMismatch,
    OutOfDomain,
    InvalidConfig,
    InvalidRepetitions,
    HeaderExceedsTbs,
    UnknownFormat,
    MonitoringExceedsPeriod,
    OnDurExceedsCycle,
    CycleTooShort,
    PtwExceedsCycle,
    ActiveWindowExceedsInterval,
    EmptyScript,
    NegativeSize,
    TechnologyMismatch,
    InvalidTimer,
    ZeroConsumption,
    EmptyGrid,
    Unreachable,
};

std::string_view to_string(Errc code);

/// Every failure raised by the model carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class ModelError : public std::runtime_error {
public:
    ModelError(Errc code, const std::string& what);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace ciot
