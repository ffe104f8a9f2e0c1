#pragma once

#include <stdexcept>
#include <string>

namespace rngaudit {

enum class Errc {
    Usage,
    UnsupportedLanguage,
    InvalidRange,
    InvalidTemperature,
    InvalidPlan,
    EmptyPlan,
    PlanDrift,
    ProviderRejected,
    TransientExhausted,
    WireFormat,
    ScriptCoverage,
    Storage,
    EmptyCell,
    EmptySelection,
    EmptyAggregate,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

}  // namespace rngaudit
