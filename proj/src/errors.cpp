#include "rngaudit/errors.hpp"

namespace rngaudit {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::Usage: return "usage";
        case Errc::UnsupportedLanguage: return "unsupported-language";
        case Errc::InvalidRange: return "invalid-range";
        case Errc::InvalidTemperature: return "invalid-temperature";
        case Errc::InvalidPlan: return "invalid-plan";
        case Errc::EmptyPlan: return "empty-plan";
        case Errc::PlanDrift: return "plan-drift";
        case Errc::ProviderRejected: return "provider-rejected";
        case Errc::TransientExhausted: return "transient-exhausted";
        case Errc::WireFormat: return "wire-format";
        case Errc::ScriptCoverage: return "script-coverage";
        case Errc::Storage: return "storage";
        case Errc::EmptyCell: return "empty-cell";
        case Errc::EmptySelection: return "empty-selection";
        case Errc::EmptyAggregate: return "empty-aggregate";
    }
    return "unknown";
}

}  // namespace rngaudit
