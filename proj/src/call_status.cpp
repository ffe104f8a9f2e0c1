#include "rngaudit/call_status.hpp"

namespace rngaudit {

std::string_view call_status_name(CallStatus status) {
    switch (status) {
        case CallStatus::Ok: return "ok";
        case CallStatus::OutOfRange: return "out_of_range";
        case CallStatus::Unparsable: return "unparsable";
        case CallStatus::ExtraText: return "extra_text";
        case CallStatus::Decoherent: return "decoherent";
        case CallStatus::ProviderError: return "provider_error";
    }
    return "unparsable";
}

std::optional<CallStatus> call_status_from_name(std::string_view name) {
    if (name == "ok") return CallStatus::Ok;
    if (name == "out_of_range") return CallStatus::OutOfRange;
    if (name == "unparsable") return CallStatus::Unparsable;
    if (name == "extra_text") return CallStatus::ExtraText;
    if (name == "decoherent") return CallStatus::Decoherent;
    if (name == "provider_error") return CallStatus::ProviderError;
    return std::nullopt;
}

}  // namespace rngaudit
