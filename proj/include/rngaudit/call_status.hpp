#pragma once

#include <optional>
#include <string_view>

namespace rngaudit {

/// Outcome classification of one completion call, as persisted in cell files.
enum class CallStatus {
    Ok,
    OutOfRange,
    Unparsable,
    ExtraText,
    Decoherent,
    ProviderError,
};

std::string_view call_status_name(CallStatus status);
std::optional<CallStatus> call_status_from_name(std::string_view name);

/// True for statuses whose parsed value is in range and feeds the histogram.
inline bool counts_in_range(CallStatus status) {
    return status == CallStatus::Ok || status == CallStatus::ExtraText ||
           status == CallStatus::Decoherent;
}

}  // namespace rngaudit
