#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rngaudit/call_status.hpp"

namespace rngaudit {

/// Structured view of one raw completion text. Invariants:
///   value absent  ⇒ status = unparsable (provider_error is set by the runner)
///   decoherent    ⇒ extra_text
///   status = ok   ⇒ value present and in range, no extra text
struct ParsedOutput {
    std::optional<int64_t> value;
    bool in_range = false;
    bool extra_text = false;
    bool decoherent = false;
    std::optional<std::string> think_text;
    CallStatus status = CallStatus::Unparsable;
};

/// Splits off the first <think>…</think> block. An unterminated opening tag
/// consumes the whole tail (remainder becomes empty). Total on any bytes.
std::pair<std::optional<std::string>, std::string> extract_think(std::string_view text);

/// All standalone base-10 integers in order of appearance. A standalone token
/// is a maximal ASCII digit run (after fullwidth-digit normalization) that is
/// not embedded in an alphanumeric word, not preceded by a minus sign, and not
/// part of a decimal number. Runs that overflow int64 are not tokens.
std::vector<int64_t> scan_integers(std::string_view text);

/// A standalone integer with its byte span. Offsets index the normalized text
/// (fullwidth digits folded to ASCII); for input already free of fullwidth
/// digits they index the input itself.
struct IntegerToken {
    int64_t value = 0;
    size_t begin = 0;
    size_t end = 0;
};

/// scan_integers with token spans, same standalone rule.
std::vector<IntegerToken> scan_integer_tokens(std::string_view text);

/// Parses text that has already had its think block removed.
ParsedOutput parse_number(std::string_view text, int upper);

/// extract_think composed with parse_number; sets think_text on the result.
ParsedOutput parse_response(std::string_view text, int upper);

}  // namespace rngaudit
