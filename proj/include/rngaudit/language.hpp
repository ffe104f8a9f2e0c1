#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace rngaudit {

/// The seven prompt languages, identified by their two-letter codes.
enum class Language { CN, EN, ES, FR, IN, JP, RU };

inline constexpr std::array<Language, 7> kAllLanguages = {
    Language::CN, Language::EN, Language::ES, Language::FR,
    Language::IN, Language::JP, Language::RU,
};

/// Two-letter code; a string_view so comparisons are lexicographic.
std::string_view language_code(Language lang);

/// Parses a two-letter code; empty optional if it is not one of the seven.
std::optional<Language> language_from_code(std::string_view code);

/// Like language_from_code but throws an unsupported-language Error.
Language require_language(std::string_view code);

}  // namespace rngaudit
