#include "rngaudit/language.hpp"

#include "rngaudit/errors.hpp"

namespace rngaudit {

std::string_view language_code(Language lang) {
    switch (lang) {
        case Language::CN: return "CN";
        case Language::EN: return "EN";
        case Language::ES: return "ES";
        case Language::FR: return "FR";
        case Language::IN: return "IN";
        case Language::JP: return "JP";
        case Language::RU: return "RU";
    }
    return "??";
}

std::optional<Language> language_from_code(std::string_view code) {
    for (Language lang : kAllLanguages) {
        if (code == language_code(lang)) return lang;
    }
    return std::nullopt;
}

Language require_language(std::string_view code) {
    if (auto lang = language_from_code(code)) return *lang;
    throw Error(Errc::UnsupportedLanguage, "unknown language code '" + std::string(code) + "'");
}

}  // namespace rngaudit
