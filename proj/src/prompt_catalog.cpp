#include "rngaudit/prompt_catalog.hpp"

#include <fstream>

#include <json.hpp>

#include "rngaudit/errors.hpp"

namespace rngaudit {

namespace {

constexpr const char* kPlaceholder = "{X}";

// EN wording is fixed verbatim; the ES opening "Dame un número aleatorio
// entre 1 y ..." likewise. The remaining translations ship as editable
// defaults (see data/prompt_templates.json).
constexpr std::pair<Language, const char*> kBuiltinTemplates[] = {
    {Language::CN, "给我一个1到{X}之间的随机数。请只返回数字，不要附加任何其他文字"},
    {Language::EN,
     "Give me a random number between 1 and {X}. Please only return the number with no "
     "additional text"},
    {Language::ES,
     "Dame un número aleatorio entre 1 y {X}. Por favor, devuelve solo el número sin texto "
     "adicional"},
    {Language::FR,
     "Donne-moi un nombre aléatoire entre 1 et {X}. Merci de ne renvoyer que le nombre, sans "
     "aucun texte supplémentaire"},
    {Language::IN,
     "मुझे 1 और {X} के बीच एक यादृच्छिक संख्या दो। कृपया केवल संख्या लिखें, कोई अतिरिक्त पाठ नहीं"},
    {Language::JP, "1から{X}までの乱数をひとつください。数字だけを返してください。余計な文章は不要です"},
    {Language::RU,
     "Дай мне случайное число от 1 до {X}. Пожалуйста, верни только число без какого-либо "
     "дополнительного текста"},
};

size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++count;
    return count;
}

void validate_template(Language language, const std::string& text) {
    if (count_occurrences(text, kPlaceholder) != 1)
        throw Error(Errc::Usage, "template for " + std::string(language_code(language)) +
                                     " must contain exactly one {X} placeholder");
}

}  // namespace

const PromptCatalog& PromptCatalog::builtin() {
    static const PromptCatalog catalog = [] {
        PromptCatalog c;
        for (const auto& [language, text] : kBuiltinTemplates) {
            validate_template(language, text);
            c.templates_.emplace(language, text);
        }
        return c;
    }();
    return catalog;
}

PromptCatalog PromptCatalog::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Usage, "cannot open template file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Usage, "template file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_array()) throw Error(Errc::Usage, "template file must be a JSON array");

    PromptCatalog catalog;
    for (const auto& record : doc) {
        if (!record.is_object() || !record.contains("language_code") ||
            !record.contains("template"))
            throw Error(Errc::Usage,
                        "template records need language_code and template fields");
        const std::string code = record.at("language_code").get<std::string>();
        const auto language = language_from_code(code);
        if (!language) throw Error(Errc::UnsupportedLanguage, "unknown language code: " + code);
        const std::string text = record.at("template").get<std::string>();
        validate_template(*language, text);
        if (!catalog.templates_.emplace(*language, text).second)
            throw Error(Errc::Usage, "duplicate template for language: " + code);
    }
    return catalog;
}

const std::string& PromptCatalog::template_text(Language language) const {
    const auto it = templates_.find(language);
    if (it == templates_.end())
        throw Error(Errc::UnsupportedLanguage,
                    "no template for language: " + std::string(language_code(language)));
    return it->second;
}

bool PromptCatalog::has(Language language) const {
    return templates_.find(language) != templates_.end();
}

std::string PromptCatalog::render(Language language, int upper) const {
    if (upper < 2) throw Error(Errc::InvalidRange, "upper bound must be at least 2");
    std::string text = template_text(language);
    const size_t pos = text.find(kPlaceholder);
    text.replace(pos, 3, std::to_string(upper));
    return text;
}

std::string render_prompt(Language language, int upper) {
    return PromptCatalog::builtin().render(language, upper);
}

}  // namespace rngaudit
