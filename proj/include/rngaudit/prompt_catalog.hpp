#pragma once

#include <map>
#include <string>

#include "rngaudit/language.hpp"

namespace rngaudit {

/// Immutable set of per-language prompt templates. Each template carries the
/// literal placeholder token "{X}" exactly once; rendering substitutes the
/// decimal upper bound and nothing else.
class PromptCatalog {
public:
    static const PromptCatalog& builtin();

    /// Loads a UTF-8 JSON array of {"language_code": ..., "template": ...}
    /// records. Duplicate languages, unknown codes, or templates without
    /// exactly one "{X}" are usage errors.
    static PromptCatalog load_file(const std::string& path);

    const std::string& template_text(Language language) const;
    std::string render(Language language, int upper) const;
    bool has(Language language) const;

private:
    std::map<Language, std::string> templates_;
};

/// Renders from the builtin catalog.
std::string render_prompt(Language language, int upper);

}  // namespace rngaudit
