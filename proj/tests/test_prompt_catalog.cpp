#include <doctest.h>

#include <cctype>
#include <fstream>
#include <string>
#include <vector>

#include "rngaudit/errors.hpp"
#include "rngaudit/prompt_catalog.hpp"

using namespace rngaudit;

namespace {

size_t substring_count(const std::string& haystack, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = haystack.find(needle); pos != std::string::npos;
         pos = haystack.find(needle, pos + needle.size()))
        ++count;
    return count;
}

// ASCII digit runs in order of appearance.
std::vector<std::string> digit_runs(const std::string& s) {
    std::vector<std::string> runs;
    for (size_t i = 0; i < s.size();) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            runs.push_back(s.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
    return runs;
}

}  // namespace

TEST_CASE("english prompt is verbatim") {
    CHECK(render_prompt(Language::EN, 100) ==
          "Give me a random number between 1 and 100. Please only return the number with no "
          "additional text");
    CHECK(render_prompt(Language::EN, 5) ==
          "Give me a random number between 1 and 5. Please only return the number with no "
          "additional text");
}

TEST_CASE("spanish prompt opens as published") {
    const std::string es = render_prompt(Language::ES, 100);
    CHECK(es.rfind("Dame un número aleatorio entre 1 y 100", 0) == 0);
}

TEST_CASE("every template renders the bounds exactly once") {
    for (Language language : kAllLanguages) {
        for (int upper : {5, 10, 100}) {
            const std::string rendered = render_prompt(language, upper);
            INFO("language=", language_code(language), " upper=", upper);
            CHECK(substring_count(rendered, std::to_string(upper)) == 1);
            CHECK(rendered.find('1') != std::string::npos);
            CHECK(rendered.find("{X}") == std::string::npos);

            // The only ASCII digit runs are the lower bound 1 and the upper bound.
            const auto runs = digit_runs(rendered);
            REQUIRE(runs.size() == 2);
            const bool ordered = runs[0] == "1" && runs[1] == std::to_string(upper);
            const bool reversed = runs[1] == "1" && runs[0] == std::to_string(upper);
            CHECK((ordered || reversed));
        }
    }
}

TEST_CASE("rendering is pure") {
    for (Language language : kAllLanguages)
        CHECK(render_prompt(language, 10) == render_prompt(language, 10));
}

TEST_CASE("render rejects bad inputs") {
    CHECK_THROWS_AS(render_prompt(Language::EN, 1), Error);
    CHECK_THROWS_AS(render_prompt(Language::EN, 0), Error);
    CHECK_THROWS_AS(render_prompt(Language::EN, -5), Error);
    try {
        render_prompt(Language::EN, 1);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidRange);
    }
}

TEST_CASE("bundled template file matches the builtin catalog") {
    const PromptCatalog loaded =
        PromptCatalog::load_file(std::string(RNGAUDIT_DATA_DIR) + "/prompt_templates.json");
    for (Language language : kAllLanguages) {
        REQUIRE(loaded.has(language));
        CHECK(loaded.template_text(language) ==
              PromptCatalog::builtin().template_text(language));
    }
}

TEST_CASE("loading rejects malformed template files") {
    const std::string dir = RNGAUDIT_FIXTURE_DIR;

    auto write_temp = [](const std::string& name, const std::string& body) {
        const std::string path = "/tmp/" + name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << body;
        return path;
    };

    CHECK_THROWS_AS(PromptCatalog::load_file("/nonexistent/templates.json"), Error);
    CHECK_THROWS_AS(
        PromptCatalog::load_file(write_temp("tpl_bad_json.json", "not json at all")), Error);
    CHECK_THROWS_AS(PromptCatalog::load_file(write_temp(
                        "tpl_no_placeholder.json",
                        R"([{"language_code":"EN","template":"no placeholder here"}])")),
                    Error);
    CHECK_THROWS_AS(PromptCatalog::load_file(write_temp(
                        "tpl_two_placeholders.json",
                        R"([{"language_code":"EN","template":"{X} and {X}"}])")),
                    Error);
    CHECK_THROWS_AS(PromptCatalog::load_file(write_temp(
                        "tpl_dup.json",
                        R"([{"language_code":"EN","template":"a {X}"},)"
                        R"({"language_code":"EN","template":"b {X}"}])")),
                    Error);
    try {
        PromptCatalog::load_file(write_temp(
            "tpl_unknown.json", R"([{"language_code":"XX","template":"a {X}"}])"));
        FAIL("expected unsupported-language error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnsupportedLanguage);
    }

    // A file covering fewer languages loads, but missing lookups fail.
    const PromptCatalog partial = PromptCatalog::load_file(
        write_temp("tpl_partial.json", R"([{"language_code":"EN","template":"a {X}"}])"));
    CHECK(partial.has(Language::EN));
    CHECK_FALSE(partial.has(Language::JP));
    try {
        partial.render(Language::JP, 10);
        FAIL("expected unsupported-language error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::UnsupportedLanguage);
    }
}
