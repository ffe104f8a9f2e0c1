#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rngaudit/language.hpp"

namespace rngaudit {

/// Reasoning strategies mined from think traces. A trace may carry any subset;
/// Other is assigned only when no pattern fires on a non-empty trace.
enum class StrategyLabel {
    PiDigits,
    DateTime,
    CentralValue,
    WordMapping,
    CodeRandFunction,
    RealWorldSimulation,
    PersonalInfo,
    Instinct,
    Other,
};

inline constexpr std::array<StrategyLabel, 9> kAllStrategyLabels{
    StrategyLabel::PiDigits,       StrategyLabel::DateTime,
    StrategyLabel::CentralValue,   StrategyLabel::WordMapping,
    StrategyLabel::CodeRandFunction, StrategyLabel::RealWorldSimulation,
    StrategyLabel::PersonalInfo,   StrategyLabel::Instinct,
    StrategyLabel::Other,
};

/// Stable snake_case name used in pattern files and CSV output.
std::string_view strategy_label_name(StrategyLabel label);
std::optional<StrategyLabel> strategy_label_from_name(std::string_view name);

/// One classification rule. `language` is the two-letter code the pattern
/// targets (documentation only; every rule is applied to every trace).
/// `pattern` is an ECMAScript regex, matched case-insensitively.
struct PatternRule {
    StrategyLabel label = StrategyLabel::Other;
    std::string language;
    std::string pattern;

    bool operator==(const PatternRule&) const = default;
};

/// Immutable compiled rule set; safe for unrestricted concurrent use.
class PatternTable {
public:
    /// Built-in rules: English patterns for every label plus best-effort
    /// patterns for the other prompt languages.
    static const PatternTable& builtin();

    /// Compiles rules. Throws Error(Usage) on a bad regex or language code.
    static PatternTable from_rules(std::vector<PatternRule> rules);

    /// Loads a UTF-8 JSON array of {"label", "language_code", "pattern"}
    /// records. Throws Error(Usage) on unreadable or malformed input.
    static PatternTable load_file(const std::filesystem::path& path);

    const std::vector<PatternRule>& rules() const { return rules_; }

    /// Multi-label classification over case-folded text. {Other} only when no
    /// rule fires on a non-empty trace; empty trace gives the empty set.
    std::set<StrategyLabel> classify(std::string_view think_text) const;

private:
    PatternTable() = default;
    std::vector<PatternRule> rules_;
    std::vector<std::regex> compiled_;
};

std::set<StrategyLabel> classify_strategies(std::string_view think_text);
std::set<StrategyLabel> classify_strategies(std::string_view think_text,
                                            const PatternTable& table);

/// Script-ratio heuristic for CJK/Devanagari/Cyrillic; Latin text is split
/// EN/ES/FR by a stopword vote. Below confidence returns nullopt (unknown).
std::optional<Language> detect_reasoning_language(std::string_view think_text);

struct NumberExtraction {
    std::vector<int64_t> proposed_numbers;
    std::optional<int64_t> final_stated;
    bool mismatch = false;
};

/// proposed_numbers = all standalone integers in trace order. final_stated is
/// taken from the last sentence holding both a commitment phrase ("go with",
/// "settle on", "final number is", …) and an integer: the first integer after
/// the phrase, else the last one before it. mismatch requires both
/// final_stated and remainder_value to exist and differ.
NumberExtraction extract_numbers(std::string_view think_text,
                                 std::optional<int64_t> remainder_value);

struct CotAnalysis {
    std::set<StrategyLabel> labels;
    std::optional<Language> reasoning_language;
    std::vector<int64_t> proposed_numbers;
    std::optional<int64_t> final_stated;
    bool mismatch = false;
};

CotAnalysis analyze_cot(std::string_view think_text,
                        std::optional<int64_t> remainder_value,
                        const PatternTable& table = PatternTable::builtin());

struct StrategyAggregate {
    size_t total_traces = 0;
    /// Fraction of traces carrying each label; need not sum to 1 (multi-label).
    std::map<StrategyLabel, double> label_fraction;
    /// Keyed by language code, "unknown" for undetected traces.
    std::map<std::string, double> language_fraction;
};

/// Errors: empty input -> Error(EmptyAggregate).
StrategyAggregate aggregate_strategies(const std::vector<CotAnalysis>& analyses);

/// CSV row for one analyzed trace, matching kStrategyCsvHeader. Labels are
/// semicolon-joined names; absent final_stated stays empty; mismatch is 1/0.
inline constexpr std::string_view kStrategyCsvHeader =
    "cell_key,call_index,labels,reasoning_language,n_proposed,final_stated,mismatch";
std::string strategy_csv_row(std::string_view cell_key, int64_t call_index,
                             const CotAnalysis& analysis);

}  // namespace rngaudit
