#include "rngaudit/cot_analyzer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rngaudit/errors.hpp"
#include "rngaudit/output_parser.hpp"
#include "rngaudit/utf8.hpp"

namespace rngaudit {

namespace {

constexpr std::array<std::string_view, 9> kLabelNames{
    "pi_digits",       "date_time",    "central_value",
    "word_mapping",    "code_rand_function", "real_world_simulation",
    "personal_info",   "instinct",     "other",
};

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

// Folds fullwidth digits/space (mirroring the integer scanner's normalization,
// so token spans index this string) plus typographic quotes, keeping phrase
// search and span arithmetic in one coordinate space.
std::string fold_for_sentences(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size();) {
        const Utf8Char c = decode_utf8(text, i);
        if (c.cp >= 0xFF10 && c.cp <= 0xFF19)
            out.push_back(static_cast<char>('0' + (c.cp - 0xFF10)));
        else if (c.cp == 0x3000)
            out.push_back(' ');
        else if (c.cp == 0x2018 || c.cp == 0x2019)
            out.push_back('\'');
        else if (c.cp == 0x201C || c.cp == 0x201D)
            out.push_back('"');
        else
            out.append(text.substr(i, static_cast<size_t>(c.len)));
        i += static_cast<size_t>(c.len);
    }
    return out;
}

bool sentence_boundary(char32_t cp) {
    return cp == '.' || cp == '!' || cp == '?' || cp == '\n' || cp == 0x3002 ||
           cp == 0xFF01 || cp == 0xFF1F;
}

// Phrases marking the model's commitment to a final number. Lowercase; the
// non-English entries are best-effort translations.
constexpr std::array<std::string_view, 31> kCommitmentPhrases{
    "go with",       "settle on",     "settling on",   "settled on",
    "final number",  "final answer",  "i'll just",     "i will just",
    "seems good",    "sounds good",   "seems okay",    "i'll pick",
    "i'll choose",   "i'll say",      "i choose",      "my answer is",
    "the answer is", "stick with",    "the random number is",
    "my choice is",  "number will be",
    "me quedo con",  "la respuesta es", "número final",
    "je choisis",    "la réponse est",  "nombre final",  "je prends",
    "にします",       "最終",            "остановлюсь на",
};

std::vector<PatternRule> builtin_rules() {
    using L = StrategyLabel;
    return {
        {L::PiDigits, "EN", R"(\bpi\b)"},
        {L::PiDigits, "EN", R"(π)"},
        {L::PiDigits, "EN", R"(3\.1415)"},

        {L::DateTime, "EN", R"(current (date|time|second|minute|hour))"},
        {L::DateTime, "EN", R"(today'?s date)"},
        {L::DateTime, "EN", R"(date (and|or) time)"},
        {L::DateTime, "EN", R"(\btimestamp\b)"},
        {L::DateTime, "EN", R"(time[- ]based)"},
        {L::DateTime, "EN", R"(minutes? and seconds?)"},
        {L::DateTime, "EN", R"(seconds? since midnight)"},
        {L::DateTime, "EN", R"(the time right now)"},
        {L::DateTime, "EN", R"(\bclock\b)"},
        {L::DateTime, "ES", R"(hora actual|fecha actual)"},
        {L::DateTime, "FR", R"(heure actuelle|date actuelle)"},
        {L::DateTime, "JP", R"(現在の時刻|今の時間)"},
        {L::DateTime, "CN", R"(当前时间|现在时间)"},
        {L::DateTime, "RU", R"(екущее время)"},
        {L::DateTime, "IN", R"(वर्तमान समय)"},

        {L::CentralValue, "EN", R"(\bmiddle\b)"},
        {L::CentralValue, "EN", R"(mid-?point)"},
        {L::CentralValue, "EN", R"(half-?way)"},
        {L::CentralValue, "EN", R"(\bcentral\b)"},
        {L::CentralValue, "EN", R"(\bmedian\b)"},
        {L::CentralValue, "EN", R"(\baverage\b)"},
        {L::CentralValue, "EN", R"(cent(er|re) of the range)"},
        {L::CentralValue, "ES", R"(punto medio|valor central)"},
        {L::CentralValue, "FR", R"(milieu de|valeur centrale)"},

        {L::WordMapping, "EN", R"(number of letters)"},
        {L::WordMapping, "EN", R"(counting (the )?letters)"},
        {L::WordMapping, "EN", R"(\balphabet\b)"},
        {L::WordMapping, "EN", R"(map(ping)? (each )?letters?)"},
        {L::WordMapping, "EN", R"(letters? correspond)"},
        {L::WordMapping, "EN", R"(numeric value of (the )?(individual )?(letters?|word))"},
        {L::WordMapping, "EN", R"(=\s*1\b[^=]{0,15}=\s*2\b)"},
        {L::WordMapping, "ES", R"(cada letra|valor de las letras)"},
        {L::WordMapping, "FR", R"(chaque lettre)"},

        {L::CodeRandFunction, "EN", R"(randint)"},
        {L::CodeRandFunction, "EN", R"(randrange)"},
        {L::CodeRandFunction, "EN", R"(\brand\(\))"},
        {L::CodeRandFunction, "EN", R"(math\.random)"},
        {L::CodeRandFunction, "EN", R"(import random)"},
        {L::CodeRandFunction, "EN", R"(random module)"},
        {L::CodeRandFunction, "EN", R"(random\.random)"},
        {L::CodeRandFunction, "EN", R"(\bpython\b)"},
        {L::CodeRandFunction, "EN", R"(\bnumpy\b)"},

        {L::RealWorldSimulation, "EN", R"(\bdice\b)"},
        {L::RealWorldSimulation, "EN", R"((die|dice) rolls?)"},
        {L::RealWorldSimulation, "EN", R"(roll(s|ed|ing)?[^.!?\n]{0,24}\b(die|dice)\b)"},
        {L::RealWorldSimulation, "EN", R"(six-sided)"},
        {L::RealWorldSimulation, "EN", R"(flip(ping|s)?[^.!?\n]{0,12}coins?)"},
        {L::RealWorldSimulation, "EN", R"(coin (flip|toss))"},
        {L::RealWorldSimulation, "EN", R"(\bspinner\b)"},
        {L::RealWorldSimulation, "EN", R"(roulette)"},
        {L::RealWorldSimulation, "EN", R"(lottery)"},
        {L::RealWorldSimulation, "EN", R"(shuffl)"},
        {L::RealWorldSimulation, "EN", R"(in a hat)"},
        {L::RealWorldSimulation, "EN", R"(draw(ing)? a card)"},
        {L::RealWorldSimulation, "ES", R"(lanzar (un dado|una moneda)|tirar (un dado|los dados))"},
        {L::RealWorldSimulation, "FR", R"(lancer (un dé|une pièce))"},
        {L::RealWorldSimulation, "JP", R"(サイコロ|コイン)"},
        {L::RealWorldSimulation, "CN", R"(骰子|硬币)"},
        {L::RealWorldSimulation, "RU", R"(кубик|монет)"},
        {L::RealWorldSimulation, "IN", R"(पासा|सिक्का)"},

        {L::PersonalInfo, "EN", R"(my birth)"},
        {L::PersonalInfo, "EN", R"(my (favou?rite|lucky) numbers?)"},
        {L::PersonalInfo, "EN", R"((my |a )?(phone|mobile) number)"},
        {L::PersonalInfo, "EN", R"(area code)"},
        {L::PersonalInfo, "EN", R"(my (age|name|shoe size|siblings))"},
        {L::PersonalInfo, "EN", R"(personal (info|information|data))"},
        {L::PersonalInfo, "ES", R"(mi (cumpleaños|teléfono|edad|nombre))"},
        {L::PersonalInfo, "FR", R"(mon (anniversaire|âge|nom)|ma date de naissance)"},

        {L::Instinct, "EN", R"(comes? to mind)"},
        {L::Instinct, "EN", R"(came to mind)"},
        {L::Instinct, "EN", R"(gut (feeling|instinct))"},
        {L::Instinct, "EN", R"(\binstinct)"},
        {L::Instinct, "EN", R"(just (pick|choose|go with|say))"},
        {L::Instinct, "EN", R"(off the top of my head)"},
        {L::Instinct, "EN", R"(how i'?m feeling)"},
        {L::Instinct, "EN", R"(feel (energetic|calm|lucky))"},
        {L::Instinct, "EN", R"(without overthinking)"},
        {L::Instinct, "EN", R"(in my (mind|head)\b)"},
        {L::Instinct, "EN", R"(clos(e|ing) my eyes)"},
        {L::Instinct, "ES", R"(se me ocurr|primer número que)"},
        {L::Instinct, "FR", R"(me vient à l'esprit)"},
        {L::Instinct, "JP", R"(直感)"},
        {L::Instinct, "CN", R"(直觉|凭感觉)"},
        {L::Instinct, "RU", R"(нтуици)"},
    };
}

bool valid_rule_language(const std::string& code) {
    return code == "*" || language_from_code(code).has_value();
}

}  // namespace

std::string_view strategy_label_name(StrategyLabel label) {
    return kLabelNames[static_cast<size_t>(label)];
}

std::optional<StrategyLabel> strategy_label_from_name(std::string_view name) {
    for (size_t i = 0; i < kLabelNames.size(); ++i)
        if (kLabelNames[i] == name) return kAllStrategyLabels[i];
    return std::nullopt;
}

const PatternTable& PatternTable::builtin() {
    static const PatternTable table = from_rules(builtin_rules());
    return table;
}

PatternTable PatternTable::from_rules(std::vector<PatternRule> rules) {
    PatternTable table;
    table.compiled_.reserve(rules.size());
    for (const PatternRule& rule : rules) {
        if (!valid_rule_language(rule.language))
            throw Error(Errc::Usage, "bad pattern language code '" + rule.language + "'");
        if (rule.label == StrategyLabel::Other)
            throw Error(Errc::Usage, "label 'other' cannot carry patterns");
        try {
            table.compiled_.emplace_back(
                rule.pattern, std::regex::ECMAScript | std::regex::icase |
                                  std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw Error(Errc::Usage,
                        "bad pattern '" + rule.pattern + "': " + e.what());
        }
    }
    table.rules_ = std::move(rules);
    return table;
}

PatternTable PatternTable::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Usage, "cannot read pattern file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::Usage, "bad pattern file " + path.string() + ": " + e.what());
    }
    if (!doc.is_array())
        throw Error(Errc::Usage, "pattern file must hold a JSON array");
    std::vector<PatternRule> rules;
    rules.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("label") || !item.contains("pattern"))
            throw Error(Errc::Usage, "pattern record needs label and pattern");
        const std::string name = item["label"].get<std::string>();
        const auto label = strategy_label_from_name(name);
        if (!label) throw Error(Errc::Usage, "unknown strategy label '" + name + "'");
        rules.push_back({*label, item.value("language_code", std::string("*")),
                         item["pattern"].get<std::string>()});
    }
    return from_rules(std::move(rules));
}

std::set<StrategyLabel> PatternTable::classify(std::string_view think_text) const {
    std::set<StrategyLabel> labels;
    if (think_text.empty()) return labels;
    const std::string text(think_text);
    for (size_t i = 0; i < compiled_.size(); ++i) {
        if (labels.count(rules_[i].label)) continue;
        if (std::regex_search(text, compiled_[i])) labels.insert(rules_[i].label);
    }
    if (labels.empty()) labels.insert(StrategyLabel::Other);
    return labels;
}

std::set<StrategyLabel> classify_strategies(std::string_view think_text) {
    return PatternTable::builtin().classify(think_text);
}

std::set<StrategyLabel> classify_strategies(std::string_view think_text,
                                            const PatternTable& table) {
    return table.classify(think_text);
}

namespace {

bool is_latin_letter(char32_t cp) {
    if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) return true;
    if (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) return true;
    return cp >= 0x100 && cp <= 0x17F;
}

// Function-word and signature-word tables for the Latin-script vote. Sharing
// words between languages is fine: the vote needs a strict winner.
const std::set<std::string>& vote_words(Language lang) {
    static const std::set<std::string> en{
        "the", "i", "a", "an", "is", "it", "that", "this", "of", "and", "to",
        "so", "need", "just", "maybe", "okay", "wait", "me", "my", "number",
        "random", "think", "should", "with", "without", "let", "but", "not",
        "what", "how", "if"};
    static const std::set<std::string> es{
        "el", "la", "los", "las", "un", "una", "y", "de", "que", "es", "en",
        "entre", "por", "con", "para", "no", "me", "mi", "número", "aleatorio",
        "dame", "pero", "si", "como", "también", "más", "está"};
    static const std::set<std::string> fr{
        "le", "la", "les", "un", "une", "et", "de", "que", "est", "dans",
        "entre", "pour", "avec", "ne", "pas", "je", "il", "nous", "moi", "mon",
        "nombre", "aléatoire", "donne", "alors", "mais", "si", "donc"};
    switch (lang) {
        case Language::ES: return es;
        case Language::FR: return fr;
        default: return en;
    }
}

}  // namespace

std::optional<Language> detect_reasoning_language(std::string_view think_text) {
    size_t kana = 0, han = 0, deva = 0, cyr = 0, latin = 0, letters = 0;
    for (size_t i = 0; i < think_text.size();) {
        const Utf8Char c = decode_utf8(think_text, i);
        i += static_cast<size_t>(c.len);
        const char32_t cp = c.cp;
        if ((cp >= 0x3040 && cp <= 0x30FF) || (cp >= 0x31F0 && cp <= 0x31FF)) {
            ++kana; ++letters;
        } else if ((cp >= 0x3400 && cp <= 0x4DBF) || (cp >= 0x4E00 && cp <= 0x9FFF) ||
                   (cp >= 0xF900 && cp <= 0xFAFF)) {
            ++han; ++letters;
        } else if (cp >= 0x0900 && cp <= 0x097F) {
            ++deva; ++letters;
        } else if (cp >= 0x0400 && cp <= 0x04FF) {
            ++cyr; ++letters;
        } else if (is_latin_letter(cp)) {
            ++latin; ++letters;
        }
    }
    if (letters == 0) return std::nullopt;
    const double n = static_cast<double>(letters);
    // Kana first: Japanese mixes kana with kanji, Chinese has no kana.
    if (static_cast<double>(kana) / n >= 0.05) return Language::JP;
    if (static_cast<double>(han) / n >= 0.25) return Language::CN;
    if (static_cast<double>(deva) / n >= 0.25) return Language::IN;
    if (static_cast<double>(cyr) / n >= 0.25) return Language::RU;
    if (static_cast<double>(latin) / n < 0.5) return std::nullopt;

    size_t votes_en = 0, votes_es = 0, votes_fr = 0;
    std::string token;
    auto tally = [&] {
        if (token.empty()) return;
        if (vote_words(Language::EN).count(token)) ++votes_en;
        if (vote_words(Language::ES).count(token)) ++votes_es;
        if (vote_words(Language::FR).count(token)) ++votes_fr;
        token.clear();
    };
    for (size_t i = 0; i < think_text.size();) {
        const Utf8Char c = decode_utf8(think_text, i);
        if (is_latin_letter(c.cp)) {
            if (c.cp >= 'A' && c.cp <= 'Z')
                token.push_back(static_cast<char>(c.cp - 'A' + 'a'));
            else
                token.append(think_text.substr(i, static_cast<size_t>(c.len)));
        } else {
            tally();
        }
        i += static_cast<size_t>(c.len);
    }
    tally();

    const size_t best = std::max({votes_en, votes_es, votes_fr});
    if (best < 2) return std::nullopt;
    const int winners = (votes_en == best) + (votes_es == best) + (votes_fr == best);
    if (winners != 1) return std::nullopt;
    if (votes_en == best) return Language::EN;
    if (votes_es == best) return Language::ES;
    return Language::FR;
}

NumberExtraction extract_numbers(std::string_view think_text,
                                 std::optional<int64_t> remainder_value) {
    NumberExtraction out;
    out.proposed_numbers = scan_integers(think_text);
    if (think_text.empty()) return out;

    const std::string folded = fold_for_sentences(think_text);

    struct Candidate {
        std::string sentence;
        size_t phrase_begin = 0;
    };
    std::optional<Candidate> last;

    size_t begin = 0;
    auto consider = [&](size_t end) {
        if (end > begin) {
            const std::string_view sv(folded.data() + begin, end - begin);
            const std::string lower = ascii_lower(sv);
            size_t phrase_begin = std::string::npos;
            for (std::string_view phrase : kCommitmentPhrases) {
                const size_t pos = lower.rfind(phrase);
                if (pos != std::string::npos &&
                    (phrase_begin == std::string::npos || pos > phrase_begin))
                    phrase_begin = pos;
            }
            if (phrase_begin != std::string::npos &&
                !scan_integer_tokens(sv).empty())
                last = Candidate{std::string(sv), phrase_begin};
        }
        begin = end;
    };
    for (size_t i = 0; i < folded.size();) {
        const Utf8Char c = decode_utf8(folded, i);
        const size_t next = i + static_cast<size_t>(c.len);
        if (sentence_boundary(c.cp)) {
            consider(i);
            begin = next;
        }
        i = next;
    }
    consider(folded.size());

    if (last) {
        const auto tokens = scan_integer_tokens(last->sentence);
        const IntegerToken* chosen = nullptr;
        for (const IntegerToken& t : tokens) {
            if (t.begin >= last->phrase_begin) { chosen = &t; break; }
        }
        if (!chosen) {
            for (const IntegerToken& t : tokens)
                if (t.begin < last->phrase_begin) chosen = &t;
        }
        if (chosen) out.final_stated = chosen->value;
    }

    out.mismatch = out.final_stated && remainder_value &&
                   *out.final_stated != *remainder_value;
    return out;
}

CotAnalysis analyze_cot(std::string_view think_text,
                        std::optional<int64_t> remainder_value,
                        const PatternTable& table) {
    CotAnalysis analysis;
    analysis.labels = table.classify(think_text);
    analysis.reasoning_language = detect_reasoning_language(think_text);
    NumberExtraction numbers = extract_numbers(think_text, remainder_value);
    analysis.proposed_numbers = std::move(numbers.proposed_numbers);
    analysis.final_stated = numbers.final_stated;
    analysis.mismatch = numbers.mismatch;
    return analysis;
}

StrategyAggregate aggregate_strategies(const std::vector<CotAnalysis>& analyses) {
    if (analyses.empty())
        throw Error(Errc::EmptyAggregate, "no analyses to aggregate");
    StrategyAggregate agg;
    agg.total_traces = analyses.size();
    std::map<StrategyLabel, size_t> label_counts;
    std::map<std::string, size_t> language_counts;
    for (const CotAnalysis& a : analyses) {
        for (StrategyLabel label : a.labels) ++label_counts[label];
        const std::string key = a.reasoning_language
                                    ? std::string(language_code(*a.reasoning_language))
                                    : std::string("unknown");
        ++language_counts[key];
    }
    const double n = static_cast<double>(agg.total_traces);
    for (const auto& [label, count] : label_counts)
        agg.label_fraction[label] = static_cast<double>(count) / n;
    for (const auto& [key, count] : language_counts)
        agg.language_fraction[key] = static_cast<double>(count) / n;
    return agg;
}

std::string strategy_csv_row(std::string_view cell_key, int64_t call_index,
                             const CotAnalysis& analysis) {
    std::ostringstream row;
    row << cell_key << ',' << call_index << ',';
    bool first = true;
    for (StrategyLabel label : analysis.labels) {
        if (!first) row << ';';
        row << strategy_label_name(label);
        first = false;
    }
    row << ',';
    row << (analysis.reasoning_language
                ? language_code(*analysis.reasoning_language)
                : std::string_view("unknown"));
    row << ',' << analysis.proposed_numbers.size() << ',';
    if (analysis.final_stated) row << *analysis.final_stated;
    row << ',' << (analysis.mismatch ? '1' : '0');
    return row.str();
}

}  // namespace rngaudit
