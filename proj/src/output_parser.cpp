#include "rngaudit/output_parser.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

#include "rngaudit/utf8.hpp"

namespace rngaudit {

namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";

bool ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool ascii_digit(char c) { return c >= '0' && c <= '9'; }

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

// Word characters that glue a digit run into a larger token.
bool word_char(char c) { return ascii_alpha(c) || ascii_digit(c) || c == '_'; }

// Fullwidth digits become ASCII digits, ideographic space becomes a plain
// space; everything else passes through byte-for-byte.
std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size();) {
        const Utf8Char c = decode_utf8(text, i);
        if (c.cp >= 0xFF10 && c.cp <= 0xFF19)
            out.push_back(static_cast<char>('0' + (c.cp - 0xFF10)));
        else if (c.cp == 0x3000)
            out.push_back(' ');
        else
            out.append(text.substr(i, static_cast<size_t>(c.len)));
        i += static_cast<size_t>(c.len);
    }
    return out;
}

struct Token {
    size_t begin = 0;
    size_t end = 0;
    int64_t value = 0;
};

// Maximal digit runs that qualify as standalone integers. Rejected runs:
// embedded in an alphanumeric word, preceded by '-', adjacent decimal parts,
// and runs that overflow int64.
std::vector<Token> standalone_tokens(const std::string& s) {
    std::vector<Token> tokens;
    const size_t n = s.size();
    for (size_t i = 0; i < n;) {
        if (!ascii_digit(s[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < n && ascii_digit(s[j])) ++j;

        bool standalone = true;
        if (i > 0) {
            const char prev = s[i - 1];
            if (ascii_alpha(prev) || prev == '_' || prev == '-') standalone = false;
            // fractional part of a decimal: digit '.' [run]
            if (prev == '.' && i >= 2 && ascii_digit(s[i - 2])) standalone = false;
        }
        if (j < n) {
            const char next = s[j];
            if (ascii_alpha(next) || next == '_') standalone = false;
            // integer part of a decimal: [run] '.' digit
            if (next == '.' && j + 1 < n && ascii_digit(s[j + 1])) standalone = false;
        }
        if (standalone) {
            int64_t value = 0;
            const auto res = std::from_chars(s.data() + i, s.data() + j, value);
            if (res.ec == std::errc()) tokens.push_back({i, j, value});
        }
        i = j;
    }
    return tokens;
}

// Function words used by the natural-language vote; other languages in the
// corpus are written in non-ASCII scripts and recognized by that alone.
const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = {
        // en
        "a", "an", "and", "as", "at", "be", "but", "by", "for", "from", "here", "i", "if",
        "in", "is", "it", "me", "my", "no", "not", "of", "on", "or", "so", "that", "the",
        "this", "to", "was", "we", "will", "with", "you", "your",
        // es
        "el", "la", "los", "las", "un", "una", "uno", "y", "o", "de", "en", "es", "que",
        "por", "para", "con", "se", "del", "al", "lo", "mi", "tu", "su", "si", "este",
        "esta", "pero", "como",
        // fr
        "le", "les", "une", "et", "ou", "est", "pour", "avec", "pas", "ne", "ce", "cette",
        "je", "il", "elle", "nous", "vous", "mais", "sur", "dans", "du", "au", "aux",
    };
    return words;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool ascii_punct(char c) {
    return static_cast<unsigned char>(c) < 0x80 && !ascii_alpha(c) && !ascii_digit(c) &&
           !ascii_space(c);
}

enum class ChunkKind { Natural, Gibberish, Neutral };

ChunkKind classify_chunk(std::string_view chunk) {
    size_t b = 0, e = chunk.size();
    while (b < e && ascii_punct(chunk[b])) ++b;
    while (e > b && ascii_punct(chunk[e - 1])) --e;
    chunk = chunk.substr(b, e - b);
    if (chunk.empty()) return ChunkKind::Neutral;

    for (char c : chunk)
        if (static_cast<unsigned char>(c) & 0x80) return ChunkKind::Natural;

    bool all_digit = true, all_alpha = true;
    for (char c : chunk) {
        if (!ascii_digit(c)) all_digit = false;
        if (!ascii_alpha(c)) all_alpha = false;
    }
    if (all_digit) return ChunkKind::Gibberish;  // bare number spam
    if (!all_alpha) return ChunkKind::Gibberish; // symbol/alnum mixtures

    const std::string lower = ascii_lower(chunk);
    if (stopwords().count(lower)) return ChunkKind::Natural;
    if (lower.size() < 3) return ChunkKind::Neutral;

    // Pronounceability: needs a vowel and no consonant cluster longer than 2.
    const auto vowel = [](char c) {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'w' ||
               c == 'y';
    };
    bool has_vowel = false;
    int run = 0, max_run = 0;
    for (char c : lower) {
        if (vowel(c)) {
            has_vowel = true;
            run = 0;
        } else {
            max_run = std::max(max_run, ++run);
        }
    }
    return (has_vowel && max_run <= 2) ? ChunkKind::Natural : ChunkKind::Gibberish;
}

// Extra text is "recognized" (not decoherent) when it looks like a note or
// natural-language commentary rather than sampling noise.
bool extra_text_recognized(const std::string& outside) {
    size_t first = 0;
    while (first < outside.size() && ascii_space(outside[first])) ++first;
    if (first >= outside.size()) return true;
    if (outside[first] == '(') return true;
    if (ascii_lower(outside).find("note:") != std::string::npos) return true;

    int natural = 0, gibberish = 0;
    size_t i = 0;
    while (i < outside.size()) {
        while (i < outside.size() && ascii_space(outside[i])) ++i;
        size_t j = i;
        while (j < outside.size() && !ascii_space(outside[j])) ++j;
        if (j > i) {
            switch (classify_chunk(std::string_view(outside).substr(i, j - i))) {
                case ChunkKind::Natural: ++natural; break;
                case ChunkKind::Gibberish: ++gibberish; break;
                case ChunkKind::Neutral: break;
            }
        }
        i = j;
    }
    // No gibberish evidence (pure punctuation, markdown) stays recognized.
    return gibberish == 0 || natural > gibberish;
}

}  // namespace

std::pair<std::optional<std::string>, std::string> extract_think(std::string_view text) {
    const size_t open = text.find(kThinkOpen);
    if (open == std::string_view::npos) return {std::nullopt, std::string(text)};
    const size_t body = open + kThinkOpen.size();
    const size_t close = text.find(kThinkClose, body);
    if (close == std::string_view::npos)
        return {std::string(text.substr(body)), std::string()};
    std::string remainder(text.substr(0, open));
    remainder.append(text.substr(close + kThinkClose.size()));
    return {std::string(text.substr(body, close - body)), std::move(remainder)};
}

std::vector<int64_t> scan_integers(std::string_view text) {
    std::vector<int64_t> values;
    for (const IntegerToken& t : scan_integer_tokens(text)) values.push_back(t.value);
    return values;
}

std::vector<IntegerToken> scan_integer_tokens(std::string_view text) {
    const std::string s = normalize_text(text);
    std::vector<IntegerToken> out;
    for (const Token& t : standalone_tokens(s)) out.push_back({t.value, t.begin, t.end});
    return out;
}

ParsedOutput parse_number(std::string_view text, int upper) {
    ParsedOutput out;
    const std::string s = normalize_text(text);
    const auto tokens = standalone_tokens(s);

    size_t token_begin = 0, token_end = 0;
    if (!tokens.empty()) {
        out.value = tokens.front().value;
        token_begin = tokens.front().begin;
        token_end = tokens.front().end;
        out.in_range = *out.value >= 1 && *out.value <= upper;
    }

    std::string outside;
    outside.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (out.value && i >= token_begin && i < token_end) {
            if (i == token_begin) outside.push_back(' ');
            continue;
        }
        outside.push_back(s[i]);
        if (!ascii_space(s[i])) out.extra_text = true;
    }
    if (out.extra_text) out.decoherent = !extra_text_recognized(outside);

    if (!out.value)
        out.status = CallStatus::Unparsable;
    else if (!out.in_range)
        out.status = CallStatus::OutOfRange;
    else if (out.decoherent)
        out.status = CallStatus::Decoherent;
    else if (out.extra_text)
        out.status = CallStatus::ExtraText;
    else
        out.status = CallStatus::Ok;
    return out;
}

ParsedOutput parse_response(std::string_view text, int upper) {
    auto [think, remainder] = extract_think(text);
    ParsedOutput out = parse_number(remainder, upper);
    out.think_text = std::move(think);
    return out;
}

}  // namespace rngaudit
