#pragma once

// Shared between the doctest suite and the acceptance binary: published
// think-trace excerpts with hand-assigned strategy labels, plus a synthetic
// corpus with exactly planted label frequencies.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rngaudit/cot_analyzer.hpp"

namespace rngaudit_testing {

struct CotFixture {
    const char* name;
    const char* text;
    std::set<rngaudit::StrategyLabel> labels;
};

inline const std::vector<CotFixture>& cot_fixtures() {
    using L = rngaudit::StrategyLabel;
    static const std::vector<CotFixture> all = {
        {"pi rejection",
         R"(proposes to use random decimal places of π. It always rejects this option because it claims not to remember enough decimal places, and selecting the random positions is itself a problem of randomness.)",
         {L::PiDigits}},
        {"time seed",
         R"(To generate a random number between 1 and 5 mentally, one approach is to use the current second of the time as a seed. For example:
- Current time: 3:14:23 PM
- Seconds: 23
- 23 modulo 5 equals 3 (since 5*4=20, 23-20=3)
Thus, the random number is **3**.)",
         {L::DateTime}},
        {"central fallback",
         R"(Wait, but I have to make sure it's between 1 and 100, inclusive. So numbers like 100 are possible as well. Let me think of a number closer to the middle, say around 50. Maybe 67? That seems okay.)",
         {L::CentralValue}},
        {"letter mapping",
         R"(So it proposes to use a random word and to perform some operation on it, either counting the number of letters (especially in the 1-5 range configuration), or mapping each letter to a number (A=1, B=2, C=3...) in order to sum or multiply the numeric value of the individual letters of a word.)",
         {L::WordMapping}},
        {"name initials",
         R"(Wait, perhaps using initials: if my name is John Doe, and I take J=10 and D=4 in the alphabet, then 10+4=14—but that might not be random enough.)",
         {L::WordMapping, L::PersonalInfo}},
        {"python function",
         R"(it suggests to use a Python function to obtain a random number. It does not realize it has no action execution permissions, but nevertheless writes down the function and in many cases it claims to execute it and to obtain a number.)",
         {L::CodeRandFunction}},
        {"two dice",
         "roll two dice and combine the numbers",
         {L::RealWorldSimulation}},
        {"die roll shortfall",
         R"(For instance, using a die roll—roll two dice and combine the numbers, but that only gets me up to 64 (since 6*6=36 for two dice). That's not enough.)",
         {L::RealWorldSimulation}},
        {"seven coin flips",
         R"(To generate a random number between 1 and 100 using seven coin flips, follow these steps:
1. **Flip the Coin Seven Times:** Each flip should be recorded as either Heads (H) or Tails (T).
2. **Convert Flips to Binary:** Assign each flip a binary value where H = 1 and T = 0. Combine these values into a 7-digit binary number.
3. **Calculate the Decimal Value (N):** Convert the 7-bit binary number to its decimal equivalent, which will range from 0 to 127.
4. **Map N to 1-100:**
   - If \( N \leq 99 \), your result is \( N + 1 \).
   - If \( N \geq 100 \), subtract 28 from \( N \) (i.e., \( N - 28 \)).
This method ensures that each possible outcome maps uniquely to a number between 1 and 100.
**Example:**
- **Flips:** H, T, T, H, T, T, H
- **Binary:** 1 0 0 1 0 0 1 → "1001001"
- **Decimal (N):** \( 2^6 + 2^3 + 2^0 = 64 + 8 + 1 = 73 \)
- Since \( N = 73 \leq 99 \), result is \( 73 + 1 = 74 \).
The final number is **74**.)",
         {L::RealWorldSimulation}},
        {"birthday",
         R"(Perhaps using my birthday? My birthday is on the 15th day of the month, then 15 could be the number. But again, it's not truly random; it's based on a specific date.)",
         {L::PersonalInfo}},
        {"phone digits",
         R"(Maybe using the last two digits of a phone number or some other arbitrary source. For instance, if my area code is 555 and my number ends with 12, then 55 and 12... adding them gives 67. Hmm.)",
         {L::PersonalInfo}},
        {"feeling pick",
         R"(Maybe I should just pick a number based on how I'm feeling right now. If I feel energetic, maybe a higher number like 92. If calm, perhaps a lower one like 17.)",
         {L::Instinct}},
        {"first to mind",
         R"(But wait, perhaps I should just go with the first number that comes to mind without overthinking it. So, let me think... Okay, 45 seems good)",
         {L::Instinct}},
        {"overthinking 53",
         R"(I think I've spent too much time overthinking this. It's supposed to be simple—a single number between 1 and 100 with no additional text. So, after all this mental exercise, I'll just go with the first number that comes to mind: 53)",
         {L::Instinct}},
        {"task only",
         "Okay, so I need to figure out how to generate a random number between 1 and 100",
         {L::Other}},
        {"format echo",
         R"(Okay, so I need to figure out how to respond when the user asks for a random number between 1 and 100 without any extra text. They've already provided an example where they responded with just ""57."" Now, I'm supposed to come up with my own response following that format.)",
         {L::Other}},
    };
    return all;
}

/// 1000 English filler traces with date-time and instinct markers planted in
/// exactly n_datetime / n_instinct of them (independent random index sets).
inline std::vector<rngaudit::CotAnalysis> planted_corpus_analyses(
    size_t traces, size_t n_datetime, size_t n_instinct, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<size_t> idx(traces);
    std::iota(idx.begin(), idx.end(), 0);
    const auto pick = [&](size_t count) {
        std::shuffle(idx.begin(), idx.end(), rng);
        return std::set<size_t>(idx.begin(), idx.begin() + static_cast<long>(count));
    };
    const std::set<size_t> with_datetime = pick(n_datetime);
    const std::set<size_t> with_instinct = pick(n_instinct);

    std::vector<rngaudit::CotAnalysis> analyses;
    analyses.reserve(traces);
    for (size_t i = 0; i < traces; ++i) {
        std::string trace =
            "Okay, so I need to think about what the user wants here.";
        if (with_datetime.count(i))
            trace += " Maybe I can use the current time as a seed.";
        if (with_instinct.count(i))
            trace += " Or I could just go with the number that comes to mind.";
        analyses.push_back(rngaudit::analyze_cot(trace, std::nullopt));
    }
    return analyses;
}

}  // namespace rngaudit_testing
