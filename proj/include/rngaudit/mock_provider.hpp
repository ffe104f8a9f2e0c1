#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rngaudit/provider.hpp"

namespace rngaudit {

/// One scripted cell pattern. Any of language/range/temperature may be the
/// wildcard "*"; the most specific matching pattern wins, with language the
/// strongest dimension, then range, then temperature.
struct MockCell {
    std::string language = "*";     // language code or "*"
    std::string range = "*";        // decimal upper bound or "*"
    std::string temperature = "*";  // canonical temperature string or "*"
    std::vector<std::pair<std::string, double>> weights;
    int fail_attempts = 0;  // first N attempts of every call fail transiently
    int latency_ms = 0;     // simulated per-attempt latency
};

struct MockScript {
    uint64_t seed = 0;
    std::vector<MockCell> cells;
};

MockScript load_mock_script(const std::string& path);
MockScript mock_script_from_json(const nlohmann::json& doc);

/// Most specific cell matching the key, or nullptr.
const MockCell* find_mock_cell(const MockScript& script, std::string_view language_code,
                               int range_upper, std::string_view temperature);

/// Deterministic categorical draw: a pure function of the script seed, the
/// cell key, and call_index. Missing key → script-coverage error.
std::string mock_draw(const MockScript& script, std::string_view language_code,
                      int range_upper, std::string_view temperature, int64_t call_index,
                      uint64_t extra_seed = 0);

class MockProvider : public Provider {
public:
    explicit MockProvider(ProviderConfig config);
    MockProvider(ProviderConfig config, MockScript script);

    const MockScript& script() const { return script_; }

protected:
    CompletionResponse do_complete(const CompletionRequest& request,
                                   const CallContext& context, int attempt) override;

private:
    MockScript script_;
};

}  // namespace rngaudit
