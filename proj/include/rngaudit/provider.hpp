#pragma once

#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "rngaudit/language.hpp"

namespace rngaudit {

enum class ProviderKind { OpenAiCompatible, OllamaCompatible, Mock };

std::string_view provider_kind_name(ProviderKind kind);

struct ProviderConfig {
    std::string name;
    ProviderKind kind = ProviderKind::Mock;
    std::string base_url;          // network kinds only
    std::string model_id;
    std::string api_key_ref;       // env var suffix: RNGAUDIT_KEY_<ref>
    double timeout_seconds = 30.0;
    int max_retries = 3;
    int max_in_flight = 4;
    int backoff_base_ms = 250;
    std::string mock_script_path;  // mock kind only
};

/// Validates the kind-specific requirements (usage error on violation).
void validate_provider_config(const ProviderConfig& config);

ProviderConfig provider_config_from_json(const nlohmann::json& record);

struct CompletionRequest {
    std::string model_id;
    std::string prompt;
    double temperature = 1.0;
    int max_tokens = 512;
};

struct CompletionResponse {
    std::string text;     // endpoint text verbatim, never trimmed
    double latency_ms = 0.0;
    int attempts = 1;     // ≤ max_retries + 1
};

/// Per-call context the deterministic mock keys its draws on; network
/// providers ignore it.
struct CallContext {
    Language language = Language::EN;
    int range_upper = 100;
    double temperature = 1.0;
    int64_t call_index = 0;
    uint64_t run_seed = 0;
};

/// Thrown by one attempt to signal a retryable condition (timeout, 429, 5xx);
/// the base class converts exhaustion into a transient-exhausted error.
struct TransientFailure {
    std::string reason;
};

/// Base gateway: bounds in-flight calls per provider and retries transient
/// failures with monotone exponential backoff. Subclasses perform exactly one
/// attempt in do_complete and never retry internally.
class Provider {
public:
    explicit Provider(ProviderConfig config);
    virtual ~Provider();

    const ProviderConfig& config() const { return config_; }

    CompletionResponse complete(const CompletionRequest& request, const CallContext& context);

protected:
    virtual CompletionResponse do_complete(const CompletionRequest& request,
                                           const CallContext& context, int attempt) = 0;

private:
    ProviderConfig config_;
    std::mutex mutex_;
    std::condition_variable slot_free_;
    int in_flight_ = 0;
};

/// Delay before retry `attempt` (0-based): base · 2^attempt, capped.
uint64_t backoff_delay_ms(int attempt, int base_ms = 250, uint64_t cap_ms = 8000);

std::unique_ptr<Provider> make_provider(const ProviderConfig& config);

}  // namespace rngaudit
