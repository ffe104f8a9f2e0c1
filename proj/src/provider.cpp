#include "rngaudit/provider.hpp"

#include <chrono>
#include <thread>

#include "rngaudit/errors.hpp"
#include "rngaudit/http_provider.hpp"
#include "rngaudit/mock_provider.hpp"

namespace rngaudit {

std::string_view provider_kind_name(ProviderKind kind) {
    switch (kind) {
        case ProviderKind::OpenAiCompatible: return "openai-compatible";
        case ProviderKind::OllamaCompatible: return "ollama-compatible";
        case ProviderKind::Mock: return "mock";
    }
    return "mock";
}

void validate_provider_config(const ProviderConfig& config) {
    if (config.name.empty()) throw Error(Errc::Usage, "provider needs a name");
    for (char c : config.name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        // Names become file-name components, so anything else is rejected.
        if (!ok)
            throw Error(Errc::Usage,
                        "provider name has unsupported character: " + config.name);
    }
    if (config.kind == ProviderKind::Mock) {
        if (config.mock_script_path.empty())
            throw Error(Errc::Usage, "mock provider '" + config.name + "' needs a mock_script");
    } else if (config.base_url.empty()) {
        throw Error(Errc::Usage, "provider '" + config.name + "' needs a base_url");
    }
    if (config.max_retries < 0)
        throw Error(Errc::Usage, "max_retries must be non-negative");
    if (config.max_in_flight < 1)
        throw Error(Errc::Usage, "max_in_flight must be at least 1");
    if (config.timeout_seconds <= 0)
        throw Error(Errc::Usage, "timeout must be positive");
}

ProviderConfig provider_config_from_json(const nlohmann::json& record) {
    if (!record.is_object()) throw Error(Errc::Usage, "provider record must be an object");
    ProviderConfig config;
    config.name = record.value("name", std::string());
    const std::string kind = record.value("kind", std::string("mock"));
    if (kind == "openai-compatible")
        config.kind = ProviderKind::OpenAiCompatible;
    else if (kind == "ollama-compatible")
        config.kind = ProviderKind::OllamaCompatible;
    else if (kind == "mock")
        config.kind = ProviderKind::Mock;
    else
        throw Error(Errc::Usage, "unknown provider kind: " + kind);
    config.base_url = record.value("base_url", std::string());
    config.model_id = record.value("model_id", std::string());
    config.api_key_ref = record.value("api_key_ref", std::string());
    config.timeout_seconds = record.value("timeout_seconds", 30.0);
    config.max_retries = record.value("max_retries", 3);
    config.max_in_flight = record.value("max_in_flight", 4);
    config.backoff_base_ms = record.value("backoff_base_ms", 250);
    config.mock_script_path = record.value("mock_script", std::string());
    validate_provider_config(config);
    return config;
}

Provider::Provider(ProviderConfig config) : config_(std::move(config)) {}

Provider::~Provider() = default;

uint64_t backoff_delay_ms(int attempt, int base_ms, uint64_t cap_ms) {
    if (attempt >= 63) return cap_ms;
    const uint64_t delay = static_cast<uint64_t>(base_ms) << attempt;
    return std::min(delay, cap_ms);
}

CompletionResponse Provider::complete(const CompletionRequest& request,
                                      const CallContext& context) {
    std::unique_lock<std::mutex> lock(mutex_);
    slot_free_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
    lock.unlock();

    struct SlotRelease {
        Provider* self;
        ~SlotRelease() {
            {
                std::lock_guard<std::mutex> guard(self->mutex_);
                --self->in_flight_;
            }
            self->slot_free_.notify_one();
        }
    } release{this};

    for (int attempt = 0;; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        try {
            CompletionResponse response = do_complete(request, context, attempt);
            response.attempts = attempt + 1;
            response.latency_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          start)
                    .count();
            return response;
        } catch (const TransientFailure& failure) {
            if (attempt >= config_.max_retries)
                throw Error(Errc::TransientExhausted,
                            "provider '" + config_.name + "' failed after " +
                                std::to_string(attempt + 1) + " attempts: " + failure.reason);
            std::this_thread::sleep_for(std::chrono::milliseconds(
                backoff_delay_ms(attempt, config_.backoff_base_ms)));
        }
    }
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config) {
    validate_provider_config(config);
    if (config.kind == ProviderKind::Mock) return std::make_unique<MockProvider>(config);
    return std::make_unique<HttpProvider>(config);
}

}  // namespace rngaudit
