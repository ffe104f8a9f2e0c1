#pragma once

#include <string>
#include <utility>

#include "rngaudit/provider.hpp"

namespace rngaudit {

/// Splits a base URL into the client origin ("scheme://host[:port]") and an
/// optional path prefix prepended to the dialect endpoint.
std::pair<std::string, std::string> split_base_url(const std::string& base_url);

/// Client over the two supported wire dialects:
///   openai-compatible: POST {base}/v1/chat/completions
///   ollama-compatible: POST {base}/api/chat
/// One attempt per do_complete; 429/5xx/transport errors are transient, other
/// 4xx are provider-rejected, malformed bodies are wire-format errors.
class HttpProvider : public Provider {
public:
    explicit HttpProvider(ProviderConfig config);

    /// Request body for one attempt (exposed for tests).
    nlohmann::json request_body(const CompletionRequest& request) const;
    const std::string& endpoint_path() const { return path_; }

protected:
    CompletionResponse do_complete(const CompletionRequest& request,
                                   const CallContext& context, int attempt) override;

private:
    std::string origin_;
    std::string path_;
    std::string bearer_token_;
};

}  // namespace rngaudit
