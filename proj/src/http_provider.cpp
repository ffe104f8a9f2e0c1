#include "rngaudit/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>

#include "rngaudit/errors.hpp"

namespace rngaudit {

namespace {

std::string resolve_api_key(const ProviderConfig& config) {
    if (config.api_key_ref.empty()) return {};
    const std::string var = "RNGAUDIT_KEY_" + config.api_key_ref;
    const char* value = std::getenv(var.c_str());
    if (!value || !*value)
        throw Error(Errc::Usage, "provider '" + config.name + "' needs the " + var +
                                     " environment variable");
    return value;
}

}  // namespace

std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    const size_t scheme = base_url.find("://");
    if (scheme == std::string::npos)
        throw Error(Errc::Usage, "base_url needs a scheme: " + base_url);
    const size_t path_start = base_url.find('/', scheme + 3);
    std::string origin = base_url.substr(0, path_start);
    std::string prefix =
        path_start == std::string::npos ? std::string() : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {std::move(origin), std::move(prefix)};
}

HttpProvider::HttpProvider(ProviderConfig config) : Provider(std::move(config)) {
    auto [origin, prefix] = split_base_url(this->config().base_url);
    origin_ = std::move(origin);
    path_ = prefix + (this->config().kind == ProviderKind::OllamaCompatible
                          ? "/api/chat"
                          : "/v1/chat/completions");
    bearer_token_ = resolve_api_key(this->config());
}

nlohmann::json HttpProvider::request_body(const CompletionRequest& request) const {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back({{"role", "user"}, {"content", request.prompt}});
    if (config().kind == ProviderKind::OllamaCompatible)
        return {{"model", request.model_id},
                {"messages", std::move(messages)},
                {"options", {{"temperature", request.temperature}}},
                {"stream", false}};
    return {{"model", request.model_id},
            {"messages", std::move(messages)},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
}

CompletionResponse HttpProvider::do_complete(const CompletionRequest& request,
                                             const CallContext&, int) {
    httplib::Client client(origin_);
    const auto timeout =
        std::chrono::duration<double>(config().timeout_seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!bearer_token_.empty()) headers.emplace("Authorization", "Bearer " + bearer_token_);

    const std::string body = request_body(request).dump();
    const httplib::Result result = client.Post(path_, headers, body, "application/json");

    if (!result)
        throw TransientFailure{"transport error: " + httplib::to_string(result.error())};
    if (result->status == 429 || result->status >= 500)
        throw TransientFailure{"http status " + std::to_string(result->status)};
    if (result->status >= 400)
        throw Error(Errc::ProviderRejected, "provider '" + config().name + "' rejected: http " +
                                                std::to_string(result->status) + " body: " +
                                                result->body);

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::WireFormat,
                    "provider '" + config().name + "' returned a non-JSON body");
    }

    CompletionResponse response;
    try {
        if (config().kind == ProviderKind::OllamaCompatible)
            response.text = doc.at("message").at("content").get<std::string>();
        else
            response.text =
                doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::WireFormat, "provider '" + config().name +
                                          "' response is missing the answer field");
    }
    return response;
}

}  // namespace rngaudit
