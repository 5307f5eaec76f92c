#include "biascheck/http_provider.hpp"

#include <httplib.h>

#include <json.hpp>

#include "biascheck/errors.hpp"

namespace biascheck::gateway {

namespace {

httplib::Client make_client(const std::string& base_url, const std::string& api_key,
                            int timeout_seconds) {
    httplib::Client client(base_url);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    if (!api_key.empty()) {
        client.set_default_headers({{"Authorization", "Bearer " + api_key}});
    }
    return client;
}

nlohmann::json parse_body(const std::string& endpoint, const std::string& body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError(endpoint + ": unparseable response body: " + e.what());
    }
}

void raise_on_error_payload(const std::string& endpoint, const nlohmann::json& body) {
    if (body.contains("error")) {
        throw ProviderError(endpoint + ": provider error: " + body.at("error").dump());
    }
}

}  // namespace

HttpCompletionProvider::HttpCompletionProvider(std::string base_url, std::string api_key,
                                               int timeout_seconds)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)),
      timeout_seconds_(timeout_seconds) {}

std::string HttpCompletionProvider::id() const { return "http:" + base_url_; }

std::string HttpCompletionProvider::complete(const PromptRequest& request) {
    const std::string endpoint = base_url_ + "/v1/chat/completions";

    nlohmann::json messages = nlohmann::json::array();
    if (request.system_text) {
        messages.push_back({{"role", "system"}, {"content", *request.system_text}});
    }
    messages.push_back({{"role", "user"}, {"content", request.user_text}});

    nlohmann::json payload{
        {"model", request.model_id},
        {"messages", messages},
        {"max_tokens", request.max_tokens},
        {"temperature", request.temperature},
    };
    if (request.seed) {
        payload["seed"] = *request.seed;
    }

    auto client = make_client(base_url_, api_key_, timeout_seconds_);
    auto result = client.Post("/v1/chat/completions", payload.dump(), "application/json");
    if (!result) {
        throw TransportError(endpoint, httplib::to_string(result.error()));
    }
    if (result->status >= 500) {
        throw TransportError(endpoint, "HTTP " + std::to_string(result->status));
    }

    const nlohmann::json body = parse_body(endpoint, result->body);
    raise_on_error_payload(endpoint, body);
    if (result->status != 200) {
        throw ProviderError(endpoint + ": HTTP " + std::to_string(result->status));
    }
    try {
        return body.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw ProviderError(endpoint + ": response lacks choices[0].message.content");
    }
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, std::string model_id,
                                             std::string api_key, int timeout_seconds)
    : base_url_(std::move(base_url)), model_id_(std::move(model_id)),
      api_key_(std::move(api_key)), timeout_seconds_(timeout_seconds) {}

std::string HttpEmbeddingProvider::id() const { return "http:" + base_url_ + ":" + model_id_; }

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts) {
    const std::string endpoint = base_url_ + "/v1/embeddings";

    nlohmann::json payload{{"model", model_id_}, {"input", texts}};
    auto client = make_client(base_url_, api_key_, timeout_seconds_);
    auto result = client.Post("/v1/embeddings", payload.dump(), "application/json");
    if (!result) {
        throw TransportError(endpoint, httplib::to_string(result.error()));
    }
    if (result->status >= 500) {
        throw TransportError(endpoint, "HTTP " + std::to_string(result->status));
    }

    const nlohmann::json body = parse_body(endpoint, result->body);
    raise_on_error_payload(endpoint, body);
    if (result->status != 200) {
        throw ProviderError(endpoint + ": HTTP " + std::to_string(result->status));
    }

    std::vector<EmbeddingVector> out;
    try {
        for (const auto& item : body.at("data")) {
            EmbeddingVector vec;
            vec.values = item.at("embedding").get<std::vector<double>>();
            out.push_back(std::move(vec));
        }
    } catch (const nlohmann::json::exception&) {
        throw ProviderError(endpoint + ": response lacks data[*].embedding");
    }
    return out;
}

}  // namespace biascheck::gateway
