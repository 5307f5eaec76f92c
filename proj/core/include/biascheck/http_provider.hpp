#pragma once

#include <string>

#include "biascheck/gateway.hpp"

namespace biascheck::gateway {

// Chat-completions client for any OpenAI-compatible inference server.
// POSTs {base_url}/v1/chat/completions with messages/max_tokens/temperature/
// seed and reads choices[0].message.content. An "error" payload raises
// ProviderError; connection problems raise TransportError (retried by the
// Gateway).
class HttpCompletionProvider : public CompletionProvider {
public:
    HttpCompletionProvider(std::string base_url, std::string api_key = {},
                           int timeout_seconds = 120);

    std::string id() const override;
    std::string complete(const PromptRequest& request) override;

private:
    std::string base_url_;
    std::string api_key_;
    int timeout_seconds_;
};

// Embeddings client: POSTs {base_url}/v1/embeddings with {model, input:[...]}
// and reads data[*].embedding.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string base_url, std::string model_id, std::string api_key = {},
                          int timeout_seconds = 120);

    std::string id() const override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::string base_url_;
    std::string model_id_;
    std::string api_key_;
    int timeout_seconds_;
};

}  // namespace biascheck::gateway
