#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace biascheck::gateway {

struct PromptRequest {
    std::optional<std::string> system_text;
    std::string user_text;
    int max_tokens = 512;
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
    std::string model_id;
};

struct Completion {
    std::string text;
    std::string provider_id;
    bool cached = false;
};

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
};

// Standard cosine similarity. Throws std::invalid_argument on dimension
// mismatch or an all-zero vector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string id() const = 0;
    // Raw provider call; throws TransportError / ProviderError.
    virtual std::string complete(const PromptRequest& request) = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Offline fallback embedder: hashed term-frequency vectors, L2-normalized.
// A token-free text embeds to the zero vector.
class LexicalEmbedder : public EmbeddingProvider {
public:
    explicit LexicalEmbedder(std::size_t dim = 512) : dim_(dim) {}
    std::string id() const override { return "lexical"; }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

private:
    std::size_t dim_;
};

// Content-addressed file cache: one JSON file per key holding the request
// and the response. Unreadable entries count as misses.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, const nlohmann::json& request, const std::string& response);

private:
    std::filesystem::path dir_;
    mutable std::mutex write_mu_;
};

std::string completion_cache_key(const PromptRequest& request);
std::string embedding_cache_key(const std::string& provider_id, const std::string& text);

struct RetryPolicy {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
};

// Uniform front door for completions and embeddings: caching, bounded
// retries with exponential backoff on transport failures, and a bounded
// number of in-flight provider calls. Safe for concurrent callers.
class Gateway {
public:
    Gateway(std::shared_ptr<CompletionProvider> completions,
            std::shared_ptr<EmbeddingProvider> embeddings,
            std::optional<std::filesystem::path> cache_dir = std::nullopt,
            RetryPolicy retry = {}, int max_in_flight = 4);

    Completion complete(const PromptRequest& request);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    // Number of calls that reached the underlying providers (cache misses).
    std::uint64_t provider_calls() const { return provider_calls_.load(); }

private:
    std::string call_with_retry(const PromptRequest& request);

    std::shared_ptr<CompletionProvider> completions_;
    std::shared_ptr<EmbeddingProvider> embeddings_;
    std::unique_ptr<ResponseCache> cache_;
    RetryPolicy retry_;
    std::atomic<std::uint64_t> provider_calls_{0};

    class Slots;
    std::shared_ptr<Slots> slots_;
};

}  // namespace biascheck::gateway
