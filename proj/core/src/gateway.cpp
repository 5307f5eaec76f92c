#include "biascheck/gateway.hpp"

#include <cmath>
#include <condition_variable>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "biascheck/errors.hpp"
#include "biascheck/hashing.hpp"
#include "biascheck/retrieval.hpp"

namespace biascheck::gateway {

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim()) {
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(u.dim()) +
                                    " vs " + std::to_string(v.dim()) + ")");
    }
    double dot = 0.0;
    double nu = 0.0;
    double nv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (nu == 0.0 || nv == 0.0) {
        throw std::invalid_argument("cosine: zero vector");
    }
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<EmbeddingVector> LexicalEmbedder::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        EmbeddingVector vec;
        vec.values.assign(dim_, 0.0);
        for (const auto& token : retrieval::tokenize(text)) {
            vec.values[hashing::fnv1a64(token) % dim_] += 1.0;
        }
        double norm = 0.0;
        for (double v : vec.values) norm += v * v;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& v : vec.values) v /= norm;
        }
        out.push_back(std::move(vec));
    }
    return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    const auto path = dir_ / (key + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json record;
    try {
        in >> record;
        if (!record.contains("response") || !record.at("response").is_string()) {
            return std::nullopt;  // corrupt entry: miss
        }
        return record.at("response").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

void ResponseCache::store(const std::string& key, const nlohmann::json& request,
                          const std::string& response) {
    std::lock_guard lock(write_mu_);
    const auto path = dir_ / (key + ".json");
    const auto tmp = dir_ / (key + ".tmp");
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << nlohmann::json{{"request", request}, {"response", response}}.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

namespace {

nlohmann::json request_json(const PromptRequest& r) {
    nlohmann::json j{
        {"model_id", r.model_id},
        {"user_text", r.user_text},
        {"max_tokens", r.max_tokens},
        {"temperature", r.temperature},
    };
    if (r.system_text) j["system_text"] = *r.system_text;
    if (r.seed) j["seed"] = *r.seed;
    return j;
}

std::string rstrip(std::string text) {
    while (!text.empty() &&
           (text.back() == ' ' || text.back() == '\t' || text.back() == '\n' || text.back() == '\r')) {
        text.pop_back();
    }
    return text;
}

}  // namespace

std::string completion_cache_key(const PromptRequest& request) {
    return hashing::digest_hex(request_json(request).dump());
}

std::string embedding_cache_key(const std::string& provider_id, const std::string& text) {
    return hashing::digest_hex(nlohmann::json{{"embed", provider_id}, {"text", text}}.dump());
}

// Counting semaphore over the provider endpoints (std::counting_semaphore has
// a compile-time max; a mutex/condvar keeps the limit a plain runtime value).
class Gateway::Slots {
public:
    explicit Slots(int limit) : available_(limit) {}

    void acquire() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard lock(mu_);
            ++available_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int available_;
};

Gateway::Gateway(std::shared_ptr<CompletionProvider> completions,
                 std::shared_ptr<EmbeddingProvider> embeddings,
                 std::optional<std::filesystem::path> cache_dir, RetryPolicy retry,
                 int max_in_flight)
    : completions_(std::move(completions)),
      embeddings_(std::move(embeddings)),
      retry_(retry),
      slots_(std::make_shared<Slots>(max_in_flight > 0 ? max_in_flight : 1)) {
    if (cache_dir) {
        cache_ = std::make_unique<ResponseCache>(*cache_dir);
    }
}

std::string Gateway::call_with_retry(const PromptRequest& request) {
    struct SlotGuard {
        Slots& slots;
        explicit SlotGuard(Slots& s) : slots(s) { slots.acquire(); }
        ~SlotGuard() { slots.release(); }
    };

    auto backoff = retry_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
        try {
            SlotGuard guard(*slots_);
            ++provider_calls_;
            return completions_->complete(request);
        } catch (const TransportError&) {
            if (attempt >= retry_.attempts) throw;
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

Completion Gateway::complete(const PromptRequest& request) {
    if (!completions_) {
        throw ConfigError("no completion provider configured");
    }
    if (request.user_text.empty()) {
        throw std::invalid_argument("complete: empty user_text");
    }
    if (request.temperature < 0.0) {
        throw std::invalid_argument("complete: negative temperature");
    }

    const std::string key = completion_cache_key(request);
    if (cache_) {
        if (auto hit = cache_->lookup(key)) {
            return Completion{*hit, completions_->id(), true};
        }
    }

    const std::string text = rstrip(call_with_retry(request));
    if (cache_) {
        cache_->store(key, request_json(request), text);
    }
    return Completion{text, completions_->id(), false};
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (!embeddings_) {
        throw ConfigError("no embedding provider configured");
    }
    if (texts.empty()) return {};

    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    if (cache_) {
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const auto key = embedding_cache_key(embeddings_->id(), texts[i]);
            if (auto hit = cache_->lookup(key)) {
                try {
                    out[i].values = nlohmann::json::parse(*hit).get<std::vector<double>>();
                    continue;
                } catch (const nlohmann::json::exception&) {
                    // corrupt entry: fall through to recompute
                }
            }
            missing.push_back(i);
        }
    } else {
        missing.resize(texts.size());
        for (std::size_t i = 0; i < texts.size(); ++i) missing[i] = i;
    }

    if (!missing.empty()) {
        std::vector<std::string> batch;
        batch.reserve(missing.size());
        for (auto i : missing) batch.push_back(texts[i]);

        struct SlotGuard {
            Slots& slots;
            explicit SlotGuard(Slots& s) : slots(s) { slots.acquire(); }
            ~SlotGuard() { slots.release(); }
        };
        std::vector<EmbeddingVector> vecs;
        {
            SlotGuard guard(*slots_);
            ++provider_calls_;
            vecs = embeddings_->embed(batch);
        }
        if (vecs.size() != batch.size()) {
            throw ProviderError("embedding provider returned " + std::to_string(vecs.size()) +
                                " vectors for " + std::to_string(batch.size()) + " inputs");
        }
        for (std::size_t k = 0; k < missing.size(); ++k) {
            out[missing[k]] = vecs[k];
            if (cache_) {
                cache_->store(embedding_cache_key(embeddings_->id(), texts[missing[k]]),
                              nlohmann::json{{"text", texts[missing[k]]}},
                              nlohmann::json(vecs[k].values).dump());
            }
        }
    }

    const std::size_t dim = out.empty() ? 0 : out.front().dim();
    for (const auto& vec : out) {
        if (vec.dim() != dim) {
            throw ProviderError("embedding dimension mismatch within one call");
        }
        for (double v : vec.values) {
            if (!std::isfinite(v)) {
                throw ProviderError("embedding contains non-finite value");
            }
        }
    }
    return out;
}

}  // namespace biascheck::gateway
