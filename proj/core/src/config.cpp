#include "biascheck/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "biascheck/errors.hpp"

namespace biascheck::config {

std::vector<hyde::BiasCondition> parse_conditions(const std::string& csv) {
    std::vector<hyde::BiasCondition> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        auto condition = hyde::parse_condition(token);
        if (!condition) {
            throw ConfigError("unknown condition '" + token + "'");
        }
        out.push_back(*condition);
    }
    if (out.empty()) {
        throw ConfigError("no conditions given");
    }
    return out;
}

AuditConfig AuditConfig::from_json(const nlohmann::json& j) {
    AuditConfig c;
    c.claims_path = j.value("claims", c.claims_path);
    c.store_root = j.value("store_root", c.store_root);
    c.fewshot_path = j.value("fewshot", c.fewshot_path);
    c.gold_path = j.value("gold", c.gold_path);
    c.split_n = j.value("split_n", c.split_n);
    if (j.contains("conditions")) {
        c.conditions.clear();
        for (const auto& name : j.at("conditions")) {
            auto condition = hyde::parse_condition(name.get<std::string>());
            if (!condition) {
                throw ConfigError("config: unknown condition '" + name.get<std::string>() + "'");
            }
            c.conditions.push_back(*condition);
        }
    }
    c.docs_per_condition = j.value("m", c.docs_per_condition);
    c.retrieve_k = j.value("k", c.retrieve_k);
    c.evidence_n = j.value("n", c.evidence_n);
    c.bm25_k1 = j.value("k1", c.bm25_k1);
    c.bm25_b = j.value("b", c.bm25_b);
    c.fewshot_count = j.value("fewshot_count", c.fewshot_count);
    c.include_refusals = j.value("include_refusals", c.include_refusals);
    c.per_doc_queries = j.value("query_mode", std::string("concat")) == "per-doc";
    if (j.contains("refusal_patterns")) {
        c.refusal_patterns = j.at("refusal_patterns").get<std::vector<std::string>>();
    }
    c.refusal_window = j.value("refusal_window", c.refusal_window);
    c.provider = j.value("provider", c.provider);
    c.llm_model = j.value("llm_model", c.llm_model);
    c.llm_key = j.value("llm_key", c.llm_key);
    c.embedder = j.value("embedder", c.embedder);
    c.embed_model = j.value("embed_model", c.embed_model);
    c.mock_config_path = j.value("mock_config", c.mock_config_path);
    if (j.contains("cache_dir")) c.cache_dir = j.at("cache_dir").get<std::string>();
    c.seed = j.value("seed", c.seed);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.temperature = j.value("temperature", c.temperature);
    c.workers = j.value("workers", c.workers);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.max_failure_fraction = j.value("max_failure_fraction", c.max_failure_fraction);
    c.parallel_conditions = j.value("parallel_conditions", c.parallel_conditions);
    c.out_dir = j.value("out", c.out_dir);
    c.reports_dir = j.value("reports", c.reports_dir);
    if (j.contains("thresholds")) {
        c.thresholds = j.at("thresholds").get<std::vector<double>>();
    }
    return c;
}

nlohmann::json AuditConfig::to_json() const {
    nlohmann::json conditions = nlohmann::json::array();
    for (auto condition : this->conditions) {
        conditions.push_back(hyde::to_string(condition));
    }
    nlohmann::json j{
        {"claims", claims_path},
        {"store_root", store_root},
        {"fewshot", fewshot_path},
        {"gold", gold_path},
        {"split_n", split_n},
        {"conditions", conditions},
        {"m", docs_per_condition},
        {"k", retrieve_k},
        {"n", evidence_n},
        {"k1", bm25_k1},
        {"b", bm25_b},
        {"fewshot_count", fewshot_count},
        {"include_refusals", include_refusals},
        {"query_mode", per_doc_queries ? "per-doc" : "concat"},
        {"refusal_patterns", refusal_patterns},
        {"refusal_window", refusal_window},
        {"provider", provider},
        {"llm_model", llm_model},
        {"embedder", embedder},
        {"embed_model", embed_model},
        {"mock_config", mock_config_path},
        {"seed", seed},
        {"max_tokens", max_tokens},
        {"temperature", temperature},
        {"workers", workers},
        {"max_in_flight", max_in_flight},
        {"max_failure_fraction", max_failure_fraction},
        {"parallel_conditions", parallel_conditions},
        {"out", out_dir},
        {"reports", reports_dir},
        {"thresholds", thresholds},
    };
    if (cache_dir) j["cache_dir"] = *cache_dir;
    return j;
}

void AuditConfig::apply_environment() {
    if (provider == "mock") {
        if (const char* url = std::getenv("BIASCHECK_LLM_URL"); url && *url) {
            provider = url;
        }
    }
    if (llm_key.empty()) {
        if (const char* key = std::getenv("BIASCHECK_LLM_KEY"); key && *key) {
            llm_key = key;
        }
    }
    if (embedder == "lexical") {
        if (const char* url = std::getenv("BIASCHECK_EMBED_URL"); url && *url) {
            embedder = url;
        }
    }
}

std::vector<std::string> AuditConfig::validate(const std::string& mode) const {
    std::vector<std::string> problems;
    if (claims_path.empty()) {
        problems.push_back("claims path is required (--claims)");
    } else if (!std::filesystem::exists(claims_path)) {
        problems.push_back("claims file not found: " + claims_path);
    }
    if (mode == "conditions") {
        if (store_root.empty()) {
            problems.push_back("knowledge store root is required in conditions mode "
                               "(--store-root)");
        } else if (!std::filesystem::is_directory(store_root)) {
            problems.push_back("store root is not a directory: " + store_root);
        }
        if (fewshot_path.empty()) {
            problems.push_back("few-shot reference claims are required in conditions mode "
                               "(--fewshot)");
        } else if (!std::filesystem::exists(fewshot_path)) {
            problems.push_back("few-shot file not found: " + fewshot_path);
        }
        if (conditions.empty()) {
            problems.push_back("at least one condition is required");
        }
    }
    if (docs_per_condition < 1) {
        problems.push_back("m (documents per condition) must be >= 1");
    }
    if (retrieve_k == 0) {
        problems.push_back("k (retrieval cut) must be >= 1");
    }
    if (evidence_n == 0) {
        problems.push_back("n (evidence count) must be >= 1");
    }
    if (!(bm25_k1 > 0.0)) {
        problems.push_back("k1 must be > 0");
    }
    if (bm25_b < 0.0 || bm25_b > 1.0) {
        problems.push_back("b must be in [0, 1]");
    }
    if (temperature < 0.0) {
        problems.push_back("temperature must be >= 0");
    }
    if (workers < 1) {
        problems.push_back("workers must be >= 1");
    }
    if (max_failure_fraction < 0.0 || max_failure_fraction > 1.0) {
        problems.push_back("max_failure_fraction must be in [0, 1]");
    }
    if (!mock_config_path.empty() && !std::filesystem::exists(mock_config_path)) {
        problems.push_back("mock config not found: " + mock_config_path);
    }
    return problems;
}

pipeline::PipelineOptions AuditConfig::pipeline_options() const {
    pipeline::PipelineOptions opts;
    opts.model_id = provider == "mock" ? "mock" : llm_model;
    opts.max_tokens = max_tokens;
    opts.temperature = temperature;
    opts.seed = seed;
    opts.docs_per_condition = docs_per_condition;
    opts.retrieve_k = retrieve_k;
    opts.evidence_n = evidence_n;
    opts.bm25_k1 = bm25_k1;
    opts.bm25_b = bm25_b;
    opts.fewshot_count = fewshot_count;
    opts.workers = workers;
    opts.max_failure_fraction = max_failure_fraction;
    opts.include_refusals = include_refusals;
    opts.per_doc_queries = per_doc_queries;
    opts.refusal_patterns = refusal_patterns;
    opts.refusal_window = refusal_window;
    return opts;
}

}  // namespace biascheck::config
