#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biascheck/hyde.hpp"
#include "biascheck/pipeline.hpp"

namespace biascheck::config {

// Full run configuration. Everything except the data paths has a default;
// the effective snapshot is stored in each run manifest. Precedence when
// resolving: CLI flag > config file > environment > default.
struct AuditConfig {
    // data
    std::string claims_path;
    std::string store_root;
    std::string fewshot_path;
    std::string gold_path;

    // split
    std::size_t split_n = 1000;

    // experiment shape
    std::vector<hyde::BiasCondition> conditions = {
        hyde::BiasCondition::Baseline,
        hyde::BiasCondition::Positive,
        hyde::BiasCondition::Negative,
        hyde::BiasCondition::Objective,
    };
    int docs_per_condition = 8;     // m
    std::size_t retrieve_k = 5000;  // k
    std::size_t evidence_n = 10;    // n
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    int fewshot_count = 10;
    bool include_refusals = true;
    bool per_doc_queries = false;
    // Empty: the built-in refusal pattern set.
    std::vector<std::string> refusal_patterns;
    std::size_t refusal_window = 200;

    // providers
    std::string provider = "mock";  // "mock" or a base URL
    std::string llm_model = "meta-llama/Llama-3.1-8B-Instruct";
    std::string llm_key;
    std::string embedder = "lexical";  // "lexical" or a base URL
    std::string embed_model = "sentence-transformers/all-MiniLM-L6-v2";
    std::string mock_config_path;
    std::optional<std::string> cache_dir;

    // sampling and execution
    std::int64_t seed = 0;
    int max_tokens = 512;
    double temperature = 0.0;
    int workers = 4;
    int max_in_flight = 4;
    double max_failure_fraction = 0.1;
    bool parallel_conditions = false;  // run conditions concurrently

    // output
    std::string out_dir = "runs";
    std::string reports_dir = "reports";
    std::vector<double> thresholds = {0.25};

    static AuditConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    // Applies BIASCHECK_LLM_URL / BIASCHECK_LLM_KEY / BIASCHECK_EMBED_URL to
    // fields still at their defaults.
    void apply_environment();

    // All validation problems at once; empty means valid. mode is "direct",
    // "conditions", or "" for commands that only read data.
    std::vector<std::string> validate(const std::string& mode) const;

    pipeline::PipelineOptions pipeline_options() const;
};

// Parses "baseline,positive,..." (throws ConfigError on unknown names).
std::vector<hyde::BiasCondition> parse_conditions(const std::string& csv);

}  // namespace biascheck::config
