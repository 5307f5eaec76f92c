// biascheck: audit harness for bias propagation in a retrieval-augmented
// fact-verification pipeline. Subcommands: ingest, run, eval, compare, report.

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biascheck/config.hpp"
#include "biascheck/corpus.hpp"
#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"
#include "biascheck/http_provider.hpp"
#include "biascheck/metrics.hpp"
#include "biascheck/mock_provider.hpp"
#include "biascheck/pipeline.hpp"
#include "biascheck/prompts.hpp"
#include "biascheck/report.hpp"
#include "biascheck/run_store.hpp"

namespace {

using namespace biascheck;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitFailureBudget = 3;
constexpr int kExitMissingArtifacts = 4;

struct CliFlags {
    std::string config_path;
    std::string claims;
    std::string store_root;
    std::string fewshot;
    std::string gold;
    std::string conditions;
    std::string provider;
    std::string embedder;
    std::string mock_config;
    std::string cache_dir;
    std::string out_dir;
    std::string reports_dir;
    int m = 0;
    std::size_t k = 0;
    std::size_t n = 0;
    double k1 = 0.0;
    double b = -1.0;
    std::int64_t seed = 0;
    int workers = 0;
    std::string query_mode;
    bool exclude_refusals = false;
};

void add_config_flags(CLI::App* cmd, CliFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--claims", flags.claims, "claims JSONL file");
    cmd->add_option("--store-root", flags.store_root, "knowledge store directory");
    cmd->add_option("--fewshot", flags.fewshot, "few-shot reference claims JSONL");
    cmd->add_option("--gold", flags.gold, "gold claims JSONL (for scoring)");
    cmd->add_option("--conditions", flags.conditions,
                    "comma-separated conditions (baseline,positive,negative,objective)");
    cmd->add_option("--provider", flags.provider, "'mock' or an inference server base URL");
    cmd->add_option("--embedder", flags.embedder, "'lexical' or an embedding server base URL");
    cmd->add_option("--mock-config", flags.mock_config, "mock provider config JSON");
    cmd->add_option("--cache-dir", flags.cache_dir, "response cache directory");
    cmd->add_option("--out", flags.out_dir, "runs directory (default runs)");
    cmd->add_option("--reports", flags.reports_dir, "reports directory (default reports)");
    cmd->add_option("--m", flags.m, "hypothetical documents per claim per condition");
    cmd->add_option("--k", flags.k, "BM25 retrieval cut");
    cmd->add_option("--n", flags.n, "evidence count after rerank");
    cmd->add_option("--k1", flags.k1, "BM25 k1");
    cmd->add_option("--b", flags.b, "BM25 b");
    cmd->add_option("--seed", flags.seed, "run seed");
    cmd->add_option("--workers", flags.workers, "claim worker pool size");
    cmd->add_option("--query-mode", flags.query_mode, "concat (default) or per-doc");
    cmd->add_flag("--exclude-refusals", flags.exclude_refusals,
                  "drop refusal documents from retrieval queries");
}

config::AuditConfig resolve_config(const CLI::App* cmd, const CliFlags& flags) {
    config::AuditConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) {
            throw ConfigError("config file not found: " + flags.config_path);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("config file " + flags.config_path + ": " + e.what());
        }
        cfg = config::AuditConfig::from_json(j);
    }
    cfg.apply_environment();

    auto set = [&](const char* name) { return cmd->count(name) > 0; };
    if (set("--claims")) cfg.claims_path = flags.claims;
    if (set("--store-root")) cfg.store_root = flags.store_root;
    if (set("--fewshot")) cfg.fewshot_path = flags.fewshot;
    if (set("--gold")) cfg.gold_path = flags.gold;
    if (set("--conditions")) cfg.conditions = config::parse_conditions(flags.conditions);
    if (set("--provider")) cfg.provider = flags.provider;
    if (set("--embedder")) cfg.embedder = flags.embedder;
    if (set("--mock-config")) cfg.mock_config_path = flags.mock_config;
    if (set("--cache-dir")) cfg.cache_dir = flags.cache_dir;
    if (set("--out")) cfg.out_dir = flags.out_dir;
    if (set("--reports")) cfg.reports_dir = flags.reports_dir;
    if (set("--m")) cfg.docs_per_condition = flags.m;
    if (set("--k")) cfg.retrieve_k = flags.k;
    if (set("--n")) cfg.evidence_n = flags.n;
    if (set("--k1")) cfg.bm25_k1 = flags.k1;
    if (set("--b")) cfg.bm25_b = flags.b;
    if (set("--seed")) cfg.seed = flags.seed;
    if (set("--workers")) cfg.workers = flags.workers;
    if (set("--query-mode")) {
        if (flags.query_mode != "concat" && flags.query_mode != "per-doc") {
            throw ConfigError("--query-mode must be 'concat' or 'per-doc'");
        }
        cfg.per_doc_queries = flags.query_mode == "per-doc";
    }
    if (flags.exclude_refusals) cfg.include_refusals = false;
    return cfg;
}

gateway::MockConfig load_mock_config(const config::AuditConfig& cfg) {
    gateway::MockConfig mock;
    if (!cfg.mock_config_path.empty()) {
        std::ifstream in(cfg.mock_config_path);
        if (!in) {
            throw ConfigError("mock config not found: " + cfg.mock_config_path);
        }
        nlohmann::json j;
        in >> j;
        mock = gateway::MockConfig::from_json(j);
    }
    mock.base_seed = cfg.seed;
    return mock;
}

std::unique_ptr<gateway::Gateway> make_gateway(const config::AuditConfig& cfg) {
    std::shared_ptr<gateway::CompletionProvider> completions;
    if (cfg.provider == "mock") {
        completions = std::make_shared<gateway::MockProvider>(load_mock_config(cfg));
    } else {
        completions =
            std::make_shared<gateway::HttpCompletionProvider>(cfg.provider, cfg.llm_key);
    }
    std::shared_ptr<gateway::EmbeddingProvider> embeddings;
    if (cfg.embedder == "lexical") {
        embeddings = std::make_shared<gateway::LexicalEmbedder>();
    } else {
        embeddings = std::make_shared<gateway::HttpEmbeddingProvider>(cfg.embedder,
                                                                      cfg.embed_model);
    }
    std::optional<std::filesystem::path> cache;
    if (cfg.cache_dir) cache = *cfg.cache_dir;
    return std::make_unique<gateway::Gateway>(completions, embeddings, cache,
                                              gateway::RetryPolicy{}, cfg.max_in_flight);
}

int report_config_errors(const std::vector<std::string>& problems) {
    std::cerr << "configuration errors:\n";
    for (const auto& problem : problems) {
        std::cerr << "  - " << problem << "\n";
    }
    return kExitConfig;
}

nlohmann::json claim_statuses(const std::vector<pipeline::ClaimArtifacts>& claims) {
    nlohmann::json statuses;
    for (const auto& claim : claims) {
        if (claim.failed) {
            statuses[claim.claim_id] = {{"status", "failed"}, {"error", claim.error}};
        } else {
            statuses[claim.claim_id] = {{"status", "ok"}};
        }
    }
    return statuses;
}

struct IngestFlags {
    bool expect_gold = false;
    std::size_t split_n = 0;
    std::string split_head;
    std::string split_tail;
};

int cmd_ingest(const CLI::App* cmd, const CliFlags& flags, const IngestFlags& ingest_flags) {
    auto cfg = resolve_config(cmd, flags);
    if (auto problems = cfg.validate(""); !problems.empty()) {
        return report_config_errors(problems);
    }
    const auto claims = corpus::load_claim_set(cfg.claims_path, ingest_flags.expect_gold);
    std::size_t with_gold = 0;
    std::size_t with_qa = 0;
    for (const auto& claim : claims.claims) {
        if (claim.gold_label) ++with_gold;
        if (!claim.gold_qa.empty()) ++with_qa;
    }
    std::cout << "claims: " << claims.size() << " (" << with_gold << " labeled, " << with_qa
              << " with gold QA)\n";

    if (!ingest_flags.split_head.empty() || !ingest_flags.split_tail.empty()) {
        const std::size_t n =
            ingest_flags.split_n > 0 ? ingest_flags.split_n : cfg.split_n;
        const auto [head, tail] = corpus::split_training(claims, n);
        if (!ingest_flags.split_head.empty()) {
            corpus::save_claim_set(head, ingest_flags.split_head);
        }
        if (!ingest_flags.split_tail.empty()) {
            corpus::save_claim_set(tail, ingest_flags.split_tail);
        }
        std::cout << "split: first " << head.size() << " claims -> "
                  << (ingest_flags.split_head.empty() ? "(skipped)" : ingest_flags.split_head)
                  << ", remaining " << tail.size() << " -> "
                  << (ingest_flags.split_tail.empty() ? "(skipped)" : ingest_flags.split_tail)
                  << "\n";
    }

    if (!cfg.store_root.empty()) {
        std::size_t found = 0;
        std::size_t documents = 0;
        std::size_t sentences = 0;
        std::vector<std::string> missing;
        for (const auto& claim : claims.claims) {
            try {
                const auto docs = corpus::load_knowledge_store(cfg.store_root, claim.id);
                ++found;
                documents += docs.size();
                for (const auto& doc : docs) sentences += doc.sentences.size();
            } catch (const DataError&) {
                missing.push_back(claim.id);
            }
        }
        std::cout << "knowledge stores: " << found << "/" << claims.size() << " present, "
                  << documents << " documents, " << sentences << " sentences\n";
        if (!missing.empty()) {
            std::cerr << "missing stores for " << missing.size() << " claims (first: '"
                      << missing.front() << "')\n";
            return kExitMissingArtifacts;
        }
    }
    return kExitOk;
}

int cmd_run(const CLI::App* cmd, const CliFlags& flags, const std::string& mode,
            std::string run_id, bool resume, bool parallel_conditions) {
    auto cfg = resolve_config(cmd, flags);
    if (parallel_conditions) cfg.parallel_conditions = true;
    if (auto problems = cfg.validate(mode); !problems.empty()) {
        return report_config_errors(problems);
    }

    auto gw = make_gateway(cfg);
    run_store::RunStore store(cfg.out_dir);
    if (run_id.empty()) run_id = run_store::generate_run_id(cfg.seed);
    store.create(run_id, resume);
    run_store::RunLock lock(store.run_dir(run_id));

    nlohmann::json manifest;
    if (resume && std::filesystem::exists(store.run_dir(run_id) / "manifest.json")) {
        manifest = store.read_manifest(run_id);
    }
    manifest["run_id"] = run_id;
    manifest["mode"] = mode;
    manifest["created_at"] =
        manifest.value("created_at", run_store::iso_timestamp());
    manifest["seed"] = cfg.seed;
    manifest["model_ids"] = {{"llm", cfg.provider == "mock" ? "mock" : cfg.llm_model},
                             {"embedder", cfg.embedder == "lexical" ? "lexical"
                                                                    : cfg.embed_model}};
    manifest["prompt_hashes"] = prompts::prompt_hashes();
    manifest["config"] = cfg.to_json();

    const auto claims = corpus::load_claim_set(cfg.claims_path, /*expect_gold=*/false);
    const auto options = cfg.pipeline_options();

    if (mode == "direct") {
        const auto records = pipeline::run_direct(claims, *gw, options);
        store.write_verdicts(run_id, "direct", records);
        nlohmann::json statuses;
        for (const auto& record : records) {
            statuses[record.claim_id] = {
                {"status", record.annotations.empty() ? "ok" : "fallback"}};
        }
        manifest["claims"]["direct"] = statuses;
        manifest["conditions"] = nlohmann::json::array();
    } else {
        const auto fewshot = corpus::load_claim_set(cfg.fewshot_path, /*expect_gold=*/false);
        const pipeline::StoreLoader loader = [&](const std::string& claim_id) {
            return corpus::load_knowledge_store(cfg.store_root, claim_id);
        };
        nlohmann::json condition_names = nlohmann::json::array();
        for (auto condition : cfg.conditions) {
            condition_names.push_back(hyde::to_string(condition));
        }
        manifest["conditions"] = condition_names;

        auto compute_condition = [&](hyde::BiasCondition condition,
                                     const pipeline::PipelineOptions& opts) {
            std::map<std::string, pipeline::ClaimArtifacts> existing;
            if (resume) {
                try {
                    for (auto& art : store.read_condition_artifacts(run_id, condition)) {
                        if (!art.failed && !art.verdict.claim_id.empty()) {
                            existing.emplace(art.claim_id, std::move(art));
                        }
                    }
                } catch (const MissingArtifactsError&) {
                    // nothing persisted yet for this condition
                }
            }
            return pipeline::run_condition(claims, fewshot, condition, opts, *gw, loader,
                                           existing);
        };

        std::vector<pipeline::ConditionRun> runs;
        if (cfg.parallel_conditions && cfg.conditions.size() > 1) {
            // One task per condition; the claim pool is divided between them.
            auto opts = options;
            opts.workers =
                std::max(1, options.workers / static_cast<int>(cfg.conditions.size()));
            std::vector<std::future<pipeline::ConditionRun>> futures;
            futures.reserve(cfg.conditions.size());
            for (auto condition : cfg.conditions) {
                futures.push_back(std::async(std::launch::async, compute_condition,
                                             condition, opts));
            }
            for (auto& future : futures) {
                runs.push_back(future.get());
            }
        } else {
            for (auto condition : cfg.conditions) {
                runs.push_back(compute_condition(condition, options));
            }
        }

        for (auto& run : runs) {
            run.run_id = run_id;
            run.config_snapshot = cfg.to_json();
            store.write_condition_artifacts(run_id, run.condition, run.claims);
            store.write_verdicts(run_id, hyde::to_string(run.condition), [&] {
                std::vector<pipeline::VerdictRecord> records;
                records.reserve(run.claims.size());
                for (const auto& claim : run.claims) records.push_back(claim.verdict);
                return records;
            }());
            manifest["claims"][hyde::to_string(run.condition)] = claim_statuses(run.claims);
            std::cout << "condition " << hyde::to_string(run.condition) << ": "
                      << run.claims.size() << " claims\n";
        }
    }

    manifest["finished_at"] = run_store::iso_timestamp();
    store.write_manifest(run_id, manifest);
    std::cout << "run " << run_id << " complete\n";
    return kExitOk;
}

int cmd_eval(const CLI::App* cmd, const CliFlags& flags, const std::string& runs_csv,
             const std::string& name, bool exclude_annotated) {
    auto cfg = resolve_config(cmd, flags);
    std::vector<std::string> run_ids;
    std::stringstream ss(runs_csv);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) run_ids.push_back(token);
    }
    if (run_ids.empty()) {
        return report_config_errors({"at least one run id is required (--runs)"});
    }

    auto gw = make_gateway(cfg);
    run_store::RunStore store(cfg.out_dir);
    report::EvalOptions options;
    options.gold_path = cfg.gold_path;
    options.exclude_annotated = exclude_annotated;
    options.thresholds = cfg.thresholds;
    const auto audit = report::build_audit_report(store, run_ids, *gw, options);

    std::filesystem::create_directories(cfg.reports_dir);
    const auto base = std::filesystem::path(cfg.reports_dir) / name;
    {
        std::ofstream out(base.string() + ".json", std::ios::trunc);
        out << report::render_report(audit, report::ReportFormat::Json);
    }
    {
        std::ofstream out(base.string() + ".md", std::ios::trunc);
        out << report::render_report(audit, report::ReportFormat::Markdown);
    }
    std::cout << "report written to " << base.string() << ".{json,md}\n";
    return kExitOk;
}

std::pair<std::string, std::string> parse_run_ref(const run_store::RunStore& store,
                                                  const std::string& ref) {
    const auto colon = ref.rfind(':');
    if (colon != std::string::npos) {
        return {ref.substr(0, colon), ref.substr(colon + 1)};
    }
    const auto systems = store.systems(ref);
    if (systems.size() != 1) {
        throw ConfigError("run '" + ref + "' holds " + std::to_string(systems.size()) +
                          " systems; use <run_id>:<system>");
    }
    return {ref, systems.front()};
}

int cmd_compare(const CLI::App* cmd, const CliFlags& flags, const std::string& ref_a,
                const std::string& ref_b, const std::string& out_path) {
    auto cfg = resolve_config(cmd, flags);
    auto gw = make_gateway(cfg);
    run_store::RunStore store(cfg.out_dir);

    const auto [run_a, system_a] = parse_run_ref(store, ref_a);
    const auto [run_b, system_b] = parse_run_ref(store, ref_b);
    const auto records_a = store.read_verdicts(run_a, system_a);
    const auto records_b = store.read_verdicts(run_b, system_b);

    const auto dist_a = metrics::label_distribution(records_a);
    const auto dist_b = metrics::label_distribution(records_b);
    const auto shift = metrics::distribution_shift(dist_a, dist_b, run_a + ":" + system_a,
                                                   run_b + ":" + system_b);
    const auto agree = metrics::agreement(records_a, records_b);
    const auto similarity = metrics::justification_similarity(records_a, records_b, *gw);

    nlohmann::json result;
    result["a"] = {{"run", run_a}, {"system", system_a}, {"total", dist_a.total}};
    result["b"] = {{"run", run_b}, {"system", system_b}, {"total", dist_b.total}};
    nlohmann::json shifts;
    for (auto label : corpus::kAllLabels) {
        shifts[corpus::to_string(label)] = shift.shifts.at(label);
    }
    result["shift"] = shifts;
    result["agreement"] = {{"overall", agree.overall}, {"n", agree.n}};
    result["justification_similarity"] = {{"mean", similarity.mean},
                                          {"median", similarity.median},
                                          {"mean_when_agree", similarity.mean_when_agree},
                                          {"mean_when_disagree", similarity.mean_when_disagree},
                                          {"compared", similarity.compared},
                                          {"excluded", similarity.excluded}};
    const std::string text = result.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << text;
        std::cout << "comparison written to " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_report(const std::string& input, const std::string& format_name,
               const std::string& out_path) {
    std::ifstream in(input);
    if (!in) {
        throw MissingArtifactsError("report not found: " + input);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("corrupt report " + input + ": " + e.what());
    }
    const auto audit = report::AuditReport::from_json(j);
    const auto rendered = report::render_report(audit, report::parse_format(format_name));
    if (out_path.empty()) {
        std::cout << rendered;
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        out << rendered;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bias audit harness for retrieval-augmented fact verification"};
    app.require_subcommand(1);

    CliFlags flags;

    auto* ingest = app.add_subcommand("ingest", "validate claims and knowledge stores");
    IngestFlags ingest_flags;
    add_config_flags(ingest, flags);
    ingest->add_flag("--expect-gold", ingest_flags.expect_gold,
                     "require a gold label on every claim");
    ingest->add_option("--split-n", ingest_flags.split_n,
                       "train split size (default from config, 1000)");
    ingest->add_option("--split-head", ingest_flags.split_head,
                       "write the first split-n claims here (train_train)");
    ingest->add_option("--split-tail", ingest_flags.split_tail,
                       "write the remaining claims here (train_reference)");

    auto* run = app.add_subcommand("run", "execute the direct probe or the condition pipeline");
    std::string mode = "conditions";
    std::string run_id;
    bool resume = false;
    add_config_flags(run, flags);
    run->add_option("--mode", mode, "direct or conditions")
        ->check(CLI::IsMember({"direct", "conditions"}));
    run->add_option("--run-id", run_id, "run id (default: timestamp + hash)");
    run->add_flag("--resume", resume, "continue an existing run id, skipping complete claims");
    bool parallel_conditions = false;
    run->add_flag("--parallel-conditions", parallel_conditions,
                  "run the conditions concurrently instead of sequentially");

    auto* eval = app.add_subcommand("eval", "compute the audit report over finished runs");
    std::string runs_csv;
    std::string report_name = "audit";
    bool exclude_annotated = false;
    add_config_flags(eval, flags);
    eval->add_option("--runs", runs_csv, "comma-separated run ids")->required();
    eval->add_option("--name", report_name, "report base name (default audit)");
    eval->add_flag("--exclude-annotated", exclude_annotated,
                   "drop fallback verdicts from metrics");

    auto* compare = app.add_subcommand("compare", "shift/agreement between two systems");
    std::string ref_a;
    std::string ref_b;
    std::string compare_out;
    add_config_flags(compare, flags);
    compare->add_option("system_a", ref_a, "<run_id>[:<system>]")->required();
    compare->add_option("system_b", ref_b, "<run_id>[:<system>]")->required();
    compare->add_option("--write", compare_out, "write JSON here instead of stdout");

    auto* render = app.add_subcommand("report", "render a stored report as markdown or csv");
    std::string report_input;
    std::string report_format = "markdown";
    std::string report_out;
    render->add_option("--input", report_input, "report JSON produced by eval")->required();
    render->add_option("--format", report_format, "json, markdown, or csv");
    render->add_option("--write", report_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) {
            return cmd_ingest(ingest, flags, ingest_flags);
        }
        if (run->parsed()) {
            return cmd_run(run, flags, mode, run_id, resume, parallel_conditions);
        }
        if (eval->parsed()) {
            return cmd_eval(eval, flags, runs_csv, report_name, exclude_annotated);
        }
        if (compare->parsed()) {
            return cmd_compare(compare, flags, ref_a, ref_b, compare_out);
        }
        if (render->parsed()) {
            return cmd_report(report_input, report_format, report_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FailureBudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailureBudget;
    } catch (const MissingArtifactsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingArtifacts;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
