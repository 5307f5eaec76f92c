#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biascheck/metrics.hpp"
#include "biascheck/run_store.hpp"

namespace biascheck::gateway {
class Gateway;
}

namespace biascheck::report {

// The cross-system metric bundle produced by `eval`: distributions, shifts,
// agreement and justification similarity (direct vs baseline), retrieval
// overlap, domain counts, refusal statistics, and AVeriTeC scores.
struct AuditReport {
    std::vector<std::string> run_ids;
    std::vector<std::string> systems;  // render order: direct, then conditions
    std::map<std::string, metrics::LabelDistribution> distributions;
    std::vector<metrics::ShiftReport> shifts;
    std::optional<metrics::AgreementReport> agreement;
    std::optional<metrics::SimilarityReport> similarity;
    std::optional<metrics::OverlapReport> overlap;
    std::map<std::string, std::map<std::string, std::size_t>> domains;
    std::optional<metrics::RefusalReport> refusals;
    std::map<std::string, metrics::AveritecScore> averitec;

    nlohmann::json to_json() const;
    static AuditReport from_json(const nlohmann::json& j);
};

enum class ReportFormat { Json, Markdown, Csv };

// Throws ConfigError on anything other than json/markdown/md/csv.
ReportFormat parse_format(const std::string& name);

// Deterministic serialization; markdown tables put labels in rows and
// systems in columns.
std::string render_report(const AuditReport& report, ReportFormat format);

struct EvalOptions {
    std::string gold_path;            // enables AVeriTeC scoring
    bool exclude_annotated = false;   // drop fallback verdicts from metrics
    std::vector<double> thresholds = {0.25};
};

// Loads every system of every listed run and computes all applicable
// metrics. Each system ("direct", condition names) may appear in exactly one
// run. The embedder gateway drives justification similarity.
AuditReport build_audit_report(const run_store::RunStore& store,
                               const std::vector<std::string>& run_ids,
                               gateway::Gateway& embedder, const EvalOptions& options);

}  // namespace biascheck::report
