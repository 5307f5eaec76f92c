#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "biascheck/assignment.hpp"
#include "biascheck/corpus.hpp"
#include "biascheck/pipeline.hpp"
#include "biascheck/text_similarity.hpp"

namespace biascheck::gateway {
class Gateway;
}

namespace biascheck::metrics {

struct LabelDistribution {
    std::map<corpus::VerdictLabel, std::size_t> counts;       // all four labels present
    std::map<corpus::VerdictLabel, double> percentages;       // 100 * count / total
    std::size_t total = 0;
};

// Throws DataError on empty input.
LabelDistribution label_distribution(const std::vector<pipeline::VerdictRecord>& records);

struct ShiftReport {
    std::string reference_id;
    std::string comparison_id;
    std::map<corpus::VerdictLabel, double> shifts;  // pct(comparison) - pct(reference)
};

ShiftReport distribution_shift(const LabelDistribution& a, const LabelDistribution& b,
                               std::string reference_id = "a", std::string comparison_id = "b");

struct AgreementReport {
    double overall = 0.0;
    // Fraction of a's L-labeled claims that b also labels L, and vice versa.
    // A label absent from the normalizing side is omitted.
    std::map<corpus::VerdictLabel, double> per_label_by_a;
    std::map<corpus::VerdictLabel, double> per_label_by_b;
    std::size_t n = 0;
};

// Joined on claim_id; the two record lists must cover the same claims.
AgreementReport agreement(const std::vector<pipeline::VerdictRecord>& a,
                          const std::vector<pipeline::VerdictRecord>& b);

struct SimilarityReport {
    double mean = 0.0;
    double median = 0.0;
    double mean_when_agree = 0.0;
    double mean_when_disagree = 0.0;
    std::size_t compared = 0;
    std::size_t excluded = 0;  // pairs with a missing or token-free justification
    std::size_t agree_count = 0;
    std::size_t disagree_count = 0;
};

// Per-claim cosine similarity of justification embeddings.
SimilarityReport justification_similarity(const std::vector<pipeline::VerdictRecord>& a,
                                          const std::vector<pipeline::VerdictRecord>& b,
                                          gateway::Gateway& embedder);

// |a ∩ b| / |a ∪ b|; 1.0 when both sets are empty.
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Kendall tau-b over the rank orders of the items common to both lists.
// Ranks within a RankedList are distinct, so the tie corrections vanish.
// Fewer than 2 common items: nullopt.
std::optional<double> kendall_tau(const retrieval::RankedList& a, const retrieval::RankedList& b);

// Registered domain of a URL ("bbc.co.uk", "example.org"); "unknown" when the
// host cannot be extracted. A small built-in list covers common two-level
// public suffixes.
std::string registered_domain(std::string_view url);

// Pooled evidence-source domain counts per condition.
std::map<std::string, std::map<std::string, std::size_t>> domain_distribution(
    const std::vector<pipeline::ConditionRun>& runs);

struct ConditionRefusals {
    std::size_t total_claims = 0;
    std::size_t claims_with_refusals = 0;
    std::size_t total_documents = 0;
    std::size_t refusal_documents = 0;
    double claim_fraction = 0.0;
    double document_rate = 0.0;
};

struct RefusalReport {
    std::map<std::string, ConditionRefusals> per_condition;
    // positive document rate / baseline document rate; absent if undefined.
    std::optional<double> positive_to_baseline_ratio;
};

RefusalReport refusal_stats(const std::vector<pipeline::ConditionRun>& runs);

struct OverlapReport {
    std::vector<std::string> conditions;
    // Unordered condition pairs (first < second). Diagonals are identically 1
    // and not stored.
    std::map<std::pair<std::string, std::string>, double> jaccard_evidence;
    std::map<std::pair<std::string, std::string>, double> jaccard_topk;
    // Single Jaccard over the per-condition union of evidence ids (the
    // pooled alternative to per-claim averaging).
    std::map<std::pair<std::string, std::string>, double> jaccard_evidence_pooled;
    std::map<std::pair<std::string, std::string>, double> kendall;
    std::map<std::pair<std::string, std::string>, std::size_t> kendall_skipped;
    // Mean fraction of a condition's evidence items retrieved by no other
    // condition.
    std::map<std::string, double> unique_evidence_fraction;
};

// Pairwise retrieval overlap, averaged per claim. Jaccard uses post-rerank
// evidence ids (jaccard_topk uses the full ranked lists); Kendall uses the
// ranked lists.
OverlapReport overlap_report(const std::vector<pipeline::ConditionRun>& runs);

struct AveritecScore {
    double q_only = 0.0;
    double q_a = 0.0;
    std::map<double, double> accuracy_at;
    std::size_t scored_claims = 0;
    std::size_t excluded_claims = 0;  // gold claims lacking gold_qa or gold_label
};

// Legacy AVeriTeC evidence scores: Hungarian-maximized token similarity
// between predicted and gold questions (and question+answer concatenations),
// normalized by the gold question count; accuracy_at(t) gates label
// correctness on q_a >= t.
AveritecScore averitec_scores(const std::vector<pipeline::VerdictRecord>& pred,
                              const corpus::ClaimSet& gold,
                              const std::vector<double>& thresholds = {0.25});

// Records without error annotations (fallback verdicts can be excluded from
// distribution metrics via the CLI flag).
std::vector<pipeline::VerdictRecord> exclude_annotated(
    const std::vector<pipeline::VerdictRecord>& records);

}  // namespace biascheck::metrics
