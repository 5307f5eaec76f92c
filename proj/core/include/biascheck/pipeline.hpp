#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "biascheck/corpus.hpp"
#include "biascheck/errors.hpp"
#include "biascheck/hyde.hpp"
#include "biascheck/retrieval.hpp"

namespace biascheck::gateway {
class Gateway;
}

namespace biascheck::pipeline {

struct EvidenceQA {
    std::string question;
    std::string answer;
    std::optional<std::string> source_url;
};

// One system's verdict for one claim. condition is empty for the direct
// (retrieval-free) system. Annotations record fallbacks (e.g. an unparseable
// provider response), so such records can be excluded from metrics.
struct VerdictRecord {
    std::string claim_id;
    std::optional<hyde::BiasCondition> condition;
    corpus::VerdictLabel label = corpus::VerdictLabel::NotEnoughEvidence;
    std::string justification;
    std::vector<EvidenceQA> qa;
    std::vector<std::string> annotations;
};

// "direct" or the condition name.
std::string system_name(const std::optional<hyde::BiasCondition>& condition);

enum class DirectParseErrorKind {
    MissingQaSection,
    MissingVerdictSection,
    TooFewQa,
    MissingVerdictLine,
    UnknownVerdict,
};

class DirectParseError : public Error {
public:
    DirectParseError(DirectParseErrorKind kind, const std::string& detail);
    DirectParseErrorKind kind() const { return kind_; }

private:
    DirectParseErrorKind kind_;
};

struct DirectResponse {
    std::vector<EvidenceQA> qa;  // exactly 3
    std::string justification;
    corpus::VerdictLabel label = corpus::VerdictLabel::NotEnoughEvidence;
};

// Parses the structured direct-prediction output: the
// "=== Questions and Answers ===" and "=== Verdict ===" sections, Q1/A1..Q3/A3
// pairs and the justification/verdict lines. Throws DirectParseError.
DirectResponse parse_direct_response(std::string_view text);

// Parses a bare "justification: ... / verdict: ..." block (the veracity
// response shape). Throws DirectParseError with the verdict-related kinds.
std::pair<std::string, corpus::VerdictLabel> parse_verdict_block(std::string_view text);

struct PipelineOptions {
    std::string model_id = "mock";
    int max_tokens = 512;
    double temperature = 0.0;
    std::int64_t seed = 0;
    int docs_per_condition = 8;     // m
    std::size_t retrieve_k = 5000;  // BM25 cut
    std::size_t evidence_n = 10;    // post-rerank evidence
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    int fewshot_count = 10;
    int workers = 4;
    double max_failure_fraction = 0.1;
    bool include_refusals = true;      // keep refusal documents in the query
    bool per_doc_queries = false;      // one query per document, max-score merge
    // Empty: the default pattern set.
    std::vector<std::string> refusal_patterns;
    std::size_t refusal_window = 200;
};

// Direct prediction over the whole claim set. Unparseable responses are
// retried once (with a perturbed seed), then recorded as NotEnoughEvidence
// with an annotation. One record per claim, in claim order.
std::vector<VerdictRecord> run_direct(const corpus::ClaimSet& claims, gateway::Gateway& gateway,
                                      const PipelineOptions& options);

// One question per evidence entry; the answer is the evidence sentence
// verbatim. Few-shot exemplars are drawn deterministically (by options.seed)
// from `fewshot`, which must not contain the claim under evaluation.
std::vector<EvidenceQA> generate_questions(const corpus::Claim& claim,
                                           const retrieval::RankedEvidence& evidence,
                                           const corpus::ClaimSet& fewshot,
                                           gateway::Gateway& gateway,
                                           const PipelineOptions& options);

// Verdict from claim + QA evidence. Unparseable responses are retried once,
// then recorded as NotEnoughEvidence with an annotation.
VerdictRecord predict_veracity(const corpus::Claim& claim, const std::vector<EvidenceQA>& qa,
                               std::optional<hyde::BiasCondition> condition,
                               gateway::Gateway& gateway, const PipelineOptions& options);

struct ClaimArtifacts {
    std::string claim_id;
    std::vector<hyde::HypotheticalDocument> docs;
    retrieval::RankedList ranked;
    retrieval::RankedEvidence evidence;
    VerdictRecord verdict;
    bool failed = false;
    std::string error;
};

struct ConditionRun {
    std::string run_id;
    hyde::BiasCondition condition = hyde::BiasCondition::Baseline;
    std::vector<ClaimArtifacts> claims;
    nlohmann::json config_snapshot;
};

using StoreLoader = std::function<std::vector<corpus::KnowledgeDocument>(const std::string&)>;

// Full per-condition pipeline: generate hypothetical documents, retrieve,
// rerank, generate questions, predict veracity. Claims run on a bounded
// worker pool; failures are isolated per claim and recorded, and the run
// throws FailureBudgetError only when more than max_failure_fraction of the
// claims failed. `existing` artifacts (from a resumed run) are reused as-is.
ConditionRun run_condition(const corpus::ClaimSet& claims, const corpus::ClaimSet& fewshot,
                           hyde::BiasCondition condition, const PipelineOptions& options,
                           gateway::Gateway& gateway, const StoreLoader& store_loader,
                           const std::map<std::string, ClaimArtifacts>& existing = {});

}  // namespace biascheck::pipeline
