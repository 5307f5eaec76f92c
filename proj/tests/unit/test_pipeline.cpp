#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <random>

#include "biascheck/corpus.hpp"
#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"
#include "biascheck/mock_provider.hpp"
#include "biascheck/pipeline.hpp"
#include "support/test_support.hpp"

using namespace biascheck;
using corpus::VerdictLabel;
using pipeline::DirectParseError;
using pipeline::DirectParseErrorKind;
using testing_support::data_dir;

namespace {

gateway::Gateway mock_gateway(gateway::MockConfig config = {}) {
    return gateway::Gateway(std::make_shared<gateway::MockProvider>(std::move(config)),
                            std::make_shared<gateway::LexicalEmbedder>());
}

corpus::ClaimSet e2e_claims() {
    return corpus::load_claim_set(data_dir() / "e2e" / "claims_10.jsonl");
}

corpus::ClaimSet fewshot_claims() {
    return corpus::load_claim_set(data_dir() / "e2e" / "train_reference.jsonl");
}

pipeline::StoreLoader e2e_loader() {
    return [](const std::string& claim_id) {
        return corpus::load_knowledge_store(data_dir() / "e2e" / "store", claim_id);
    };
}

pipeline::PipelineOptions small_options() {
    pipeline::PipelineOptions options;
    options.docs_per_condition = 3;
    options.retrieve_k = 50;
    options.evidence_n = 4;
    options.fewshot_count = 5;
    options.workers = 2;
    return options;
}

}  // namespace

TEST_CASE("parse_direct_response on the reconstructed sample output") {
    const auto text = testing_support::read_file(data_dir() / "appendix_a_response.txt");
    REQUIRE_FALSE(text.empty());
    const auto parsed = pipeline::parse_direct_response(text);
    REQUIRE(parsed.qa.size() == 3);
    CHECK(parsed.qa[0].question ==
          "Did Sean Connery have a close relationship with Apple or its products?");
    CHECK(parsed.qa[2].answer.rfind("After conducting a thorough search", 0) == 0);
    CHECK(parsed.justification.rfind("Based on the Q&A", 0) == 0);
    CHECK(parsed.label == VerdictLabel::NotEnoughEvidence);
}

TEST_CASE("parse_direct_response distinct error kinds") {
    auto kind_of = [](const std::string& text) {
        try {
            pipeline::parse_direct_response(text);
        } catch (const DirectParseError& e) {
            return e.kind();
        }
        FAIL("expected a parse error");
        return DirectParseErrorKind::UnknownVerdict;
    };

    CHECK(kind_of("no markers at all") == DirectParseErrorKind::MissingQaSection);
    CHECK(kind_of("=== Questions and Answers ===\nQ1: a?\nA1: b\n") ==
          DirectParseErrorKind::MissingVerdictSection);
    CHECK(kind_of("=== Questions and Answers ===\nQ1: a?\nA1: b\n=== Verdict ===\n"
                  "justification: x\nverdict: Refuted") == DirectParseErrorKind::TooFewQa);
    CHECK(kind_of("=== Questions and Answers ===\nQ1: a?\nA1: b\nQ2: c?\nA2: d\nQ3: e?\n"
                  "A3: f\n=== Verdict ===\njustification: x\n") ==
          DirectParseErrorKind::MissingVerdictLine);
    CHECK(kind_of("=== Questions and Answers ===\nQ1: a?\nA1: b\nQ2: c?\nA2: d\nQ3: e?\n"
                  "A3: f\n=== Verdict ===\njustification: x\nverdict: Mostly True") ==
          DirectParseErrorKind::UnknownVerdict);
}

TEST_CASE("verdict line normalization") {
    const std::string base =
        "=== Questions and Answers ===\nQ1: a?\nA1: b\nQ2: c?\nA2: d\nQ3: e?\nA3: f\n"
        "=== Verdict ===\njustification: because\nverdict: ";
    CHECK(pipeline::parse_direct_response(base + "refuted").label == VerdictLabel::Refuted);
    CHECK(pipeline::parse_direct_response(base + "'Supported'").label ==
          VerdictLabel::Supported);
    CHECK(pipeline::parse_direct_response(base + "Not Enough Evidence.").label ==
          VerdictLabel::NotEnoughEvidence);
    CHECK(pipeline::parse_direct_response(base + "conflicting evidence/cherry-picking").label ==
          VerdictLabel::ConflictingEvidenceCherrypicking);
}

TEST_CASE("round trip over synthesized well-formed responses") {
    std::mt19937_64 rng(17);
    const std::vector<std::string> words = {"bridge", "letter", "record",  "official",
                                            "source", "archive", "figure", "report"};
    auto sentence = [&](std::size_t len) {
        std::string out;
        for (std::size_t i = 0; i < len; ++i) {
            if (i) out += ' ';
            out += words[rng() % words.size()];
        }
        return out;
    };

    for (int trial = 0; trial < 300; ++trial) {
        std::vector<pipeline::EvidenceQA> qa;
        std::string text = "=== Questions and Answers ===\n";
        for (int q = 1; q <= 3; ++q) {
            pipeline::EvidenceQA entry;
            entry.question = sentence(3 + rng() % 5) + "?";
            entry.answer = sentence(4 + rng() % 8) + ".";
            text += "Q" + std::to_string(q) + ": " + entry.question + "\n";
            text += "A" + std::to_string(q) + ": " + entry.answer + "\n";
            qa.push_back(entry);
        }
        const std::string justification = sentence(6 + rng() % 10) + ".";
        const auto label =
            corpus::kAllLabels[static_cast<std::size_t>(rng() % corpus::kAllLabels.size())];
        text += "\n=== Verdict ===\n";
        text += "justification: " + justification + "\n";
        text += "verdict: " + corpus::to_string(label) + "\n";

        const auto parsed = pipeline::parse_direct_response(text);
        REQUIRE(parsed.qa.size() == 3);
        for (int q = 0; q < 3; ++q) {
            CHECK(parsed.qa[static_cast<std::size_t>(q)].question ==
                  qa[static_cast<std::size_t>(q)].question);
            CHECK(parsed.qa[static_cast<std::size_t>(q)].answer ==
                  qa[static_cast<std::size_t>(q)].answer);
        }
        CHECK(parsed.justification == justification);
        CHECK(parsed.label == label);
    }
}

TEST_CASE("run_direct over the fixture claims with the mock provider") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto records = pipeline::run_direct(claims, gw, small_options());
    REQUIRE(records.size() == claims.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].claim_id == claims.claims[i].id);
        CHECK_FALSE(records[i].condition.has_value());
        CHECK(records[i].qa.size() == 3);
        CHECK(records[i].annotations.empty());
        // Default mock mirrors the cautious direct behavior.
        CHECK(records[i].label == VerdictLabel::NotEnoughEvidence);
    }
}

TEST_CASE("run_direct with an empty claim set") {
    auto gw = mock_gateway();
    corpus::ClaimSet empty;
    CHECK(pipeline::run_direct(empty, gw, small_options()).empty());
}

TEST_CASE("configured direct labels come through per claim") {
    gateway::MockConfig config;
    config.direct_rules.push_back({"Sean Connery", "Not Enough Evidence"});
    config.direct_rules.push_back({"", "Refuted"});
    auto gw = mock_gateway(config);
    const auto claims = e2e_claims();
    const auto records = pipeline::run_direct(claims, gw, small_options());
    CHECK(records[0].label == VerdictLabel::NotEnoughEvidence);  // Connery claim
    CHECK(records[1].label == VerdictLabel::Refuted);
}

namespace {

class GarbageProvider : public gateway::CompletionProvider {
public:
    std::string id() const override { return "garbage"; }
    std::string complete(const gateway::PromptRequest&) override {
        ++calls;
        return "complete nonsense with no structure";
    }
    std::atomic<int> calls{0};
};

}  // namespace

TEST_CASE("unparseable direct responses retried once then recorded as fallback") {
    auto provider = std::make_shared<GarbageProvider>();
    gateway::Gateway gw(provider, std::make_shared<gateway::LexicalEmbedder>());
    corpus::ClaimSet one;
    one.claims.push_back({"c0", "Some claim.", {}, {}, {}});
    auto options = small_options();
    options.workers = 1;
    const auto records = pipeline::run_direct(one, gw, options);
    REQUIRE(records.size() == 1);
    CHECK(records[0].label == VerdictLabel::NotEnoughEvidence);
    REQUIRE_FALSE(records[0].annotations.empty());
    CHECK(records[0].annotations[0].find("unparseable") != std::string::npos);
    CHECK(provider->calls.load() == 2);  // first try + one retry
}

TEST_CASE("generate_questions: answers are the evidence sentences verbatim") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto& gaetz = claims.claims[1];
    REQUIRE(gaetz.id == "dev-0002");

    retrieval::RankedEvidence evidence;
    const std::string vitas_sentence =
        "In 2013, the United States Department of Justice filed a lawsuit against VITAS for "
        "allegedly committing Medicare fraud since 2002, when Gaetz still worked at the "
        "company, though Gaetz denied any role in any wrongdoing that occurred.";
    evidence.entries.push_back({"0:0", vitas_sentence,
                                "https://www.politifact.example.com/gaetz-hospice", 0.9});

    const auto qa = pipeline::generate_questions(gaetz, evidence, fewshot_claims(), gw,
                                                 small_options());
    REQUIRE(qa.size() == 1);
    CHECK(qa[0].answer == vitas_sentence);
    CHECK(qa[0].source_url == "https://www.politifact.example.com/gaetz-hospice");
    CHECK_FALSE(qa[0].question.empty());
}

TEST_CASE("generate_questions boundaries") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    CHECK(pipeline::generate_questions(claims.claims[0], {}, fewshot_claims(), gw,
                                       small_options())
              .empty());

    // Determinism: same inputs and seed give identical output.
    retrieval::RankedEvidence evidence;
    evidence.entries.push_back({"0:0", "Some evidence sentence.", "https://x.example.com", 0.5});
    const auto first = pipeline::generate_questions(claims.claims[0], evidence,
                                                    fewshot_claims(), gw, small_options());
    const auto second = pipeline::generate_questions(claims.claims[0], evidence,
                                                     fewshot_claims(), gw, small_options());
    REQUIRE(first.size() == second.size());
    CHECK(first[0].question == second[0].question);
}

TEST_CASE("few-shot overlap with the evaluated claim is rejected") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    retrieval::RankedEvidence evidence;
    evidence.entries.push_back({"0:0", "sentence", "", 0.1});
    CHECK_THROWS_AS(pipeline::generate_questions(claims.claims[0], evidence, claims, gw,
                                                 small_options()),
                    ConfigError);
}

TEST_CASE("predict_veracity parses the mock verdict") {
    gateway::MockConfig config;
    config.veracity_rules.push_back({"", "Refuted"});
    auto gw = mock_gateway(config);
    const auto claims = e2e_claims();
    const auto record = pipeline::predict_veracity(claims.claims[0], {},
                                                   hyde::BiasCondition::Baseline, gw,
                                                   small_options());
    CHECK(record.claim_id == claims.claims[0].id);
    CHECK(record.condition == hyde::BiasCondition::Baseline);
    CHECK(record.label == VerdictLabel::Refuted);
    CHECK_FALSE(record.justification.empty());
}

TEST_CASE("condition-dependent verdicts for the same claim via canned responses") {
    // The hospice-fraud claim flips between conditions depending on which
    // evidence framing the QA set carries.
    gateway::MockConfig config;
    config.canned.push_back(
        {"veracity", "was involved in fraud but",
         "justification: The Q&As show that the company was involved in fraud but Matt Gaetz "
         "was not.\nverdict: Refuted"});
    config.canned.push_back(
        {"veracity", "company was part of a larger network",
         "justification: The company was accused of fraud but the claim says they stole from "
         "dying people which is not the same as fraud.\nverdict: Conflicting "
         "Evidence/Cherrypicking"});
    auto gw = mock_gateway(config);
    const auto claims = e2e_claims();
    const auto& gaetz = claims.claims[1];

    std::vector<pipeline::EvidenceQA> negative_qa{
        {"Was Gaetz involved?", "The Q&A evidence was involved in fraud but not Gaetz.",
         std::nullopt}};
    const auto negative = pipeline::predict_veracity(gaetz, negative_qa,
                                                     hyde::BiasCondition::Negative, gw,
                                                     small_options());
    CHECK(negative.label == VerdictLabel::Refuted);

    std::vector<pipeline::EvidenceQA> positive_qa{
        {"Was the company implicated?",
         "Reports said the company was part of a larger network of clinics.", std::nullopt}};
    const auto positive = pipeline::predict_veracity(gaetz, positive_qa,
                                                     hyde::BiasCondition::Positive, gw,
                                                     small_options());
    CHECK(positive.label == VerdictLabel::ConflictingEvidenceCherrypicking);
}

TEST_CASE("run_condition end to end with the mock gateway") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    const auto run = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                             small_options(), gw, e2e_loader());
    REQUIRE(run.claims.size() == claims.size());
    for (std::size_t i = 0; i < run.claims.size(); ++i) {
        const auto& art = run.claims[i];
        CHECK(art.claim_id == claims.claims[i].id);
        CHECK_FALSE(art.failed);
        CHECK(art.docs.size() == 3);
        CHECK_FALSE(art.ranked.entries.empty());
        CHECK_FALSE(art.evidence.entries.empty());
        CHECK(art.evidence.entries.size() <= 4);
        CHECK(art.verdict.claim_id == art.claim_id);
        CHECK(art.verdict.condition == hyde::BiasCondition::Baseline);
        CHECK(art.verdict.qa.size() == art.evidence.entries.size());
        // Ranked lists respect the invariants: distinct ids, non-increasing scores.
        for (std::size_t e = 1; e < art.ranked.entries.size(); ++e) {
            CHECK(art.ranked.entries[e - 1].score >= art.ranked.entries[e].score);
        }
    }
}

TEST_CASE("run_condition is deterministic across invocations") {
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    auto run_once = [&] {
        auto gw = mock_gateway();
        return pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Positive,
                                       small_options(), gw, e2e_loader());
    };
    const auto a = run_once();
    const auto b = run_once();
    REQUIRE(a.claims.size() == b.claims.size());
    for (std::size_t i = 0; i < a.claims.size(); ++i) {
        CHECK(a.claims[i].verdict.label == b.claims[i].verdict.label);
        CHECK(a.claims[i].verdict.justification == b.claims[i].verdict.justification);
        REQUIRE(a.claims[i].docs.size() == b.claims[i].docs.size());
        for (std::size_t d = 0; d < a.claims[i].docs.size(); ++d) {
            CHECK(a.claims[i].docs[d].text == b.claims[i].docs[d].text);
        }
        REQUIRE(a.claims[i].ranked.entries.size() == b.claims[i].ranked.entries.size());
        for (std::size_t e = 0; e < a.claims[i].ranked.entries.size(); ++e) {
            CHECK(a.claims[i].ranked.entries[e].item_id == b.claims[i].ranked.entries[e].item_id);
            CHECK(a.claims[i].ranked.entries[e].score == b.claims[i].ranked.entries[e].score);
        }
    }
}

TEST_CASE("worker count never changes the outputs") {
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    auto run_with_workers = [&](int workers) {
        auto gw = mock_gateway();
        auto options = small_options();
        options.workers = workers;
        return pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Negative,
                                       options, gw, e2e_loader());
    };
    const auto serial = run_with_workers(1);
    const auto parallel = run_with_workers(4);
    REQUIRE(serial.claims.size() == parallel.claims.size());
    for (std::size_t i = 0; i < serial.claims.size(); ++i) {
        CHECK(serial.claims[i].claim_id == parallel.claims[i].claim_id);
        CHECK(serial.claims[i].verdict.label == parallel.claims[i].verdict.label);
        REQUIRE(serial.claims[i].evidence.entries.size() ==
                parallel.claims[i].evidence.entries.size());
        for (std::size_t e = 0; e < serial.claims[i].evidence.entries.size(); ++e) {
            CHECK(serial.claims[i].evidence.entries[e].item_id ==
                  parallel.claims[i].evidence.entries[e].item_id);
            CHECK(serial.claims[i].evidence.entries[e].score ==
                  parallel.claims[i].evidence.entries[e].score);
        }
    }
}

TEST_CASE("custom refusal patterns flow through run_condition") {
    gateway::MockConfig config;
    config.refusal_rules.push_back({"positive", "5G", 1, "No comment on that topic."});
    auto gw = mock_gateway(config);
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();

    auto options = small_options();
    options.refusal_patterns = {"no comment"};
    const auto run = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Positive,
                                             options, gw, e2e_loader());
    // dev-0003 is the 5G claim; its first sample is the custom refusal text.
    const auto& five_g = run.claims[2];
    REQUIRE(five_g.claim_id == "dev-0003");
    CHECK(five_g.docs[0].text == "No comment on that topic.");
    CHECK(five_g.docs[0].refusal);
    // The stock patterns would not have flagged it.
    CHECK_FALSE(hyde::detect_refusal(five_g.docs[0].text));
}

TEST_CASE("per-doc query mode produces a merged ranking") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    auto options = small_options();
    options.per_doc_queries = true;
    const auto run = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                             options, gw, e2e_loader());
    for (const auto& art : run.claims) {
        CHECK_FALSE(art.failed);
        CHECK_FALSE(art.ranked.entries.empty());
    }
}

TEST_CASE("existing artifacts are reused on resume") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    const auto full = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                              small_options(), gw, e2e_loader());

    std::map<std::string, pipeline::ClaimArtifacts> existing;
    auto marked = full.claims[2];
    marked.verdict.justification = "resumed artifact marker";
    existing.emplace(marked.claim_id, marked);

    const auto resumed = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                                 small_options(), gw, e2e_loader(), existing);
    CHECK(resumed.claims[2].verdict.justification == "resumed artifact marker");
}

namespace {

class FailingStoreLoader {
public:
    explicit FailingStoreLoader(std::size_t fail_first_n) : fail_first_n_(fail_first_n) {}
    std::vector<corpus::KnowledgeDocument> operator()(const std::string& claim_id) const {
        // Claim ids dev-0001..dev-0010: fail the first n of them.
        const auto ordinal = std::stoul(claim_id.substr(4));
        if (ordinal <= fail_first_n_) {
            throw DataError("knowledge store file missing for claim '" + claim_id + "'");
        }
        return corpus::load_knowledge_store(data_dir() / "e2e" / "store", claim_id);
    }

private:
    std::size_t fail_first_n_;
};

}  // namespace

TEST_CASE("per-claim failures inside the budget are recorded, not fatal") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    // 1 of 10 fails: within the default 10% budget.
    const auto run = pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                             small_options(), gw,
                                             FailingStoreLoader(1));
    REQUIRE(run.claims.size() == 10);
    CHECK(run.claims[0].failed);
    CHECK(run.claims[0].verdict.label == VerdictLabel::NotEnoughEvidence);
    REQUIRE_FALSE(run.claims[0].verdict.annotations.empty());
    CHECK_FALSE(run.claims[1].failed);
}

TEST_CASE("breaching the failure budget raises") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    CHECK_THROWS_AS(pipeline::run_condition(claims, fewshot, hyde::BiasCondition::Baseline,
                                            small_options(), gw, FailingStoreLoader(3)),
                    FailureBudgetError);
}

TEST_CASE("every record carries one of the four labels, none dropped") {
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto records = pipeline::run_direct(claims, gw, small_options());
    CHECK(records.size() == claims.size());
    for (const auto& r : records) {
        const auto rendered = corpus::to_string(r.label);
        CHECK(corpus::parse_label(rendered) == r.label);
    }
}

TEST_CASE("mock pipeline touches no remote endpoints") {
    // Pure mock + lexical: every provider call is local; the gateway counts
    // provider calls but none hit the network. Four conditions complete.
    auto gw = mock_gateway();
    const auto claims = e2e_claims();
    const auto fewshot = fewshot_claims();
    for (auto condition : hyde::kAllConditions) {
        const auto run = pipeline::run_condition(claims, fewshot, condition, small_options(),
                                                 gw, e2e_loader());
        CHECK(run.claims.size() == claims.size());
    }
}
