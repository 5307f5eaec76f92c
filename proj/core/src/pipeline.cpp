#include "biascheck/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "biascheck/gateway.hpp"
#include "biascheck/hashing.hpp"
#include "biascheck/prompts.hpp"

namespace biascheck::pipeline {

std::string system_name(const std::optional<hyde::BiasCondition>& condition) {
    return condition ? hyde::to_string(*condition) : "direct";
}

namespace {

const char* kind_text(DirectParseErrorKind kind) {
    switch (kind) {
        case DirectParseErrorKind::MissingQaSection: return "missing-qa-section";
        case DirectParseErrorKind::MissingVerdictSection: return "missing-verdict-section";
        case DirectParseErrorKind::TooFewQa: return "too-few-qa";
        case DirectParseErrorKind::MissingVerdictLine: return "missing-verdict-line";
        case DirectParseErrorKind::UnknownVerdict: return "unknown-verdict";
    }
    return "unknown";
}

}  // namespace

DirectParseError::DirectParseError(DirectParseErrorKind kind, const std::string& detail)
    : Error(std::string(kind_text(kind)) + ": " + detail), kind_(kind) {}

namespace {

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find('\n', start);
        if (pos == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    for (auto& line : lines) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
    }
    return lines;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i]))) {
            return false;
        }
    }
    return true;
}

// "Q3: ..." / "A1: ..." markers; returns the digit or -1.
int qa_marker(std::string_view line, char letter) {
    if (line.size() < 3) return -1;
    if (std::toupper(static_cast<unsigned char>(line[0])) != letter) return -1;
    std::size_t i = 1;
    if (!std::isdigit(static_cast<unsigned char>(line[i]))) return -1;
    int n = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) {
        n = n * 10 + (line[i] - '0');
        ++i;
    }
    if (i >= line.size() || line[i] != ':') return -1;
    return n;
}

std::string strip_marker(std::string_view line) {
    const auto colon = line.find(':');
    return trim(line.substr(colon + 1));
}

corpus::VerdictLabel parse_verdict_value(std::string_view raw) {
    std::string value = trim(raw);
    // Tolerate light decoration around the label.
    while (!value.empty() && (value.back() == '.' || value.back() == '\'' ||
                              value.back() == '"' || value.back() == '*')) {
        value.pop_back();
    }
    while (!value.empty() && (value.front() == '\'' || value.front() == '"' ||
                              value.front() == '*')) {
        value.erase(value.begin());
    }
    auto label = corpus::parse_label(value);
    if (!label) {
        throw DirectParseError(DirectParseErrorKind::UnknownVerdict,
                               "'" + std::string(raw) + "'");
    }
    return *label;
}

}  // namespace

std::pair<std::string, corpus::VerdictLabel> parse_verdict_block(std::string_view text) {
    std::string justification;
    std::optional<corpus::VerdictLabel> label;
    bool in_justification = false;
    for (const auto& line : split_lines(text)) {
        if (starts_with_ci(line, "justification:")) {
            justification = strip_marker(line);
            in_justification = true;
            continue;
        }
        if (starts_with_ci(line, "verdict:")) {
            label = parse_verdict_value(line.substr(8));
            break;
        }
        if (in_justification && !trim(line).empty()) {
            if (!justification.empty()) justification += ' ';
            justification += trim(line);
        }
    }
    if (!label) {
        throw DirectParseError(DirectParseErrorKind::MissingVerdictLine,
                               "no 'verdict:' line found");
    }
    return {std::move(justification), *label};
}

DirectResponse parse_direct_response(std::string_view text) {
    static constexpr std::string_view kQaMarker = "=== Questions and Answers ===";
    static constexpr std::string_view kVerdictMarker = "=== Verdict ===";

    const auto qa_pos = text.find(kQaMarker);
    if (qa_pos == std::string_view::npos) {
        throw DirectParseError(DirectParseErrorKind::MissingQaSection,
                               "no '=== Questions and Answers ===' marker");
    }
    const auto verdict_pos = text.find(kVerdictMarker, qa_pos);
    if (verdict_pos == std::string_view::npos) {
        throw DirectParseError(DirectParseErrorKind::MissingVerdictSection,
                               "no '=== Verdict ===' marker");
    }

    const auto qa_text = text.substr(qa_pos + kQaMarker.size(),
                                     verdict_pos - qa_pos - kQaMarker.size());
    DirectResponse out;

    std::string question;
    std::string answer;
    bool have_question = false;
    bool in_answer = false;
    auto flush_pair = [&] {
        if (have_question && in_answer && !trim(answer).empty()) {
            out.qa.push_back({trim(question), trim(answer), std::nullopt});
        }
        question.clear();
        answer.clear();
        have_question = false;
        in_answer = false;
    };
    for (const auto& line : split_lines(qa_text)) {
        if (qa_marker(line, 'Q') > 0) {
            flush_pair();
            question = strip_marker(line);
            have_question = true;
        } else if (qa_marker(line, 'A') > 0) {
            in_answer = true;
            answer = strip_marker(line);
        } else if (in_answer && !trim(line).empty()) {
            answer += ' ';
            answer += trim(line);
        } else if (have_question && !in_answer && !trim(line).empty()) {
            question += ' ';
            question += trim(line);
        }
    }
    flush_pair();

    if (out.qa.size() < 3) {
        throw DirectParseError(DirectParseErrorKind::TooFewQa,
                               "found " + std::to_string(out.qa.size()) + " QA pairs");
    }
    out.qa.resize(3);

    auto [justification, label] = parse_verdict_block(text.substr(verdict_pos));
    out.justification = std::move(justification);
    out.label = label;
    return out;
}

namespace {

// Bounded worker pool: runs fn(i) for i in [0, count) on `workers` threads.
// fn must handle its own per-item errors; anything escaping is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> poisoned{false};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
        threads.emplace_back([&] {
            while (!poisoned.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    poisoned.store(true);
                }
            }
        });
    }
    for (auto& th : threads) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

VerdictRecord fallback_record(const corpus::Claim& claim,
                              std::optional<hyde::BiasCondition> condition,
                              const std::string& annotation) {
    VerdictRecord record;
    record.claim_id = claim.id;
    record.condition = condition;
    record.label = corpus::VerdictLabel::NotEnoughEvidence;
    record.annotations.push_back(annotation);
    return record;
}

void enforce_failure_budget(std::size_t failed, std::size_t total, double max_fraction) {
    if (total == 0) return;
    const double fraction = static_cast<double>(failed) / static_cast<double>(total);
    if (fraction > max_fraction) {
        std::ostringstream msg;
        msg << failed << "/" << total << " claims failed (budget "
            << max_fraction * 100.0 << "%)";
        throw FailureBudgetError(msg.str());
    }
}

}  // namespace

std::vector<VerdictRecord> run_direct(const corpus::ClaimSet& claims, gateway::Gateway& gateway,
                                      const PipelineOptions& options) {
    std::vector<VerdictRecord> records(claims.size());
    std::atomic<std::size_t> failed{0};

    parallel_for(claims.size(), options.workers, [&](std::size_t i) {
        const corpus::Claim& claim = claims.claims[i];
        gateway::PromptRequest request;
        request.system_text = prompts::kDirectSystem;
        request.user_text = prompts::render(prompts::kDirectUser, {{"claim", claim.text}});
        request.max_tokens = options.max_tokens;
        request.temperature = options.temperature;
        request.seed = options.seed;
        request.model_id = options.model_id;

        try {
            DirectResponse parsed;
            try {
                parsed = parse_direct_response(gateway.complete(request).text);
            } catch (const DirectParseError&) {
                auto retry = request;
                retry.seed = options.seed + 1;  // perturbed retry
                try {
                    parsed = parse_direct_response(gateway.complete(retry).text);
                } catch (const DirectParseError& e) {
                    records[i] = fallback_record(claim, std::nullopt,
                                                 std::string("error: unparseable direct "
                                                             "response after retry: ") +
                                                     e.what());
                    return;
                }
            }
            VerdictRecord record;
            record.claim_id = claim.id;
            record.label = parsed.label;
            record.justification = parsed.justification;
            record.qa = parsed.qa;
            records[i] = std::move(record);
        } catch (const Error& e) {
            records[i] = fallback_record(claim, std::nullopt,
                                         std::string("error: gateway failure: ") + e.what());
            ++failed;
        }
    });

    enforce_failure_budget(failed.load(), claims.size(), options.max_failure_fraction);
    return records;
}

namespace {

std::vector<const corpus::Claim*> sample_fewshot(const corpus::ClaimSet& fewshot, int count,
                                                 std::int64_t seed) {
    std::vector<const corpus::Claim*> pool;
    for (const auto& claim : fewshot.claims) {
        if (!claim.gold_qa.empty()) pool.push_back(&claim);
    }
    // Partial Fisher-Yates keyed by the run seed.
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) ^ 0x8c7f0aac97c4aa2full);
    const std::size_t take = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < take; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(take);
    return pool;
}

}  // namespace

std::vector<EvidenceQA> generate_questions(const corpus::Claim& claim,
                                           const retrieval::RankedEvidence& evidence,
                                           const corpus::ClaimSet& fewshot,
                                           gateway::Gateway& gateway,
                                           const PipelineOptions& options) {
    if (evidence.entries.empty()) return {};

    for (const auto& exemplar : fewshot.claims) {
        if (exemplar.id == claim.id) {
            throw ConfigError("few-shot exemplars overlap the evaluated claim '" + claim.id +
                              "'");
        }
    }

    std::string examples;
    for (const auto* exemplar : sample_fewshot(fewshot, options.fewshot_count, options.seed)) {
        examples += prompts::render(prompts::kQuestionGenExample,
                                    {{"claim", exemplar->text},
                                     {"evidence", exemplar->gold_qa.front().answer},
                                     {"question", exemplar->gold_qa.front().question}});
    }

    std::vector<EvidenceQA> out;
    out.reserve(evidence.entries.size());
    for (const auto& entry : evidence.entries) {
        gateway::PromptRequest request;
        request.user_text = prompts::render(
            prompts::kQuestionGen,
            {{"examples", examples}, {"claim", claim.text}, {"evidence", entry.text}});
        request.max_tokens = options.max_tokens;
        request.temperature = options.temperature;
        request.seed = options.seed;
        request.model_id = options.model_id;

        std::string question = trim(gateway.complete(request).text);
        const auto line_end = question.find('\n');
        if (line_end != std::string::npos) question.resize(line_end);
        if (question.empty()) {
            question = "What does this evidence show about the claim?";
        }
        EvidenceQA qa;
        qa.question = std::move(question);
        qa.answer = entry.text;  // the evidence sentence, verbatim
        if (!entry.url.empty()) qa.source_url = entry.url;
        out.push_back(std::move(qa));
    }
    return out;
}

VerdictRecord predict_veracity(const corpus::Claim& claim, const std::vector<EvidenceQA>& qa,
                               std::optional<hyde::BiasCondition> condition,
                               gateway::Gateway& gateway, const PipelineOptions& options) {
    std::string qa_block;
    if (qa.empty()) {
        qa_block = "(no evidence retrieved)\n";
    } else {
        for (std::size_t i = 0; i < qa.size(); ++i) {
            qa_block += "Q" + std::to_string(i + 1) + ": " + qa[i].question + "\n";
            qa_block += "A" + std::to_string(i + 1) + ": " + qa[i].answer + "\n";
        }
    }

    gateway::PromptRequest request;
    request.user_text =
        prompts::render(prompts::kVeracity, {{"claim", claim.text}, {"qa", qa_block}});
    request.max_tokens = options.max_tokens;
    request.temperature = options.temperature;
    request.seed = options.seed;
    request.model_id = options.model_id;

    VerdictRecord record;
    record.claim_id = claim.id;
    record.condition = condition;
    record.qa = qa;
    try {
        auto [justification, label] = parse_verdict_block(gateway.complete(request).text);
        record.justification = std::move(justification);
        record.label = label;
    } catch (const DirectParseError&) {
        auto retry = request;
        retry.seed = options.seed + 1;
        try {
            auto [justification, label] = parse_verdict_block(gateway.complete(retry).text);
            record.justification = std::move(justification);
            record.label = label;
        } catch (const DirectParseError& e) {
            record.label = corpus::VerdictLabel::NotEnoughEvidence;
            record.annotations.push_back(
                std::string("error: unparseable veracity response after retry: ") + e.what());
        }
    }
    return record;
}

namespace {

std::vector<retrieval::Candidate> to_candidates(
    const retrieval::RankedList& ranked,
    const std::unordered_map<std::string, std::pair<std::string, std::string>>& item_info) {
    std::vector<retrieval::Candidate> candidates;
    candidates.reserve(ranked.entries.size());
    for (const auto& entry : ranked.entries) {
        const auto& [text, url] = item_info.at(entry.item_id);
        candidates.push_back({entry.item_id, text, url});
    }
    return candidates;
}

retrieval::RankedList merge_max_score(const std::vector<retrieval::RankedList>& lists,
                                      std::size_t k) {
    std::unordered_map<std::string, double> best;
    for (const auto& list : lists) {
        for (const auto& entry : list.entries) {
            auto [it, inserted] = best.emplace(entry.item_id, entry.score);
            if (!inserted && entry.score > it->second) it->second = entry.score;
        }
    }
    std::vector<retrieval::RankedEntry> entries;
    entries.reserve(best.size());
    for (const auto& [item_id, score] : best) entries.push_back({item_id, score});
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item_id < b.item_id;
    });
    if (entries.size() > k) entries.resize(k);
    return {std::move(entries)};
}

}  // namespace

ConditionRun run_condition(const corpus::ClaimSet& claims, const corpus::ClaimSet& fewshot,
                           hyde::BiasCondition condition, const PipelineOptions& options,
                           gateway::Gateway& gateway, const StoreLoader& store_loader,
                           const std::map<std::string, ClaimArtifacts>& existing) {
    {
        std::unordered_set<std::string> evaluated;
        for (const auto& claim : claims.claims) evaluated.insert(claim.id);
        for (const auto& exemplar : fewshot.claims) {
            if (evaluated.count(exemplar.id) > 0) {
                throw ConfigError("few-shot reference set overlaps evaluated claims ('" +
                                  exemplar.id + "')");
            }
        }
    }

    ConditionRun run;
    run.condition = condition;
    run.claims.resize(claims.size());

    std::atomic<std::size_t> failed{0};
    parallel_for(claims.size(), options.workers, [&](std::size_t i) {
        const corpus::Claim& claim = claims.claims[i];
        if (auto it = existing.find(claim.id); it != existing.end()) {
            run.claims[i] = it->second;
            return;
        }

        ClaimArtifacts art;
        art.claim_id = claim.id;
        try {
            hyde::GenerationOptions gen;
            gen.model_id = options.model_id;
            gen.max_tokens = options.max_tokens;
            gen.temperature = options.temperature;
            gen.base_seed = options.seed;
            std::optional<hyde::RefusalDetector> custom_detector;
            if (!options.refusal_patterns.empty()) {
                custom_detector.emplace(options.refusal_patterns, options.refusal_window);
                gen.detector = &*custom_detector;
            }
            art.docs = hyde::generate_hypothetical(claim, condition, options.docs_per_condition,
                                                   gateway, gen);

            const auto store = store_loader(claim.id);
            std::vector<std::pair<std::string, std::string>> items;
            std::unordered_map<std::string, std::pair<std::string, std::string>> item_info;
            for (const auto& doc : store) {
                for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
                    std::string item_id = doc.doc_id + ":" + std::to_string(s);
                    items.emplace_back(item_id, doc.sentences[s]);
                    item_info.emplace(std::move(item_id),
                                      std::make_pair(doc.sentences[s], doc.url));
                }
            }
            const auto index =
                retrieval::Bm25Index::build(items, options.bm25_k1, options.bm25_b);

            std::vector<hyde::HypotheticalDocument> query_docs;
            for (const auto& doc : art.docs) {
                if (options.include_refusals || !doc.refusal) query_docs.push_back(doc);
            }
            if (options.per_doc_queries) {
                std::vector<retrieval::RankedList> lists;
                lists.push_back(index.retrieve(retrieval::tokenize(claim.text),
                                               options.retrieve_k));
                for (const auto& doc : query_docs) {
                    lists.push_back(index.retrieve(
                        retrieval::query_for_condition(claim, {doc}), options.retrieve_k));
                }
                art.ranked = merge_max_score(lists, options.retrieve_k);
            } else {
                art.ranked = index.retrieve(retrieval::query_for_condition(claim, query_docs),
                                            options.retrieve_k);
            }

            art.evidence = retrieval::rerank(claim, to_candidates(art.ranked, item_info),
                                             gateway, options.evidence_n);
            const auto qa = generate_questions(claim, art.evidence, fewshot, gateway, options);
            art.verdict = predict_veracity(claim, qa, condition, gateway, options);
        } catch (const Error& e) {
            art.failed = true;
            art.error = e.what();
            art.verdict = fallback_record(claim, condition,
                                          std::string("error: claim failed: ") + e.what());
            ++failed;
        }
        run.claims[i] = std::move(art);
    });

    enforce_failure_budget(failed.load(), claims.size(), options.max_failure_fraction);
    return run;
}

}  // namespace biascheck::pipeline
