#include "biascheck/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"
#include "biascheck/retrieval.hpp"

namespace biascheck::metrics {

LabelDistribution label_distribution(const std::vector<pipeline::VerdictRecord>& records) {
    if (records.empty()) {
        throw DataError("label_distribution: no records");
    }
    LabelDistribution dist;
    dist.total = records.size();
    for (auto label : corpus::kAllLabels) {
        dist.counts[label] = 0;
    }
    for (const auto& record : records) {
        ++dist.counts[record.label];
    }
    for (auto label : corpus::kAllLabels) {
        dist.percentages[label] =
            100.0 * static_cast<double>(dist.counts[label]) / static_cast<double>(dist.total);
    }
    return dist;
}

ShiftReport distribution_shift(const LabelDistribution& a, const LabelDistribution& b,
                               std::string reference_id, std::string comparison_id) {
    ShiftReport report;
    report.reference_id = std::move(reference_id);
    report.comparison_id = std::move(comparison_id);
    for (auto label : corpus::kAllLabels) {
        report.shifts[label] = b.percentages.at(label) - a.percentages.at(label);
    }
    return report;
}

namespace {

std::unordered_map<std::string, const pipeline::VerdictRecord*> by_claim(
    const std::vector<pipeline::VerdictRecord>& records, const char* side) {
    std::unordered_map<std::string, const pipeline::VerdictRecord*> out;
    for (const auto& record : records) {
        if (!out.emplace(record.claim_id, &record).second) {
            throw DataError(std::string("agreement: duplicate claim_id '") + record.claim_id +
                            "' in " + side);
        }
    }
    return out;
}

}  // namespace

AgreementReport agreement(const std::vector<pipeline::VerdictRecord>& a,
                          const std::vector<pipeline::VerdictRecord>& b) {
    const auto index_b = by_claim(b, "b");
    if (a.size() != b.size()) {
        throw DataError("agreement: claim sets differ in size (" + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()) + ")");
    }

    AgreementReport report;
    report.n = a.size();
    std::map<corpus::VerdictLabel, std::size_t> count_a;
    std::map<corpus::VerdictLabel, std::size_t> count_b;
    std::map<corpus::VerdictLabel, std::size_t> both;
    std::size_t matches = 0;
    std::unordered_set<std::string> seen_a;
    for (const auto& record : a) {
        if (!seen_a.insert(record.claim_id).second) {
            throw DataError("agreement: duplicate claim_id '" + record.claim_id + "' in a");
        }
        const auto it = index_b.find(record.claim_id);
        if (it == index_b.end()) {
            throw DataError("agreement: claim '" + record.claim_id + "' missing from b");
        }
        ++count_a[record.label];
        ++count_b[it->second->label];
        if (record.label == it->second->label) {
            ++matches;
            ++both[record.label];
        }
    }
    report.overall = static_cast<double>(matches) / static_cast<double>(report.n);
    for (auto label : corpus::kAllLabels) {
        const auto hit = both.count(label) ? both.at(label) : 0;
        if (auto it = count_a.find(label); it != count_a.end() && it->second > 0) {
            report.per_label_by_a[label] =
                static_cast<double>(hit) / static_cast<double>(it->second);
        }
        if (auto it = count_b.find(label); it != count_b.end() && it->second > 0) {
            report.per_label_by_b[label] =
                static_cast<double>(hit) / static_cast<double>(it->second);
        }
    }
    return report;
}

SimilarityReport justification_similarity(const std::vector<pipeline::VerdictRecord>& a,
                                          const std::vector<pipeline::VerdictRecord>& b,
                                          gateway::Gateway& embedder) {
    const auto index_b = by_claim(b, "b");

    struct Pair {
        const pipeline::VerdictRecord* lhs;
        const pipeline::VerdictRecord* rhs;
    };
    std::vector<Pair> pairs;
    SimilarityReport report;
    for (const auto& record : a) {
        const auto it = index_b.find(record.claim_id);
        if (it == index_b.end()) {
            throw DataError("justification_similarity: claim '" + record.claim_id +
                            "' missing from b");
        }
        if (record.justification.empty() || it->second->justification.empty()) {
            ++report.excluded;
            continue;
        }
        pairs.push_back({&record, it->second});
    }
    if (pairs.empty()) {
        return report;
    }

    std::vector<std::string> texts;
    texts.reserve(pairs.size() * 2);
    for (const auto& p : pairs) {
        texts.push_back(p.lhs->justification);
        texts.push_back(p.rhs->justification);
    }
    const auto vectors = embedder.embed(texts);

    auto zero = [](const gateway::EmbeddingVector& v) {
        for (double x : v.values) {
            if (x != 0.0) return false;
        }
        return true;
    };

    std::vector<double> values;
    double sum = 0.0;
    double sum_agree = 0.0;
    double sum_disagree = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& u = vectors[2 * i];
        const auto& v = vectors[2 * i + 1];
        if (zero(u) || zero(v)) {
            ++report.excluded;
            continue;
        }
        const double sim = gateway::cosine(u, v);
        values.push_back(sim);
        sum += sim;
        if (pairs[i].lhs->label == pairs[i].rhs->label) {
            sum_agree += sim;
            ++report.agree_count;
        } else {
            sum_disagree += sim;
            ++report.disagree_count;
        }
    }
    report.compared = values.size();
    if (values.empty()) {
        return report;
    }

    report.mean = sum / static_cast<double>(values.size());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    report.median = values.size() % 2 == 1 ? values[mid]
                                           : 0.5 * (values[mid - 1] + values[mid]);
    if (report.agree_count > 0) {
        report.mean_when_agree = sum_agree / static_cast<double>(report.agree_count);
    }
    if (report.disagree_count > 0) {
        report.mean_when_disagree = sum_disagree / static_cast<double>(report.disagree_count);
    }
    return report;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) {
        return 1.0;  // documented convention
    }
    std::size_t intersection = 0;
    for (const auto& item : a) {
        if (b.count(item)) ++intersection;
    }
    const std::size_t unions = a.size() + b.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(unions);
}

namespace {

// Inversions by merge sort.
std::uint64_t count_inversions(std::vector<std::size_t>& values) {
    if (values.size() < 2) return 0;
    std::vector<std::size_t> buffer(values.size());
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < values.size(); width *= 2) {
        for (std::size_t lo = 0; lo + width < values.size(); lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, values.size());
            std::size_t i = lo;
            std::size_t j = mid;
            std::size_t k = lo;
            while (i < mid && j < hi) {
                if (values[i] <= values[j]) {
                    buffer[k++] = values[i++];
                } else {
                    inversions += mid - i;
                    buffer[k++] = values[j++];
                }
            }
            while (i < mid) buffer[k++] = values[i++];
            while (j < hi) buffer[k++] = values[j++];
            std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo),
                      buffer.begin() + static_cast<std::ptrdiff_t>(hi),
                      values.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

}  // namespace

std::optional<double> kendall_tau(const retrieval::RankedList& a,
                                  const retrieval::RankedList& b) {
    std::unordered_map<std::string, std::size_t> rank_b;
    for (std::size_t i = 0; i < b.entries.size(); ++i) {
        rank_b.emplace(b.entries[i].item_id, i);
    }
    std::vector<std::size_t> common;  // b-ranks in a-order
    for (const auto& entry : a.entries) {
        if (auto it = rank_b.find(entry.item_id); it != rank_b.end()) {
            common.push_back(it->second);
        }
    }
    const std::size_t n = common.size();
    if (n < 2) {
        return std::nullopt;
    }
    const std::uint64_t discordant = count_inversions(common);
    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::int64_t numerator =
        static_cast<std::int64_t>(n0 - discordant) - static_cast<std::int64_t>(discordant);
    return static_cast<double>(numerator) / static_cast<double>(n0);
}

std::string registered_domain(std::string_view url) {
    std::string_view rest = url;
    if (const auto scheme = rest.find("://"); scheme != std::string_view::npos) {
        rest = rest.substr(scheme + 3);
    } else if (rest.substr(0, 2) == "//") {
        rest = rest.substr(2);
    }
    const auto end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, end);
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
        authority = authority.substr(at + 1);
    }
    if (const auto colon = authority.find(':'); colon != std::string_view::npos) {
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) {
        return "unknown";
    }

    std::string host;
    host.reserve(authority.size());
    for (char c : authority) {
        host.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (host.find('.') == std::string::npos) {
        return host == "localhost" ? host : "unknown";
    }

    std::vector<std::string> labels;
    std::size_t start = 0;
    while (start <= host.size()) {
        const auto dot = host.find('.', start);
        if (dot == std::string::npos) {
            labels.push_back(host.substr(start));
            break;
        }
        labels.push_back(host.substr(start, dot - start));
        start = dot + 1;
    }
    for (const auto& label : labels) {
        if (label.empty()) return "unknown";
    }

    // Common two-level public suffixes; everything else is suffix = last label.
    static const std::unordered_set<std::string> kTwoLevelSuffixes = {
        "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk",   "net.uk", "com.au", "net.au",
        "org.au", "gov.au", "edu.au", "co.jp", "or.jp",  "ne.jp",  "ac.jp",  "go.jp",
        "com.br", "org.br", "gov.br", "co.nz", "org.nz", "govt.nz", "co.in", "org.in",
        "gov.in", "ac.in",  "co.za",  "org.za", "gov.za", "com.cn", "org.cn", "gov.cn",
        "com.mx", "org.mx", "com.ar", "com.tr", "com.sg", "com.hk", "co.kr",  "or.kr",
    };
    const std::size_t n = labels.size();
    std::size_t suffix_len = 1;
    if (n >= 2 && kTwoLevelSuffixes.count(labels[n - 2] + "." + labels[n - 1])) {
        suffix_len = 2;
    }
    if (n <= suffix_len) {
        return "unknown";
    }
    std::string domain = labels[n - suffix_len - 1];
    for (std::size_t i = n - suffix_len; i < n; ++i) {
        domain += '.';
        domain += labels[i];
    }
    return domain;
}

std::map<std::string, std::map<std::string, std::size_t>> domain_distribution(
    const std::vector<pipeline::ConditionRun>& runs) {
    std::map<std::string, std::map<std::string, std::size_t>> out;
    for (const auto& run : runs) {
        auto& counts = out[hyde::to_string(run.condition)];
        for (const auto& claim : run.claims) {
            for (const auto& entry : claim.evidence.entries) {
                ++counts[registered_domain(entry.url)];
            }
        }
    }
    return out;
}

RefusalReport refusal_stats(const std::vector<pipeline::ConditionRun>& runs) {
    RefusalReport report;
    for (const auto& run : runs) {
        ConditionRefusals stats;
        stats.total_claims = run.claims.size();
        for (const auto& claim : run.claims) {
            bool any = false;
            for (const auto& doc : claim.docs) {
                ++stats.total_documents;
                if (doc.refusal) {
                    ++stats.refusal_documents;
                    any = true;
                }
            }
            if (any) ++stats.claims_with_refusals;
        }
        if (stats.total_claims > 0) {
            stats.claim_fraction = static_cast<double>(stats.claims_with_refusals) /
                                   static_cast<double>(stats.total_claims);
        }
        if (stats.total_documents > 0) {
            stats.document_rate = static_cast<double>(stats.refusal_documents) /
                                  static_cast<double>(stats.total_documents);
        }
        report.per_condition[hyde::to_string(run.condition)] = stats;
    }

    const auto pos = report.per_condition.find("positive");
    const auto base = report.per_condition.find("baseline");
    if (pos != report.per_condition.end() && base != report.per_condition.end() &&
        base->second.document_rate > 0.0) {
        report.positive_to_baseline_ratio =
            pos->second.document_rate / base->second.document_rate;
    }
    return report;
}

namespace {

std::set<std::string> evidence_ids(const pipeline::ClaimArtifacts& claim) {
    std::set<std::string> ids;
    for (const auto& entry : claim.evidence.entries) ids.insert(entry.item_id);
    return ids;
}

std::set<std::string> topk_ids(const pipeline::ClaimArtifacts& claim) {
    std::set<std::string> ids;
    for (const auto& entry : claim.ranked.entries) ids.insert(entry.item_id);
    return ids;
}

}  // namespace

OverlapReport overlap_report(const std::vector<pipeline::ConditionRun>& runs) {
    OverlapReport report;
    // claim_id -> condition -> artifacts
    std::map<std::string, std::map<std::string, const pipeline::ClaimArtifacts*>> claims;
    for (const auto& run : runs) {
        const std::string name = hyde::to_string(run.condition);
        report.conditions.push_back(name);
        for (const auto& claim : run.claims) {
            claims[claim.claim_id][name] = &claim;
        }
    }
    std::sort(report.conditions.begin(), report.conditions.end());

    for (std::size_t i = 0; i < report.conditions.size(); ++i) {
        for (std::size_t j = i + 1; j < report.conditions.size(); ++j) {
            const auto key = std::make_pair(report.conditions[i], report.conditions[j]);
            double sum_evidence = 0.0;
            double sum_topk = 0.0;
            double sum_tau = 0.0;
            std::size_t n_jaccard = 0;
            std::size_t n_tau = 0;
            std::size_t skipped = 0;
            std::set<std::string> pooled_a;
            std::set<std::string> pooled_b;
            for (const auto& [claim_id, per_condition] : claims) {
                const auto a = per_condition.find(key.first);
                const auto b = per_condition.find(key.second);
                if (a == per_condition.end() || b == per_condition.end()) continue;
                sum_evidence += jaccard(evidence_ids(*a->second), evidence_ids(*b->second));
                sum_topk += jaccard(topk_ids(*a->second), topk_ids(*b->second));
                ++n_jaccard;
                // Item ids are claim-local; qualify them for the pooled view.
                for (const auto& id : evidence_ids(*a->second)) {
                    pooled_a.insert(claim_id + "|" + id);
                }
                for (const auto& id : evidence_ids(*b->second)) {
                    pooled_b.insert(claim_id + "|" + id);
                }
                if (auto tau = kendall_tau(a->second->ranked, b->second->ranked)) {
                    sum_tau += *tau;
                    ++n_tau;
                } else {
                    ++skipped;
                }
            }
            if (n_jaccard > 0) {
                report.jaccard_evidence[key] = sum_evidence / static_cast<double>(n_jaccard);
                report.jaccard_topk[key] = sum_topk / static_cast<double>(n_jaccard);
                report.jaccard_evidence_pooled[key] = jaccard(pooled_a, pooled_b);
            }
            if (n_tau > 0) {
                report.kendall[key] = sum_tau / static_cast<double>(n_tau);
            }
            report.kendall_skipped[key] = skipped;
        }
    }

    for (const auto& condition : report.conditions) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& [claim_id, per_condition] : claims) {
            const auto self = per_condition.find(condition);
            if (self == per_condition.end()) continue;
            const auto own = evidence_ids(*self->second);
            if (own.empty()) continue;
            std::set<std::string> others;
            for (const auto& [name, art] : per_condition) {
                if (name == condition) continue;
                for (const auto& entry : art->evidence.entries) others.insert(entry.item_id);
            }
            std::size_t unique = 0;
            for (const auto& id : own) {
                if (!others.count(id)) ++unique;
            }
            sum += static_cast<double>(unique) / static_cast<double>(own.size());
            ++n;
        }
        if (n > 0) {
            report.unique_evidence_fraction[condition] = sum / static_cast<double>(n);
        }
    }
    return report;
}

namespace {

double hungarian_similarity_total(const std::vector<std::string>& pred,
                                  const std::vector<std::string>& gold) {
    if (pred.empty() || gold.empty()) return 0.0;
    std::vector<std::vector<double>> sim(pred.size(), std::vector<double>(gold.size(), 0.0));
    for (std::size_t i = 0; i < pred.size(); ++i) {
        for (std::size_t j = 0; j < gold.size(); ++j) {
            sim[i][j] = token_similarity(pred[i], gold[j]);
        }
    }
    const auto pairs = hungarian_assignment(sim, /*maximize=*/true);
    return assignment_total(sim, pairs);
}

}  // namespace

AveritecScore averitec_scores(const std::vector<pipeline::VerdictRecord>& pred,
                              const corpus::ClaimSet& gold,
                              const std::vector<double>& thresholds) {
    std::unordered_map<std::string, const corpus::Claim*> gold_by_id;
    for (const auto& claim : gold.claims) {
        gold_by_id.emplace(claim.id, &claim);
    }

    AveritecScore score;
    std::map<double, std::size_t> correct_at;
    for (double t : thresholds) correct_at[t] = 0;

    double sum_q = 0.0;
    double sum_qa = 0.0;
    for (const auto& record : pred) {
        const auto it = gold_by_id.find(record.claim_id);
        if (it == gold_by_id.end()) {
            throw DataError("averitec_scores: claim '" + record.claim_id +
                            "' missing from gold set");
        }
        const corpus::Claim& gold_claim = *it->second;
        if (gold_claim.gold_qa.empty() || !gold_claim.gold_label) {
            ++score.excluded_claims;
            continue;
        }

        std::vector<std::string> pred_q;
        std::vector<std::string> pred_qa;
        for (const auto& qa : record.qa) {
            pred_q.push_back(qa.question);
            pred_qa.push_back(qa.question + " " + qa.answer);
        }
        std::vector<std::string> gold_q;
        std::vector<std::string> gold_qa;
        for (const auto& qa : gold_claim.gold_qa) {
            gold_q.push_back(qa.question);
            gold_qa.push_back(qa.question + " " + qa.answer);
        }

        const double denom = static_cast<double>(gold_q.size());
        const double q_score = hungarian_similarity_total(pred_q, gold_q) / denom;
        const double qa_score = hungarian_similarity_total(pred_qa, gold_qa) / denom;
        sum_q += q_score;
        sum_qa += qa_score;
        ++score.scored_claims;

        for (double t : thresholds) {
            if (qa_score >= t && record.label == *gold_claim.gold_label) {
                ++correct_at[t];
            }
        }
    }

    if (score.scored_claims > 0) {
        score.q_only = sum_q / static_cast<double>(score.scored_claims);
        score.q_a = sum_qa / static_cast<double>(score.scored_claims);
        for (double t : thresholds) {
            score.accuracy_at[t] =
                static_cast<double>(correct_at[t]) / static_cast<double>(score.scored_claims);
        }
    } else {
        for (double t : thresholds) score.accuracy_at[t] = 0.0;
    }
    return score;
}

std::vector<pipeline::VerdictRecord> exclude_annotated(
    const std::vector<pipeline::VerdictRecord>& records) {
    std::vector<pipeline::VerdictRecord> out;
    out.reserve(records.size());
    for (const auto& record : records) {
        if (record.annotations.empty()) out.push_back(record);
    }
    return out;
}

}  // namespace biascheck::metrics
