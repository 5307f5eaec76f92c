#include "biascheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"

namespace biascheck::report {

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

std::string signed_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.*f", decimals, value);
    return buf;
}

std::string pair_key(const std::pair<std::string, std::string>& key) {
    return key.first + "|" + key.second;
}

nlohmann::json distribution_json(const metrics::LabelDistribution& dist) {
    nlohmann::json counts;
    nlohmann::json percentages;
    for (auto label : corpus::kAllLabels) {
        counts[corpus::to_string(label)] = dist.counts.at(label);
        percentages[corpus::to_string(label)] = dist.percentages.at(label);
    }
    return {{"total", dist.total}, {"counts", counts}, {"percentages", percentages}};
}

nlohmann::json shift_json(const metrics::ShiftReport& shift) {
    nlohmann::json shifts;
    for (auto label : corpus::kAllLabels) {
        shifts[corpus::to_string(label)] = shift.shifts.at(label);
    }
    return {{"reference", shift.reference_id},
            {"comparison", shift.comparison_id},
            {"shifts", shifts}};
}

nlohmann::json per_label_json(const std::map<corpus::VerdictLabel, double>& values) {
    nlohmann::json out;
    for (const auto& [label, value] : values) {
        out[corpus::to_string(label)] = value;
    }
    return out;
}

// Fixed render order: the probe first, then the conditions.
const std::vector<std::string> kSystemOrder = {"direct", "baseline", "positive", "negative",
                                               "objective"};

std::vector<std::string> order_systems(std::vector<std::string> systems) {
    std::vector<std::string> ordered;
    for (const auto& name : kSystemOrder) {
        if (std::find(systems.begin(), systems.end(), name) != systems.end()) {
            ordered.push_back(name);
        }
    }
    for (const auto& name : systems) {
        if (std::find(ordered.begin(), ordered.end(), name) == ordered.end()) {
            ordered.push_back(name);
        }
    }
    return ordered;
}

}  // namespace

nlohmann::json AuditReport::to_json() const {
    nlohmann::json j;
    j["run_ids"] = run_ids;
    j["systems"] = systems;

    nlohmann::json distributions_json;
    for (const auto& [system, dist] : distributions) {
        distributions_json[system] = distribution_json(dist);
    }
    j["distributions"] = distributions_json;

    j["shifts"] = nlohmann::json::array();
    for (const auto& shift : shifts) {
        j["shifts"].push_back(shift_json(shift));
    }

    if (agreement) {
        j["agreement"] = {{"overall", agreement->overall},
                          {"n", agreement->n},
                          {"per_label_by_direct", per_label_json(agreement->per_label_by_a)},
                          {"per_label_by_baseline", per_label_json(agreement->per_label_by_b)}};
    }
    if (similarity) {
        j["justification_similarity"] = {
            {"mean", similarity->mean},
            {"median", similarity->median},
            {"mean_when_agree", similarity->mean_when_agree},
            {"mean_when_disagree", similarity->mean_when_disagree},
            {"compared", similarity->compared},
            {"excluded", similarity->excluded},
            {"agree_count", similarity->agree_count},
            {"disagree_count", similarity->disagree_count},
        };
    }
    if (overlap) {
        nlohmann::json o;
        o["conditions"] = overlap->conditions;
        auto dump_pairs = [](const auto& pairs) {
            nlohmann::json out;
            for (const auto& [key, value] : pairs) {
                out[pair_key(key)] = value;
            }
            return out;
        };
        o["jaccard_evidence"] = dump_pairs(overlap->jaccard_evidence);
        o["jaccard_topk"] = dump_pairs(overlap->jaccard_topk);
        o["jaccard_evidence_pooled"] = dump_pairs(overlap->jaccard_evidence_pooled);
        o["kendall_tau"] = dump_pairs(overlap->kendall);
        o["kendall_skipped"] = dump_pairs(overlap->kendall_skipped);
        o["unique_evidence_fraction"] = overlap->unique_evidence_fraction;
        j["overlap"] = o;
    }
    if (!domains.empty()) {
        j["domains"] = domains;
    }
    if (refusals) {
        nlohmann::json r;
        for (const auto& [condition, stats] : refusals->per_condition) {
            r[condition] = {
                {"total_claims", stats.total_claims},
                {"claims_with_refusals", stats.claims_with_refusals},
                {"claim_fraction", stats.claim_fraction},
                {"total_documents", stats.total_documents},
                {"refusal_documents", stats.refusal_documents},
                {"document_rate", stats.document_rate},
            };
        }
        nlohmann::json block{{"per_condition", r}};
        if (refusals->positive_to_baseline_ratio) {
            block["positive_to_baseline_ratio"] = *refusals->positive_to_baseline_ratio;
        }
        j["refusals"] = block;
    }
    if (!averitec.empty()) {
        nlohmann::json a;
        for (const auto& [system, score] : averitec) {
            nlohmann::json accuracy;
            for (const auto& [threshold, value] : score.accuracy_at) {
                accuracy[fixed(threshold, 2)] = value;
            }
            a[system] = {{"q_only", score.q_only},
                         {"q_a", score.q_a},
                         {"accuracy_at", accuracy},
                         {"scored_claims", score.scored_claims},
                         {"excluded_claims", score.excluded_claims}};
        }
        j["averitec"] = a;
    }
    return j;
}

namespace {

corpus::VerdictLabel label_from_key(const std::string& key) {
    auto label = corpus::parse_label(key);
    if (!label) {
        throw DataError("report: unknown label '" + key + "'");
    }
    return *label;
}

std::pair<std::string, std::string> split_pair_key(const std::string& key) {
    const auto bar = key.find('|');
    if (bar == std::string::npos) {
        throw DataError("report: malformed pair key '" + key + "'");
    }
    return {key.substr(0, bar), key.substr(bar + 1)};
}

}  // namespace

AuditReport AuditReport::from_json(const nlohmann::json& j) {
    AuditReport report;
    report.run_ids = j.value("run_ids", std::vector<std::string>{});
    report.systems = j.value("systems", std::vector<std::string>{});

    const auto distributions = j.value("distributions", nlohmann::json::object());
    for (const auto& [system, d] : distributions.items()) {
        metrics::LabelDistribution dist;
        dist.total = d.at("total").get<std::size_t>();
        for (const auto& [key, value] : d.at("counts").items()) {
            dist.counts[label_from_key(key)] = value.get<std::size_t>();
        }
        for (const auto& [key, value] : d.at("percentages").items()) {
            dist.percentages[label_from_key(key)] = value.get<double>();
        }
        report.distributions[system] = std::move(dist);
    }

    for (const auto& s : j.value("shifts", nlohmann::json::array())) {
        metrics::ShiftReport shift;
        shift.reference_id = s.at("reference").get<std::string>();
        shift.comparison_id = s.at("comparison").get<std::string>();
        for (const auto& [key, value] : s.at("shifts").items()) {
            shift.shifts[label_from_key(key)] = value.get<double>();
        }
        report.shifts.push_back(std::move(shift));
    }

    if (j.contains("agreement")) {
        const auto& a = j.at("agreement");
        metrics::AgreementReport agreement;
        agreement.overall = a.at("overall").get<double>();
        agreement.n = a.at("n").get<std::size_t>();
        const auto by_a = a.value("per_label_by_direct", nlohmann::json::object());
        for (const auto& [key, value] : by_a.items()) {
            agreement.per_label_by_a[label_from_key(key)] = value.get<double>();
        }
        const auto by_b = a.value("per_label_by_baseline", nlohmann::json::object());
        for (const auto& [key, value] : by_b.items()) {
            agreement.per_label_by_b[label_from_key(key)] = value.get<double>();
        }
        report.agreement = std::move(agreement);
    }

    if (j.contains("justification_similarity")) {
        const auto& s = j.at("justification_similarity");
        metrics::SimilarityReport similarity;
        similarity.mean = s.at("mean").get<double>();
        similarity.median = s.at("median").get<double>();
        similarity.mean_when_agree = s.at("mean_when_agree").get<double>();
        similarity.mean_when_disagree = s.at("mean_when_disagree").get<double>();
        similarity.compared = s.at("compared").get<std::size_t>();
        similarity.excluded = s.at("excluded").get<std::size_t>();
        similarity.agree_count = s.at("agree_count").get<std::size_t>();
        similarity.disagree_count = s.at("disagree_count").get<std::size_t>();
        report.similarity = similarity;
    }

    if (j.contains("overlap")) {
        const auto& o = j.at("overlap");
        metrics::OverlapReport overlap;
        overlap.conditions = o.value("conditions", std::vector<std::string>{});
        const auto jaccard_evidence = o.value("jaccard_evidence", nlohmann::json::object());
        for (const auto& [key, value] : jaccard_evidence.items()) {
            overlap.jaccard_evidence[split_pair_key(key)] = value.get<double>();
        }
        const auto jaccard_topk = o.value("jaccard_topk", nlohmann::json::object());
        for (const auto& [key, value] : jaccard_topk.items()) {
            overlap.jaccard_topk[split_pair_key(key)] = value.get<double>();
        }
        const auto jaccard_pooled =
            o.value("jaccard_evidence_pooled", nlohmann::json::object());
        for (const auto& [key, value] : jaccard_pooled.items()) {
            overlap.jaccard_evidence_pooled[split_pair_key(key)] = value.get<double>();
        }
        const auto kendall = o.value("kendall_tau", nlohmann::json::object());
        for (const auto& [key, value] : kendall.items()) {
            overlap.kendall[split_pair_key(key)] = value.get<double>();
        }
        const auto kendall_skipped = o.value("kendall_skipped", nlohmann::json::object());
        for (const auto& [key, value] : kendall_skipped.items()) {
            overlap.kendall_skipped[split_pair_key(key)] = value.get<std::size_t>();
        }
        const auto unique = o.value("unique_evidence_fraction", nlohmann::json::object());
        for (const auto& [key, value] : unique.items()) {
            overlap.unique_evidence_fraction[key] = value.get<double>();
        }
        report.overlap = std::move(overlap);
    }

    const auto domains = j.value("domains", nlohmann::json::object());
    for (const auto& [condition, counts] : domains.items()) {
        for (const auto& [domain, count] : counts.items()) {
            report.domains[condition][domain] = count.get<std::size_t>();
        }
    }

    if (j.contains("refusals")) {
        metrics::RefusalReport refusals;
        const auto& r = j.at("refusals");
        const auto per_condition = r.value("per_condition", nlohmann::json::object());
        for (const auto& [condition, stats] : per_condition.items()) {
            metrics::ConditionRefusals c;
            c.total_claims = stats.at("total_claims").get<std::size_t>();
            c.claims_with_refusals = stats.at("claims_with_refusals").get<std::size_t>();
            c.claim_fraction = stats.at("claim_fraction").get<double>();
            c.total_documents = stats.at("total_documents").get<std::size_t>();
            c.refusal_documents = stats.at("refusal_documents").get<std::size_t>();
            c.document_rate = stats.at("document_rate").get<double>();
            refusals.per_condition[condition] = c;
        }
        if (r.contains("positive_to_baseline_ratio")) {
            refusals.positive_to_baseline_ratio =
                r.at("positive_to_baseline_ratio").get<double>();
        }
        report.refusals = std::move(refusals);
    }

    const auto averitec = j.value("averitec", nlohmann::json::object());
    for (const auto& [system, s] : averitec.items()) {
        metrics::AveritecScore score;
        score.q_only = s.at("q_only").get<double>();
        score.q_a = s.at("q_a").get<double>();
        for (const auto& [threshold, value] : s.at("accuracy_at").items()) {
            score.accuracy_at[std::stod(threshold)] = value.get<double>();
        }
        score.scored_claims = s.at("scored_claims").get<std::size_t>();
        score.excluded_claims = s.at("excluded_claims").get<std::size_t>();
        report.averitec[system] = std::move(score);
    }
    return report;
}

ReportFormat parse_format(const std::string& name) {
    if (name == "json") return ReportFormat::Json;
    if (name == "markdown" || name == "md") return ReportFormat::Markdown;
    if (name == "csv") return ReportFormat::Csv;
    throw ConfigError("unknown report format '" + name + "' (expected json, markdown, csv)");
}

namespace {

std::string render_markdown(const AuditReport& report) {
    std::ostringstream out;
    out << "# Bias audit report\n\n";
    out << "Runs: ";
    for (std::size_t i = 0; i < report.run_ids.size(); ++i) {
        out << (i ? ", " : "") << report.run_ids[i];
    }
    out << "\n";

    if (!report.distributions.empty()) {
        out << "\n## Label distributions\n\n";
        out << "| Label |";
        for (const auto& system : report.systems) {
            out << " " << system << " | %" << " |";
        }
        out << "\n|---|";
        for (std::size_t i = 0; i < report.systems.size(); ++i) out << "---|---|";
        out << "\n";
        for (auto label : corpus::kAllLabels) {
            out << "| " << corpus::to_string(label) << " |";
            for (const auto& system : report.systems) {
                const auto& dist = report.distributions.at(system);
                out << " " << dist.counts.at(label) << " | "
                    << fixed(dist.percentages.at(label), 1) << " |";
            }
            out << "\n";
        }
    }

    for (const auto& shift : report.shifts) {
        out << "\n## Shift: " << shift.reference_id << " -> " << shift.comparison_id << "\n\n";
        const bool have_counts = report.distributions.count(shift.reference_id) &&
                                 report.distributions.count(shift.comparison_id);
        out << "| Label | " << shift.reference_id << " | " << shift.comparison_id
            << " | Absolute Shift |\n|---|---|---|---|\n";
        for (auto label : corpus::kAllLabels) {
            out << "| " << corpus::to_string(label) << " | ";
            if (have_counts) {
                out << report.distributions.at(shift.reference_id).counts.at(label) << " | "
                    << report.distributions.at(shift.comparison_id).counts.at(label);
            } else {
                out << "- | -";
            }
            out << " | " << signed_fixed(shift.shifts.at(label), 2) << "% |\n";
        }
    }

    if (report.agreement) {
        out << "\n## Agreement (direct vs baseline)\n\n";
        out << "Overall: " << fixed(100.0 * report.agreement->overall, 2) << "% over "
            << report.agreement->n << " claims\n\n";
        out << "| Label | by direct | by baseline |\n|---|---|---|\n";
        for (auto label : corpus::kAllLabels) {
            auto cell = [&](const std::map<corpus::VerdictLabel, double>& values) {
                const auto it = values.find(label);
                return it == values.end() ? std::string("-")
                                          : fixed(100.0 * it->second, 2) + "%";
            };
            out << "| " << corpus::to_string(label) << " | "
                << cell(report.agreement->per_label_by_a) << " | "
                << cell(report.agreement->per_label_by_b) << " |\n";
        }
    }

    if (report.similarity) {
        out << "\n## Justification similarity (direct vs baseline)\n\n";
        out << "| mean | median | when agree | when disagree | compared | excluded |\n";
        out << "|---|---|---|---|---|---|\n";
        out << "| " << fixed(report.similarity->mean, 3) << " | "
            << fixed(report.similarity->median, 3) << " | "
            << fixed(report.similarity->mean_when_agree, 3) << " | "
            << fixed(report.similarity->mean_when_disagree, 3) << " | "
            << report.similarity->compared << " | " << report.similarity->excluded << " |\n";
    }

    if (report.overlap) {
        out << "\n## Retrieval overlap\n\n";
        out << "| Pair | Jaccard (evidence) | Jaccard (top-k) | Kendall tau |\n";
        out << "|---|---|---|---|\n";
        for (const auto& [key, value] : report.overlap->jaccard_evidence) {
            out << "| " << key.first << " vs " << key.second << " | " << fixed(value, 3)
                << " | ";
            const auto topk = report.overlap->jaccard_topk.find(key);
            out << (topk == report.overlap->jaccard_topk.end() ? std::string("-")
                                                               : fixed(topk->second, 3));
            out << " | ";
            const auto tau = report.overlap->kendall.find(key);
            out << (tau == report.overlap->kendall.end() ? std::string("-")
                                                         : fixed(tau->second, 3));
            out << " |\n";
        }
        if (!report.overlap->unique_evidence_fraction.empty()) {
            out << "\n| Condition | Unique evidence fraction |\n|---|---|\n";
            for (const auto& [condition, value] : report.overlap->unique_evidence_fraction) {
                out << "| " << condition << " | " << fixed(value, 3) << " |\n";
            }
        }
    }

    if (!report.domains.empty()) {
        out << "\n## Evidence domains (top 10 per condition)\n\n";
        out << "| Condition | Domain | Count |\n|---|---|---|\n";
        for (const auto& [condition, counts] : report.domains) {
            std::vector<std::pair<std::string, std::size_t>> rows(counts.begin(), counts.end());
            std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
            });
            if (rows.size() > 10) rows.resize(10);
            for (const auto& [domain, count] : rows) {
                out << "| " << condition << " | " << domain << " | " << count << " |\n";
            }
        }
    }

    if (report.refusals) {
        out << "\n## Refusals\n\n";
        out << "| Condition | Claims with Refusals | Document Refusal Rate |\n|---|---|---|\n";
        for (const auto& name : {"baseline", "negative", "objective", "positive"}) {
            const auto it = report.refusals->per_condition.find(name);
            if (it == report.refusals->per_condition.end()) continue;
            const auto& stats = it->second;
            out << "| " << name << " | " << stats.claims_with_refusals << "/"
                << stats.total_claims << " (" << fixed(100.0 * stats.claim_fraction, 1)
                << "%) | " << fixed(100.0 * stats.document_rate, 1) << "% |\n";
        }
        if (report.refusals->positive_to_baseline_ratio) {
            out << "\nPositive/baseline document refusal ratio: "
                << fixed(*report.refusals->positive_to_baseline_ratio, 1) << "\n";
        }
    }

    if (!report.averitec.empty()) {
        std::vector<double> thresholds;
        for (const auto& [threshold, value] :
             report.averitec.begin()->second.accuracy_at) {
            thresholds.push_back(threshold);
        }
        out << "\n## Legacy AVeriTeC scores\n\n";
        out << "| Method | Q-only | Q+A |";
        for (double t : thresholds) {
            out << " AVeriTeC (@" << fixed(t, 2) << ") |";
        }
        out << "\n|---|---|---|";
        for (std::size_t i = 0; i < thresholds.size(); ++i) out << "---|";
        out << "\n";
        for (const auto& system : order_systems(report.systems)) {
            const auto it = report.averitec.find(system);
            if (it == report.averitec.end()) continue;
            out << "| " << system << " | " << fixed(it->second.q_only, 3) << " | "
                << fixed(it->second.q_a, 3) << " |";
            for (double t : thresholds) {
                out << " " << fixed(it->second.accuracy_at.at(t), 3) << " |";
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string csv_escape(const std::string& value) {
    if (value.find_first_of(",\"\n") == std::string::npos) return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string render_csv(const AuditReport& report) {
    std::ostringstream out;
    out << "section,system,label,count,percentage\n";
    for (const auto& system : report.systems) {
        const auto& dist = report.distributions.at(system);
        for (auto label : corpus::kAllLabels) {
            out << "distribution," << system << "," << csv_escape(corpus::to_string(label))
                << "," << dist.counts.at(label) << "," << fixed(dist.percentages.at(label), 6)
                << "\n";
        }
    }

    if (!report.shifts.empty()) {
        out << "\nsection,reference,comparison,label,shift\n";
        for (const auto& shift : report.shifts) {
            for (auto label : corpus::kAllLabels) {
                out << "shift," << shift.reference_id << "," << shift.comparison_id << ","
                    << csv_escape(corpus::to_string(label)) << ","
                    << fixed(shift.shifts.at(label), 6) << "\n";
            }
        }
    }

    if (report.overlap) {
        out << "\nsection,pair,jaccard_evidence,jaccard_topk,kendall_tau\n";
        for (const auto& [key, value] : report.overlap->jaccard_evidence) {
            out << "overlap," << key.first << "|" << key.second << "," << fixed(value, 6)
                << ",";
            const auto topk = report.overlap->jaccard_topk.find(key);
            if (topk != report.overlap->jaccard_topk.end()) out << fixed(topk->second, 6);
            out << ",";
            const auto tau = report.overlap->kendall.find(key);
            if (tau != report.overlap->kendall.end()) out << fixed(tau->second, 6);
            out << "\n";
        }
    }

    if (report.refusals) {
        out << "\nsection,condition,claims_with_refusals,total_claims,claim_fraction,"
               "refusal_documents,total_documents,document_rate\n";
        for (const auto& [condition, stats] : report.refusals->per_condition) {
            out << "refusals," << condition << "," << stats.claims_with_refusals << ","
                << stats.total_claims << "," << fixed(stats.claim_fraction, 6) << ","
                << stats.refusal_documents << "," << stats.total_documents << ","
                << fixed(stats.document_rate, 6) << "\n";
        }
    }

    if (!report.averitec.empty()) {
        out << "\nsection,system,q_only,q_a";
        std::vector<double> thresholds;
        for (const auto& [threshold, value] :
             report.averitec.begin()->second.accuracy_at) {
            thresholds.push_back(threshold);
            out << ",accuracy_at_" << fixed(threshold, 2);
        }
        out << "\n";
        for (const auto& [system, score] : report.averitec) {
            out << "averitec," << system << "," << fixed(score.q_only, 6) << ","
                << fixed(score.q_a, 6);
            for (double t : thresholds) {
                out << "," << fixed(score.accuracy_at.at(t), 6);
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace

std::string render_report(const AuditReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Json: return report.to_json().dump(2) + "\n";
        case ReportFormat::Markdown: return render_markdown(report);
        case ReportFormat::Csv: return render_csv(report);
    }
    throw ConfigError("unknown report format");
}

AuditReport build_audit_report(const run_store::RunStore& store,
                               const std::vector<std::string>& run_ids,
                               gateway::Gateway& embedder, const EvalOptions& options) {
    AuditReport report;
    report.run_ids = run_ids;

    std::map<std::string, std::vector<pipeline::VerdictRecord>> verdicts;
    std::vector<pipeline::ConditionRun> condition_runs;
    for (const auto& run_id : run_ids) {
        for (const auto& system : store.systems(run_id)) {
            if (verdicts.count(system)) {
                throw DataError("system '" + system + "' appears in more than one run");
            }
            auto records = store.read_verdicts(run_id, system);
            if (options.exclude_annotated) {
                records = metrics::exclude_annotated(records);
            }
            verdicts[system] = std::move(records);
            const auto condition = hyde::parse_condition(system);
            if (condition && store.has_stage_artifacts(run_id, *condition)) {
                condition_runs.push_back(store.load_condition_run(run_id, *condition));
            }
        }
    }
    if (verdicts.empty()) {
        throw MissingArtifactsError("no verdict artifacts in the given runs");
    }

    {
        std::vector<std::string> names;
        for (const auto& [system, records] : verdicts) names.push_back(system);
        report.systems = order_systems(names);
    }
    for (const auto& [system, records] : verdicts) {
        report.distributions[system] = metrics::label_distribution(records);
    }

    const bool have_direct = verdicts.count("direct") > 0;
    const bool have_baseline = verdicts.count("baseline") > 0;
    if (have_direct && have_baseline) {
        report.shifts.push_back(metrics::distribution_shift(report.distributions.at("direct"),
                                                            report.distributions.at("baseline"),
                                                            "direct", "baseline"));
        report.agreement = metrics::agreement(verdicts.at("direct"), verdicts.at("baseline"));
        report.similarity = metrics::justification_similarity(verdicts.at("direct"),
                                                              verdicts.at("baseline"), embedder);
    }
    if (have_baseline) {
        for (const auto& system : report.systems) {
            if (system == "direct" || system == "baseline") continue;
            report.shifts.push_back(metrics::distribution_shift(
                report.distributions.at("baseline"), report.distributions.at(system),
                "baseline", system));
        }
    }

    if (!condition_runs.empty()) {
        report.overlap = metrics::overlap_report(condition_runs);
        report.domains = metrics::domain_distribution(condition_runs);
        report.refusals = metrics::refusal_stats(condition_runs);
    }

    if (!options.gold_path.empty()) {
        const auto gold = corpus::load_claim_set(options.gold_path, /*expect_gold=*/false);
        for (const auto& [system, records] : verdicts) {
            report.averitec[system] =
                metrics::averitec_scores(records, gold, options.thresholds);
        }
    }
    return report;
}

}  // namespace biascheck::report
