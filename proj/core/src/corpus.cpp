#include "biascheck/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "biascheck/errors.hpp"
#include "biascheck/jsonl.hpp"

namespace biascheck::corpus {

namespace {

std::string lower_trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    std::string out(text.substr(begin, end - begin));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string to_string(VerdictLabel label) {
    switch (label) {
        case VerdictLabel::Supported: return "Supported";
        case VerdictLabel::Refuted: return "Refuted";
        case VerdictLabel::NotEnoughEvidence: return "Not Enough Evidence";
        case VerdictLabel::ConflictingEvidenceCherrypicking:
            return "Conflicting Evidence/Cherrypicking";
    }
    return "Supported";
}

std::optional<VerdictLabel> parse_label(std::string_view text) {
    const std::string key = lower_trim(text);
    if (key == "supported") return VerdictLabel::Supported;
    if (key == "refuted") return VerdictLabel::Refuted;
    if (key == "not enough evidence") return VerdictLabel::NotEnoughEvidence;
    // Both spellings occur in the wild.
    if (key == "conflicting evidence/cherrypicking" ||
        key == "conflicting evidence/cherry-picking") {
        return VerdictLabel::ConflictingEvidenceCherrypicking;
    }
    return std::nullopt;
}

namespace {

Claim parse_claim_record(const nlohmann::json& record, std::size_t line_no,
                         const std::filesystem::path& path, bool expect_gold) {
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (!record.is_object()) {
        throw DataError(where + ": record is not an object");
    }

    Claim claim;
    if (record.contains("claim_id")) {
        const auto& id = record.at("claim_id");
        claim.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
        claim.id = std::to_string(line_no - 1);  // record ordinal
    }

    if (!record.contains("claim") || !record.at("claim").is_string()) {
        throw DataError(where + ": missing claim text");
    }
    claim.text = record.at("claim").get<std::string>();
    if (claim.text.empty()) {
        throw DataError(where + ": empty claim text");
    }

    if (record.contains("label") && !record.at("label").is_null()) {
        const std::string raw = record.at("label").get<std::string>();
        auto parsed = parse_label(raw);
        if (!parsed) {
            throw DataError(where + ": unrecognized label '" + raw + "'");
        }
        claim.gold_label = *parsed;
    } else if (expect_gold) {
        throw DataError(where + ": record lacks gold label");
    }

    if (record.contains("justification") && record.at("justification").is_string()) {
        claim.gold_justification = record.at("justification").get<std::string>();
    }

    if (record.contains("questions") && record.at("questions").is_array()) {
        for (const auto& q : record.at("questions")) {
            GoldQa qa;
            qa.question = q.value("question", std::string{});
            if (q.contains("answers") && q.at("answers").is_array()) {
                for (const auto& ans : q.at("answers")) {
                    const std::string text = ans.value("answer", std::string{});
                    if (text.empty()) continue;
                    if (!qa.answer.empty()) qa.answer += ' ';
                    qa.answer += text;
                }
            }
            if (!qa.question.empty()) {
                claim.gold_qa.push_back(std::move(qa));
            }
        }
    }
    return claim;
}

}  // namespace

ClaimSet load_claim_set(const std::filesystem::path& path, bool expect_gold) {
    if (!std::filesystem::exists(path)) {
        throw DataError("claims file not found: " + path.string());
    }

    ClaimSet set;
    set.provenance = {path.string(), path.stem().string()};
    std::unordered_set<std::string> seen_ids;

    jsonl::for_each_record(path, [&](std::size_t line_no, const nlohmann::json& record) {
        Claim claim = parse_claim_record(record, line_no, path, expect_gold);
        if (!seen_ids.insert(claim.id).second) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": duplicate claim id '" + claim.id + "'");
        }
        set.claims.push_back(std::move(claim));
    });

    if (set.claims.empty()) {
        throw DataError("no claims in " + path.string());
    }
    return set;
}

std::pair<ClaimSet, ClaimSet> split_training(const ClaimSet& claims, std::size_t n) {
    const std::size_t cut = std::min(n, claims.claims.size());
    ClaimSet head;
    ClaimSet tail;
    head.provenance = {claims.provenance.source_path, claims.provenance.split_name + "[:head]"};
    tail.provenance = {claims.provenance.source_path, claims.provenance.split_name + "[tail:]"};
    head.claims.assign(claims.claims.begin(), claims.claims.begin() + static_cast<std::ptrdiff_t>(cut));
    tail.claims.assign(claims.claims.begin() + static_cast<std::ptrdiff_t>(cut), claims.claims.end());
    return {std::move(head), std::move(tail)};
}

void save_claim_set(const ClaimSet& claims, const std::filesystem::path& path) {
    jsonl::Writer out(path);
    for (const auto& claim : claims.claims) {
        nlohmann::json record{{"claim_id", claim.id}, {"claim", claim.text}};
        if (claim.gold_label) {
            record["label"] = to_string(*claim.gold_label);
        }
        if (claim.gold_justification) {
            record["justification"] = *claim.gold_justification;
        }
        if (!claim.gold_qa.empty()) {
            nlohmann::json questions = nlohmann::json::array();
            for (const auto& qa : claim.gold_qa) {
                questions.push_back(
                    {{"question", qa.question},
                     {"answers", nlohmann::json::array({{{"answer", qa.answer}}})}});
            }
            record["questions"] = questions;
        }
        out.write(record);
    }
}

std::vector<KnowledgeDocument> load_knowledge_store(const std::filesystem::path& root,
                                                    const std::string& claim_id) {
    const std::filesystem::path path = root / (claim_id + ".jsonl");
    if (!std::filesystem::exists(path)) {
        throw DataError("knowledge store file missing for claim '" + claim_id +
                        "': " + path.string());
    }

    std::vector<KnowledgeDocument> docs;
    std::unordered_set<std::string> seen_ids;
    jsonl::for_each_record(path, [&](std::size_t line_no, const nlohmann::json& record) {
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (!record.is_object()) {
            throw DataError(where + ": record is not an object");
        }
        KnowledgeDocument doc;
        doc.doc_id = record.contains("doc_id") ? record.at("doc_id").get<std::string>()
                                               : std::to_string(docs.size());
        if (!seen_ids.insert(doc.doc_id).second) {
            throw DataError(where + ": duplicate doc_id '" + doc.doc_id + "'");
        }
        doc.url = record.value("url", std::string{});
        if (record.contains("url2text")) {
            const auto& sentences = record.at("url2text");
            if (!sentences.is_array()) {
                throw DataError(where + ": url2text is not a list");
            }
            for (const auto& s : sentences) {
                if (!s.is_string()) {
                    throw DataError(where + ": url2text entry is not a string");
                }
                doc.sentences.push_back(s.get<std::string>());
            }
        }
        docs.push_back(std::move(doc));
    });
    return docs;
}

}  // namespace biascheck::corpus
