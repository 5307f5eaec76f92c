#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace biascheck::corpus {

// The four verdict categories of the AVeriTeC task.
enum class VerdictLabel {
    Supported,
    Refuted,
    NotEnoughEvidence,
    ConflictingEvidenceCherrypicking,
};

inline constexpr std::array<VerdictLabel, 4> kAllLabels = {
    VerdictLabel::Supported,
    VerdictLabel::Refuted,
    VerdictLabel::NotEnoughEvidence,
    VerdictLabel::ConflictingEvidenceCherrypicking,
};

// Canonical surface string ("Supported", "Refuted", "Not Enough Evidence",
// "Conflicting Evidence/Cherrypicking").
std::string to_string(VerdictLabel label);

// Case-insensitive parse after trimming. Accepts the canonical strings plus
// the "Cherry-picking" spelling variant. Returns nullopt for anything else.
std::optional<VerdictLabel> parse_label(std::string_view text);

struct GoldQa {
    std::string question;
    std::string answer;  // multiple gold answers are joined with a single space
};

struct Claim {
    std::string id;
    std::string text;
    std::optional<VerdictLabel> gold_label;
    std::optional<std::string> gold_justification;
    std::vector<GoldQa> gold_qa;
};

struct Provenance {
    std::string source_path;
    std::string split_name;
};

struct ClaimSet {
    std::vector<Claim> claims;
    Provenance provenance;

    std::size_t size() const { return claims.size(); }
    bool empty() const { return claims.empty(); }
};

struct KnowledgeDocument {
    std::string doc_id;
    std::string url;
    std::vector<std::string> sentences;
};

// Loads a line-delimited claims file. Records need `claim_id` (or the record
// ordinal is used) and a non-empty `claim`; `label`, `justification` and
// `questions` are picked up when present. With expect_gold set, a record
// without a label is an error.
ClaimSet load_claim_set(const std::filesystem::path& path, bool expect_gold = false);

// First min(n, size) claims and the remainder, in order.
std::pair<ClaimSet, ClaimSet> split_training(const ClaimSet& claims, std::size_t n);

// Writes the set back in the same line-delimited layout load_claim_set reads.
void save_claim_set(const ClaimSet& claims, const std::filesystem::path& path);

// Reads `<root>/<claim_id>.jsonl`. Records carry `url` and `url2text` (list of
// sentences); `doc_id` defaults to the record ordinal.
std::vector<KnowledgeDocument> load_knowledge_store(const std::filesystem::path& root,
                                                    const std::string& claim_id);

}  // namespace biascheck::corpus
