#include "biascheck/mock_provider.hpp"

#include <array>
#include <string_view>

#include "biascheck/hashing.hpp"

namespace biascheck::gateway {

namespace {

enum class PromptKind { HydeBaseline, HydePositive, HydeNegative, HydeObjective,
                        Direct, Question, Veracity, Unknown };

PromptKind detect_kind(const PromptRequest& request) {
    const std::string_view user = request.user_text;
    if (request.system_text &&
        request.system_text->find("predict the verdict of a claim based on your knowledge") !=
            std::string::npos) {
        return PromptKind::Direct;
    }
    if (user.find("SUPPORTS the following claim") != std::string_view::npos) {
        return PromptKind::HydePositive;
    }
    if (user.find("REFUTES the following claim") != std::string_view::npos) {
        return PromptKind::HydeNegative;
    }
    if (user.find("objective fact-checking article passage") != std::string_view::npos) {
        return PromptKind::HydeObjective;
    }
    if (user.find("to support, refute, indicate not enough evidence") != std::string_view::npos) {
        return PromptKind::HydeBaseline;
    }
    if (user.find("write one question about the claim") != std::string_view::npos) {
        return PromptKind::Question;
    }
    if (user.find("based on the question-answer evidence below") != std::string_view::npos) {
        return PromptKind::Veracity;
    }
    return PromptKind::Unknown;
}

std::string condition_name(PromptKind kind) {
    switch (kind) {
        case PromptKind::HydeBaseline: return "baseline";
        case PromptKind::HydePositive: return "positive";
        case PromptKind::HydeNegative: return "negative";
        case PromptKind::HydeObjective: return "objective";
        default: return {};
    }
}

std::string kind_name(PromptKind kind) {
    switch (kind) {
        case PromptKind::HydeBaseline:
        case PromptKind::HydePositive:
        case PromptKind::HydeNegative:
        case PromptKind::HydeObjective: return "hyde";
        case PromptKind::Direct: return "direct";
        case PromptKind::Question: return "question";
        case PromptKind::Veracity: return "veracity";
        default: return "unknown";
    }
}

// The line following the last "Claim:" marker (the few-shot block of the
// question prompt also contains earlier ones).
std::string extract_claim(std::string_view user_text) {
    const auto pos = user_text.rfind("Claim: ");
    if (pos == std::string_view::npos) return {};
    const auto start = pos + 7;
    const auto end = user_text.find('\n', start);
    return std::string(user_text.substr(start, end == std::string_view::npos ? end : end - start));
}

std::string extract_evidence(std::string_view user_text) {
    const auto pos = user_text.rfind("Evidence: ");
    if (pos == std::string_view::npos) return {};
    const auto start = pos + 10;
    const auto end = user_text.find('\n', start);
    return std::string(user_text.substr(start, end == std::string_view::npos ? end : end - start));
}

constexpr std::array<std::string_view, 4> kLabels = {
    "Supported", "Refuted", "Not Enough Evidence", "Conflicting Evidence/Cherrypicking"};

std::string pick_label(const std::vector<MockConfig::LabelRule>& rules,
                       std::string_view user_text, const std::string& fallback) {
    for (const auto& rule : rules) {
        if (rule.claim_contains.empty() ||
            user_text.find(rule.claim_contains) != std::string_view::npos) {
            return rule.label;
        }
    }
    if (!fallback.empty()) return fallback;
    return std::string(kLabels[hashing::fnv1a64(user_text) % kLabels.size()]);
}

std::string first_words(const std::string& text, std::size_t n) {
    std::size_t count = 0;
    std::size_t i = 0;
    bool in_word = false;
    for (; i < text.size(); ++i) {
        const bool space = text[i] == ' ';
        if (!space && !in_word) {
            in_word = true;
            ++count;
        } else if (space && in_word) {
            in_word = false;
            if (count >= n) break;
        }
    }
    return text.substr(0, i);
}

std::string direct_response(const std::string& claim, const std::string& label) {
    const std::string topic = first_words(claim, 6);
    std::string out;
    out += "=== Questions and Answers ===\n";
    out += "Q1: What primary sources document the claim that " + topic + "?\n";
    out += "A1: Reference material on " + topic +
           " does not cite a primary source for this statement.\n";
    out += "Q2: Have independent fact-checkers examined whether " + topic + "?\n";
    out += "A2: Published fact-checks discuss related statements without settling this one.\n";
    out += "Q3: Is there contemporaneous reporting that corroborates the claim?\n";
    out += "A3: Contemporaneous reporting neither confirms nor clearly contradicts it.\n";
    out += "\n";
    out += "=== Verdict ===\n";
    out += "justification: Based on the Q&A, the available knowledge is not decisive about "
           "the claim.\n";
    out += "verdict: " + label;
    return out;
}

}  // namespace

MockConfig MockConfig::from_json(const nlohmann::json& j) {
    MockConfig c;
    c.base_seed = j.value("base_seed", static_cast<std::int64_t>(0));
    for (const auto& r : j.value("refusal_rules", nlohmann::json::array())) {
        RefusalRule rule;
        rule.condition = r.value("condition", std::string{});
        rule.claim_contains = r.value("claim_contains", std::string{});
        rule.fire_count = r.value("fire_count", 1);
        rule.text = r.value("text", rule.text);
        c.refusal_rules.push_back(std::move(rule));
    }
    auto load_label_rules = [&](const char* key, std::vector<LabelRule>& out) {
        for (const auto& r : j.value(key, nlohmann::json::array())) {
            out.push_back({r.value("claim_contains", std::string{}),
                           r.value("label", std::string{})});
        }
    };
    load_label_rules("direct_rules", c.direct_rules);
    load_label_rules("veracity_rules", c.veracity_rules);
    c.default_direct_label = j.value("default_direct_label", c.default_direct_label);
    c.default_veracity_label = j.value("default_veracity_label", c.default_veracity_label);
    for (const auto& r : j.value("canned", nlohmann::json::array())) {
        c.canned.push_back({r.value("kind", std::string{}),
                            r.value("claim_contains", std::string{}),
                            r.value("text", std::string{})});
    }
    return c;
}

nlohmann::json MockConfig::to_json() const {
    nlohmann::json j;
    j["base_seed"] = base_seed;
    j["refusal_rules"] = nlohmann::json::array();
    for (const auto& r : refusal_rules) {
        j["refusal_rules"].push_back({{"condition", r.condition},
                                      {"claim_contains", r.claim_contains},
                                      {"fire_count", r.fire_count},
                                      {"text", r.text}});
    }
    auto dump_label_rules = [](const std::vector<LabelRule>& rules) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rules) {
            arr.push_back({{"claim_contains", r.claim_contains}, {"label", r.label}});
        }
        return arr;
    };
    j["direct_rules"] = dump_label_rules(direct_rules);
    j["veracity_rules"] = dump_label_rules(veracity_rules);
    j["default_direct_label"] = default_direct_label;
    j["default_veracity_label"] = default_veracity_label;
    j["canned"] = nlohmann::json::array();
    for (const auto& r : canned) {
        j["canned"].push_back(
            {{"kind", r.kind}, {"claim_contains", r.claim_contains}, {"text", r.text}});
    }
    return j;
}

MockProvider::MockProvider(MockConfig config) : config_(std::move(config)) {}

std::string MockProvider::complete(const PromptRequest& request) {
    const PromptKind kind = detect_kind(request);
    const std::string claim = extract_claim(request.user_text);

    for (const auto& c : config_.canned) {
        if (c.kind == kind_name(kind) &&
            (c.claim_contains.empty() ||
             request.user_text.find(c.claim_contains) != std::string::npos)) {
            return c.text;
        }
    }

    switch (kind) {
        case PromptKind::HydeBaseline:
        case PromptKind::HydePositive:
        case PromptKind::HydeNegative:
        case PromptKind::HydeObjective: {
            const std::string condition = condition_name(kind);
            const std::int64_t index = request.seed ? *request.seed - config_.base_seed : 0;
            for (const auto& rule : config_.refusal_rules) {
                if (!rule.condition.empty() && rule.condition != condition) continue;
                if (!rule.claim_contains.empty() &&
                    request.user_text.find(rule.claim_contains) == std::string::npos) {
                    continue;
                }
                if (index >= 0 && index < rule.fire_count) {
                    return rule.text;
                }
            }
            const auto salt = hashing::to_hex(
                hashing::fnv1a64(request.user_text,
                                 static_cast<std::uint64_t>(index) + hashing::kFnvOffset));
            std::string lead;
            if (kind == PromptKind::HydePositive) {
                lead = "Evidence in favor: ";
            } else if (kind == PromptKind::HydeNegative) {
                lead = "Contrary to the claim, ";
            } else if (kind == PromptKind::HydeObjective) {
                lead = "Examining both sides, ";
            } else {
                lead = "Fact-checking the claim, ";
            }
            return lead + "reports about " + claim + " mention document marker " +
                   salt.substr(0, 8) + " among the sources reviewed.";
        }
        case PromptKind::Direct:
            return direct_response(claim, pick_label(config_.direct_rules, request.user_text,
                                                     config_.default_direct_label));
        case PromptKind::Question: {
            const std::string evidence = extract_evidence(request.user_text);
            return "Does the report that \"" + first_words(evidence, 8) +
                   "\" bear on the claim that " + first_words(claim, 6) + "?";
        }
        case PromptKind::Veracity: {
            const std::string label = pick_label(config_.veracity_rules, request.user_text,
                                                 config_.default_veracity_label);
            return "justification: The question-answer evidence, taken together, points to "
                   "this verdict for the claim.\nverdict: " +
                   label;
        }
        case PromptKind::Unknown:
            break;
    }
    return "Mock response for: " + first_words(request.user_text, 8);
}

}  // namespace biascheck::gateway
