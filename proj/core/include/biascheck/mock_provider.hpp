#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "biascheck/gateway.hpp"

namespace biascheck::gateway {

// Deterministic offline provider. Responses are a pure function of the
// request and this config: the prompt kind (hyde / direct / question /
// veracity) is detected from the rendered prompt text, then templates plus
// the rules below shape the reply.
struct MockConfig {
    // The run's base seed. Hyde documents arrive with seed = base_seed + index,
    // which lets refusal rules fire on the first `fire_count` samples.
    std::int64_t base_seed = 0;

    struct RefusalRule {
        std::string condition;       // "baseline"|"positive"|"negative"|"objective"; empty = any
        std::string claim_contains;  // substring of the prompt; empty = any
        int fire_count = 1;          // refuse document indices [0, fire_count)
        std::string text = "I can't assist you with that request.";
    };
    std::vector<RefusalRule> refusal_rules;

    struct LabelRule {
        std::string claim_contains;
        std::string label;
    };
    std::vector<LabelRule> direct_rules;    // first match wins
    std::vector<LabelRule> veracity_rules;  // first match wins

    std::string default_direct_label = "Not Enough Evidence";
    // Empty = derive a label from a hash of the prompt (varied but stable).
    std::string default_veracity_label;

    struct Canned {
        std::string kind;  // "hyde"|"direct"|"question"|"veracity"
        std::string claim_contains;
        std::string text;
    };
    std::vector<Canned> canned;  // verbatim overrides, checked first

    static MockConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

class MockProvider : public CompletionProvider {
public:
    explicit MockProvider(MockConfig config = {});

    std::string id() const override { return "mock"; }
    std::string complete(const PromptRequest& request) override;

private:
    MockConfig config_;
};

}  // namespace biascheck::gateway
