#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biascheck/corpus.hpp"

namespace biascheck::gateway {
class Gateway;
}

namespace biascheck::hyde {

// Prompting strategy for hypothetical fact-checking document generation.
enum class BiasCondition { Baseline, Positive, Negative, Objective };

inline constexpr std::array<BiasCondition, 4> kAllConditions = {
    BiasCondition::Baseline,
    BiasCondition::Positive,
    BiasCondition::Negative,
    BiasCondition::Objective,
};

std::string to_string(BiasCondition condition);
std::optional<BiasCondition> parse_condition(std::string_view text);

struct HypotheticalDocument {
    std::string claim_id;
    BiasCondition condition = BiasCondition::Baseline;
    int index = 0;
    std::string text;
    bool refusal = false;
    // Set when generation failed after retries; text is empty in that case.
    std::optional<std::string> error;
};

// Matches refusal phrases case-insensitively within the first `window`
// characters. The default patterns cover the observed whole-output refusals.
class RefusalDetector {
public:
    RefusalDetector();
    RefusalDetector(std::vector<std::string> patterns, std::size_t window);

    bool operator()(std::string_view text) const;
    const std::vector<std::string>& patterns() const { return patterns_; }

private:
    std::vector<std::string> patterns_;
    std::size_t window_;
};

// Default-detector convenience entry point.
bool detect_refusal(std::string_view text);

// The condition's template with the claim text substituted after "Claim:",
// terminated by "Passage:".
std::string render_hyde_prompt(BiasCondition condition, const corpus::Claim& claim);

struct GenerationOptions {
    std::string model_id = "mock";
    int max_tokens = 512;
    double temperature = 0.0;
    std::int64_t base_seed = 0;  // document i is sampled with seed base_seed + i
    const RefusalDetector* detector = nullptr;  // nullptr: default patterns
};

// Generates m documents for (claim, condition). Generation failures after the
// gateway's retry budget yield a document with empty text and an error
// annotation; the run continues.
std::vector<HypotheticalDocument> generate_hypothetical(const corpus::Claim& claim,
                                                        BiasCondition condition, int m,
                                                        gateway::Gateway& gateway,
                                                        const GenerationOptions& options = {});

}  // namespace biascheck::hyde
