#include "biascheck/hyde.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "biascheck/errors.hpp"
#include "biascheck/gateway.hpp"
#include "biascheck/prompts.hpp"

namespace biascheck::hyde {

std::string to_string(BiasCondition condition) {
    switch (condition) {
        case BiasCondition::Baseline: return "baseline";
        case BiasCondition::Positive: return "positive";
        case BiasCondition::Negative: return "negative";
        case BiasCondition::Objective: return "objective";
    }
    return "baseline";
}

std::optional<BiasCondition> parse_condition(std::string_view text) {
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "baseline") return BiasCondition::Baseline;
    if (key == "positive") return BiasCondition::Positive;
    if (key == "negative") return BiasCondition::Negative;
    if (key == "objective") return BiasCondition::Objective;
    return std::nullopt;
}

RefusalDetector::RefusalDetector()
    : RefusalDetector(
          {
              "I am unable to",
              "I cannot",
              "I can't provide",
              "I can't assist",
              "I can't help",
          },
          200) {}

RefusalDetector::RefusalDetector(std::vector<std::string> patterns, std::size_t window)
    : patterns_(std::move(patterns)), window_(window) {}

namespace {

std::string ascii_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

bool RefusalDetector::operator()(std::string_view text) const {
    const std::string head = ascii_lower(text.substr(0, window_));
    for (const auto& pattern : patterns_) {
        if (head.find(ascii_lower(pattern)) != std::string::npos) {
            return true;
        }
    }
    return false;
}

bool detect_refusal(std::string_view text) {
    static const RefusalDetector detector;
    return detector(text);
}

std::string render_hyde_prompt(BiasCondition condition, const corpus::Claim& claim) {
    const std::string* tmpl = nullptr;
    switch (condition) {
        case BiasCondition::Baseline: tmpl = &prompts::kHydeBaseline; break;
        case BiasCondition::Positive: tmpl = &prompts::kHydePositive; break;
        case BiasCondition::Negative: tmpl = &prompts::kHydeNegative; break;
        case BiasCondition::Objective: tmpl = &prompts::kHydeObjective; break;
    }
    return prompts::render(*tmpl, {{"claim", claim.text}});
}

std::vector<HypotheticalDocument> generate_hypothetical(const corpus::Claim& claim,
                                                        BiasCondition condition, int m,
                                                        gateway::Gateway& gateway,
                                                        const GenerationOptions& options) {
    if (m < 1) {
        throw std::invalid_argument("generate_hypothetical: m must be >= 1");
    }
    static const RefusalDetector default_detector;
    const RefusalDetector& detector = options.detector ? *options.detector : default_detector;

    const std::string prompt = render_hyde_prompt(condition, claim);
    std::vector<HypotheticalDocument> docs;
    docs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        gateway::PromptRequest request;
        request.user_text = prompt;
        request.max_tokens = options.max_tokens;
        request.temperature = options.temperature;
        request.seed = options.base_seed + i;
        request.model_id = options.model_id;

        HypotheticalDocument doc;
        doc.claim_id = claim.id;
        doc.condition = condition;
        doc.index = i;
        try {
            doc.text = gateway.complete(request).text;
        } catch (const Error& e) {
            doc.text.clear();
            doc.error = e.what();
        }
        doc.refusal = detector(doc.text);
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace biascheck::hyde
