#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

namespace biascheck::prompts {

// Hypothetical-document templates, one per bias condition. `{claim}` is the
// only placeholder.
extern const std::string kHydeBaseline;
extern const std::string kHydePositive;
extern const std::string kHydeNegative;
extern const std::string kHydeObjective;

// Direct-prediction system prompt and the user-turn template.
extern const std::string kDirectSystem;
extern const std::string kDirectUser;

// Question-generation template: `{examples}` (few-shot block), `{claim}`,
// `{evidence}`.
extern const std::string kQuestionGen;
extern const std::string kQuestionGenExample;  // one few-shot entry: {claim}, {evidence}, {question}

// Veracity-prediction template: `{claim}`, `{qa}`.
extern const std::string kVeracity;

// Replaces each `{name}` placeholder with its value. Unknown placeholders are
// left untouched.
std::string render(std::string_view tmpl,
                   std::initializer_list<std::pair<std::string_view, std::string_view>> subs);

// name -> FNV digest of the template text; stored in run manifests so a run
// records exactly which prompt wording produced it.
nlohmann::json prompt_hashes();

}  // namespace biascheck::prompts
