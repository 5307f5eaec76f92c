#include "biascheck/prompts.hpp"

#include "biascheck/hashing.hpp"

namespace biascheck::prompts {

const std::string kHydeBaseline =
    "Please write a fact-checking article passage to support, refute, indicate not enough "
    "evidence, or present conflicting evidence regarding the claim.\n"
    "Claim: {claim}\n"
    "Passage:";

const std::string kHydePositive =
    "Please write a fact-checking article passage that SUPPORTS the following claim, "
    "highlighting evidence in favor of it.\n"
    "Claim: {claim}\n"
    "Passage:";

const std::string kHydeNegative =
    "Please write a fact-checking article passage that REFUTES the following claim, "
    "highlighting evidence against it.\n"
    "Claim: {claim}\n"
    "Passage:";

const std::string kHydeObjective =
    "Please write an objective fact-checking article passage about the following claim, "
    "presenting a balanced view of evidence both for and against it.\n"
    "Claim: {claim}\n"
    "Passage:";

const std::string kDirectSystem =
    "You are a fact-checking assistant. Your task is to predict the verdict of a claim based "
    "on your knowledge.\n"
    "\n"
    "First, generate 3 relevant questions that would help verify this claim.\n"
    "\n"
    "Then, provide detailed answers to these questions using your knowledge.\n"
    "\n"
    "Finally, determine if the claim is: 'Supported', 'Refuted', 'Not Enough Evidence', or "
    "'Conflicting Evidence/Cherrypicking'.\n"
    "\n"
    "Structure your response exactly as follows:\n"
    "\n"
    "=== Questions and Answers ===\n"
    "Q1: [First question about the claim]\n"
    "A1: [Your detailed answer to Q1]\n"
    "Q2: [Second question about the claim]\n"
    "A2: [Your detailed answer to Q2]\n"
    "Q3: [Third question about the claim]\n"
    "A3: [Your detailed answer to Q3]\n"
    "\n"
    "=== Verdict ===\n"
    "justification: [Your step-by-step reasoning based on the Q&A]\n"
    "verdict: [Your final verdict - one of 'Supported', 'Refuted', 'Not Enough Evidence', or "
    "'Conflicting Evidence/Cherrypicking']";

const std::string kDirectUser = "Claim: {claim}";

const std::string kQuestionGen =
    "You write clarifying questions for fact-checking. Given a claim and an evidence "
    "sentence, write one question about the claim that the evidence sentence answers. Reply "
    "with the question only.\n"
    "\n"
    "{examples}"
    "Claim: {claim}\n"
    "Evidence: {evidence}\n"
    "Question:";

const std::string kQuestionGenExample =
    "Claim: {claim}\n"
    "Evidence: {evidence}\n"
    "Question: {question}\n"
    "\n";

const std::string kVeracity =
    "You are a fact-checking assistant. Decide whether the claim is 'Supported', 'Refuted', "
    "'Not Enough Evidence', or 'Conflicting Evidence/Cherrypicking' based on the "
    "question-answer evidence below.\n"
    "\n"
    "Claim: {claim}\n"
    "\n"
    "{qa}\n"
    "Structure your response exactly as follows:\n"
    "justification: [Your reasoning based on the evidence]\n"
    "verdict: [One of 'Supported', 'Refuted', 'Not Enough Evidence', or 'Conflicting "
    "Evidence/Cherrypicking']";

std::string render(std::string_view tmpl,
                   std::initializer_list<std::pair<std::string_view, std::string_view>> subs) {
    std::string out(tmpl);
    for (const auto& [name, value] : subs) {
        const std::string placeholder = "{" + std::string(name) + "}";
        std::size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

nlohmann::json prompt_hashes() {
    return nlohmann::json{
        {"hyde_baseline", hashing::digest_hex(kHydeBaseline)},
        {"hyde_positive", hashing::digest_hex(kHydePositive)},
        {"hyde_negative", hashing::digest_hex(kHydeNegative)},
        {"hyde_objective", hashing::digest_hex(kHydeObjective)},
        {"direct_system", hashing::digest_hex(kDirectSystem)},
        {"direct_user", hashing::digest_hex(kDirectUser)},
        {"question_gen", hashing::digest_hex(kQuestionGen)},
        {"question_gen_example", hashing::digest_hex(kQuestionGenExample)},
        {"veracity", hashing::digest_hex(kVeracity)},
    };
}

}  // namespace biascheck::prompts
