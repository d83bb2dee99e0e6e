#include "elicit/validation.hpp"

#include "elicit/error.hpp"
#include "elicit/prompts.hpp"

namespace elicit::validation {

namespace {

prompts::ParsedVerdict ask(CompletionProvider& provider, Purpose purpose, const std::string& prompt) {
    CompletionRequest request{Tier::standard, prompt, purpose};
    try {
        return prompts::parse_verdict(provider.complete(request));
    } catch (const Error& first) {
        if (first.code() != ErrorCode::MalformedOutput) throw;
        request.prompt = prompts::render_repair(prompt, first.what());
        try {
            return prompts::parse_verdict(provider.complete(request));
        } catch (const Error& second) {
            if (second.code() != ErrorCode::MalformedOutput) throw;
            throw Error(ErrorCode::MalformedProviderOutput, second.what());
        }
    }
}

} // namespace

ValidationResult validate_answer(const Question& question, std::string_view answer_text,
                                 const std::vector<Annotation>& annotations, CompletionProvider& provider,
                                 std::size_t existing_budget_tokens) {
    if (answer_text.empty()) throw Error(ErrorCode::InvalidArgument, "answer text is empty");
    const auto faithful =
        ask(provider, Purpose::faithfulness, prompts::render_V1(question.text, answer_text));
    if (!faithful.pass) return ValidationResult::reject(ValidationStage::faithfulness, faithful.feedback);
    const auto consistent = ask(provider, Purpose::contradiction,
                                prompts::render_V2(annotations, answer_text, existing_budget_tokens));
    if (!consistent.pass) return ValidationResult::reject(ValidationStage::contradiction, consistent.feedback);
    return ValidationResult::accept();
}

Selection answer_selection(const Question& question, const std::vector<Annotation>& annotations) {
    if (question.trigger_annotation_id) {
        for (const auto& a : annotations) {
            if (a.id == *question.trigger_annotation_id && !a.is_general()) return a.selection;
        }
    }
    return Selection::whole_dataset();
}

} // namespace elicit::validation
