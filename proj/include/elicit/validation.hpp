#pragma once

#include <string_view>
#include <vector>

#include "elicit/domain.hpp"
#include "elicit/provider.hpp"

namespace elicit::validation {

inline constexpr std::size_t kDefaultExistingBudget = 8000;

// Stage 1 checks the answer against the question; stage 2, run only when
// stage 1 passes, checks the candidate against the existing annotations.
// Provider failures propagate as Error and are never turned into a rejection.
// A verdict that cannot be parsed gets one repair attempt before
// Error{MalformedProviderOutput}.
ValidationResult validate_answer(const Question& question, std::string_view answer_text,
                                 const std::vector<Annotation>& annotations, CompletionProvider& provider,
                                 std::size_t existing_budget_tokens = kDefaultExistingBudget);

// Selection given to the annotation produced by an accepted answer: the
// trigger annotation's selection when that one is data-specific, else the
// whole dataset.
Selection answer_selection(const Question& question, const std::vector<Annotation>& annotations);

} // namespace elicit::validation
