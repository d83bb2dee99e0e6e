#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/domain.hpp"

namespace elicit::prompts {

// Segment headings. Every rendered prompt is the role paragraph followed by
// "\n\n"-separated segments, each opening with one of these lines.
namespace heading {
inline constexpr std::string_view dataset = "### Dataset";
inline constexpr std::string_view questions_all = "### Questions used for annotation";
inline constexpr std::string_view annotations_all = "### Annotations";
inline constexpr std::string_view question_recent = "### Most recently annotated question";
inline constexpr std::string_view annotation_recent = "### Most recent annotation";
inline constexpr std::string_view question = "### Question";
inline constexpr std::string_view answer = "### Answer";
inline constexpr std::string_view existing_annotations = "### Existing annotations";
inline constexpr std::string_view candidate_annotation = "### Candidate annotation";
inline constexpr std::string_view theme = "### Theme";
inline constexpr std::string_view answered_questions = "### Answered questions";
inline constexpr std::string_view task = "### Task";
inline constexpr std::string_view output_format = "### Output format";
inline constexpr std::string_view repair = "### Repair";
} // namespace heading

inline constexpr std::string_view kNoRecentQuestion =
    "(none: the most recent annotation was added directly, not as an answer)";
inline constexpr std::string_view kNoExistingAnnotations = "(no existing annotations)";
inline constexpr std::string_view kGenericRejection =
    "The answer was not accepted. Please revise it so that it directly addresses the question.";

// Slot-based template. Slots are looked up in local_slots first, then
// global_slots; rendering an unbound slot throws Error{UnboundSlot}.
struct PromptTemplate {
    std::map<std::string, std::string> global_slots;
    std::map<std::string, std::string> local_slots;
    std::vector<std::string> composition;

    std::string render() const;
};

const std::string& role_text();
const std::string& task_t1_text();
const std::string& task_v1_text();

// Token budgets are approximated as characters / 4.
inline constexpr std::size_t kCharsPerToken = 4;

std::string render_role();
std::string render_T1(std::string_view dataset_text);
// Backlog replenishment: T1 structure with the already-asked questions and the
// annotations as extra context, asking for `count` further questions.
std::string render_replenish(std::string_view dataset_text, const std::vector<std::string>& questions_all,
                             const std::vector<Annotation>& annotations_all, std::size_t count);
std::string render_T2(std::string_view dataset_text, const std::vector<std::string>& questions_all,
                      const std::vector<Annotation>& annotations_all, const std::optional<std::string>& question_rec,
                      const Annotation& annotation_rec);
std::string render_V1(std::string_view question_text, std::string_view answer_text);
// Existing annotations are serialized most-recent-first and cut once the
// segment would exceed budget_tokens.
std::string render_V2(const std::vector<Annotation>& annotations_all, std::string_view candidate_text,
                      std::size_t budget_tokens);
std::string render_importance(std::string_view question_text, std::string_view dataset_text);

struct QuestionAnswer {
    std::string question;
    std::string answer;
};
std::string render_theme_summary(Theme theme, const std::vector<QuestionAnswer>& answered);
std::string render_report(std::string_view dataset_text, const std::vector<Annotation>& annotations_all,
                          std::size_t budget_tokens);
// The original prompt followed by the parse error and an instruction to emit
// only the structured block.
std::string render_repair(std::string_view original_prompt, std::string_view parse_error);

// One line per annotation, e.g. "#3 [columns 0,2] text".
std::string describe_annotation(const Annotation& annotation);
std::string describe_selection(const Selection& selection);

// Name, shape, column list with types and null counts, then the rows as
// delimited lines. Over budget, keeps the first and last R rows (largest R
// that fits) behind per-column summary statistics and an elision marker.
// Throws Error{BudgetTooSmall} when not even the header fits.
std::string serialize_dataset(const Dataset& dataset, std::size_t budget_tokens);

inline constexpr std::string_view kElisionMarker = "rows elided";

struct ParsedQuestion {
    std::string text;
    std::optional<Theme> theme;

    friend bool operator==(const ParsedQuestion&, const ParsedQuestion&) = default;
};

// Extracts the fenced JSON list (or the first bracketed list when prose wraps
// it). Throws Error{MalformedOutput} or Error{CountMismatch}.
std::vector<ParsedQuestion> parse_questions(std::string_view output, std::size_t expected_count);

struct ParsedVerdict {
    bool pass = false;
    std::string feedback;
};

// Throws Error{MalformedOutput}. A fail without feedback gets kGenericRejection.
ParsedVerdict parse_verdict(std::string_view output);

// First integer in the text, clamped to [1, 5]; nullopt when there is none.
std::optional<int> parse_importance(std::string_view output);

// Formats questions the way parse_questions expects them.
std::string format_questions_block(const std::vector<ParsedQuestion>& questions);
std::string format_verdict_block(bool pass, std::string_view feedback);

// Returns the body of the segment introduced by `heading` (up to the next
// heading line), or nullopt when absent.
std::optional<std::string> segment_body(std::string_view prompt, std::string_view heading);

} // namespace elicit::prompts
