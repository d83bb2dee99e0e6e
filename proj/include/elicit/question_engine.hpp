#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/domain.hpp"
#include "elicit/provider.hpp"
#include "elicit/rng.hpp"

namespace elicit::engine {

inline constexpr std::size_t kBoardCapacity = 10;
inline constexpr std::size_t kRefillThreshold = 4;
inline constexpr std::size_t kInitialGenerated = 30;
inline constexpr std::size_t kFollowUpsPerAnnotation = 5;
inline constexpr std::size_t kReplenishBelow = 10;
inline constexpr std::size_t kReplenishCount = 10;
inline constexpr int kFallbackImportance = 3;

// The question store, partitioned by lifecycle. A question id lives in exactly
// one of these collections or on the board.
struct QuestionPool {
    std::vector<Question> generated_backlog;
    std::vector<Question> predefined_bank;
    std::vector<Question> answered_history;
    std::vector<Question> removed;
    SeededRng rng;
    std::uint64_t next_question_number = 1;

    friend bool operator==(const QuestionPool&, const QuestionPool&) = default;
};

struct DisplayBoard {
    std::vector<Question> slots;
    std::uint64_t version = 0;

    friend bool operator==(const DisplayBoard&, const DisplayBoard&) = default;
};

struct ThemeCounts {
    std::size_t answered = 0;
    std::size_t unanswered_bank = 0;

    friend bool operator==(const ThemeCounts&, const ThemeCounts&) = default;
};
using ThemeProgressCounts = std::array<ThemeCounts, kThemeCount>;

// answered: answered questions carrying the theme (predefined or generated).
// unanswered_bank: predefined questions of the theme still waiting in the bank.
ThemeProgressCounts theme_progress(const QuestionPool& pool);

// ---------------------------------------------------------------------------
// Scoring

using Similarity = std::function<double(std::string_view, std::string_view)>;

// Jaccard coefficient of the lowercased, punctuation-stripped word sets;
// two empty sets count as identical.
double default_similarity(std::string_view a, std::string_view b);

// 5 with no history, else clamp(round(5 - 4 * mean similarity), 1, 5).
int originality(const Question& question, const std::vector<Question>& answered_history,
                const Similarity& similarity = default_similarity);

// originality + recency + importance, in [3, 15].
int total_score(const Question& question);

struct ImportanceScore {
    int value = kFallbackImportance;
    bool degraded = false;
};

// One provider call; the parsed integer is clamped to [1, 5]. Provider
// failures and unreadable replies fall back to 3 with the degraded flag.
ImportanceScore importance(std::string_view question_text, std::string_view dataset_text, CompletionProvider& provider);

// ---------------------------------------------------------------------------
// Selection

// The k backlog questions with the highest total_score, best first. Ties are
// broken by a random key drawn per backlog question (in backlog order).
std::vector<Question> select_generated(const QuestionPool& pool, std::size_t k, SeededRng& rng);

// Repeatedly picks from the theme with the most questions left in the bank
// (ties between themes and within a theme broken by rng), recounting after
// every pick.
std::vector<Question> select_predefined(const std::vector<Question>& bank, std::size_t k, SeededRng& rng);

bool refill_enabled(const DisplayBoard& board) noexcept;

struct FillPlan {
    std::vector<Question> predefined;
    std::vector<Question> generated;
    SeededRng rng_after;
    bool insufficient = false;

    std::size_t size() const noexcept { return predefined.size() + generated.size(); }
};

// Splits the e = 10 - |slots| empty slots into floor(e/2) predefined and
// ceil(e/2) generated, covering any shortfall on one side from the other.
// Generated questions carry freshly computed originality. Pure.
FillPlan plan_fill(const DisplayBoard& board, const QuestionPool& pool,
                   const Similarity& similarity = default_similarity);

// ---------------------------------------------------------------------------
// State transitions. Each enforces the lifecycle and throws Error with
// UnknownQuestion or NotDisplayed.

void add_question(QuestionPool& pool, Question question);
void display_question(DisplayBoard& board, QuestionPool& pool, const std::string& id, int originality);
void remove_question(DisplayBoard& board, QuestionPool& pool, const std::string& id);
void mark_answered(DisplayBoard& board, QuestionPool& pool, const std::string& id);
// Recency of every pooled or displayed question drops by one, never below 1.
void decay_recency(DisplayBoard& board, QuestionPool& pool);

// Applies plan_fill. Returns the plan that was applied.
FillPlan fill_board(DisplayBoard& board, QuestionPool& pool, const Similarity& similarity = default_similarity);

// Where a question with this id currently is; nullopt when unknown.
std::optional<QuestionStatus> locate(const DisplayBoard& board, const QuestionPool& pool, const std::string& id);
const Question* find_question(const DisplayBoard& board, const QuestionPool& pool, const std::string& id);

std::string question_id(std::uint64_t number);

// ---------------------------------------------------------------------------
// Provider-backed generation. These never touch state; they return fully
// scored questions numbered from `first_number`.

struct GenerationContext {
    std::string dataset_text;
    std::vector<std::string> questions_all;
    std::vector<Annotation> annotations_all;
};

// Sends the prompt, parses `count` questions, retrying once with a repair
// prompt. Throws Error{MalformedProviderOutput} when the repair also fails;
// provider errors propagate.
std::vector<Question> generate_questions(CompletionProvider& provider, const CompletionRequest& request,
                                         std::size_t count, std::string_view dataset_text,
                                         std::uint64_t first_number,
                                         const std::optional<std::string>& trigger_annotation_id = std::nullopt);

std::vector<Question> generate_initial(CompletionProvider& provider, std::string_view dataset_text,
                                       std::uint64_t first_number);
std::vector<Question> generate_follow_ups(CompletionProvider& provider, const GenerationContext& context,
                                          const Annotation& annotation,
                                          const std::optional<std::string>& source_question,
                                          std::uint64_t first_number);
std::vector<Question> generate_replenishment(CompletionProvider& provider, const GenerationContext& context,
                                             std::uint64_t first_number);

// ---------------------------------------------------------------------------
// Composite operations over a pool and board held in memory.

struct PredefinedEntry {
    Theme theme = Theme::motivation;
    std::string text;

    friend bool operator==(const PredefinedEntry&, const PredefinedEntry&) = default;
};

// Seven themes with seven questions each, in theme order.
const std::vector<PredefinedEntry>& default_bank();
// JSON array of {"theme", "text"} records, order preserved. Throws
// Error{InvalidArgument} on an unknown theme or empty text.
std::vector<PredefinedEntry> parse_bank(std::string_view json_text);
std::string serialize_bank(const std::vector<PredefinedEntry>& bank);

std::vector<Question> make_bank_questions(const std::vector<PredefinedEntry>& bank, std::uint64_t first_number);

struct Bootstrapped {
    QuestionPool pool;
    DisplayBoard board;
};

// 30 generated questions (initial tier) plus the bank, then a full board.
// Nothing is returned unless generation succeeds.
Bootstrapped bootstrap(const Dataset& dataset, CompletionProvider& provider, const std::vector<PredefinedEntry>& bank,
                       std::uint64_t seed, std::size_t prompt_budget);

struct CommitOutcome {
    std::size_t follow_ups_added = 0;
    std::size_t replenished = 0;
    std::optional<ErrorCode> failure;
};

// Recency decay, then 5 follow-ups for the annotation, then 10 more when the
// backlog holds fewer than 10. Decay happens even when generation fails.
CommitOutcome on_annotation_committed(QuestionPool& pool, DisplayBoard& board, const Annotation& annotation,
                                      const GenerationContext& context,
                                      const std::optional<std::string>& source_question,
                                      CompletionProvider& provider);

} // namespace elicit::engine
