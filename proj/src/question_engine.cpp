#include "elicit/question_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "elicit/error.hpp"
#include "elicit/prompts.hpp"

namespace elicit::engine {

ThemeProgressCounts theme_progress(const QuestionPool& pool) {
    ThemeProgressCounts counts{};
    for (const auto& q : pool.answered_history) {
        if (q.theme) ++counts[index_of(*q.theme)].answered;
    }
    for (const auto& q : pool.predefined_bank) {
        if (q.theme) ++counts[index_of(*q.theme)].unanswered_bank;
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

std::set<std::string> word_set(std::string_view text) {
    std::set<std::string> words;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            words.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.insert(std::move(current));
    return words;
}

} // namespace

double default_similarity(std::string_view a, std::string_view b) {
    const auto wa = word_set(a);
    const auto wb = word_set(b);
    if (wa.empty() && wb.empty()) return 1.0;
    std::size_t common = 0;
    for (const auto& w : wa) common += wb.count(w);
    return static_cast<double>(common) / static_cast<double>(wa.size() + wb.size() - common);
}

int originality(const Question& question, const std::vector<Question>& answered_history, const Similarity& similarity) {
    if (answered_history.empty()) return kMaxScore;
    double sum = 0;
    for (const auto& h : answered_history) sum += similarity(question.text, h.text);
    const double mean = sum / static_cast<double>(answered_history.size());
    const auto value = static_cast<int>(std::lround(5.0 - 4.0 * mean));
    return std::clamp(value, kMinScore, kMaxScore);
}

int total_score(const Question& question) {
    return question.originality + question.recency + question.importance;
}

ImportanceScore importance(std::string_view question_text, std::string_view dataset_text, CompletionProvider& provider) {
    CompletionRequest request{Tier::standard, prompts::render_importance(question_text, dataset_text),
                              Purpose::importance};
    try {
        if (auto value = prompts::parse_importance(provider.complete(request))) return {*value, false};
    } catch (const Error& e) {
        if (!is_provider_failure(e.code())) throw;
    }
    return {kFallbackImportance, true};
}

// ---------------------------------------------------------------------------
// Selection

std::vector<Question> select_generated(const QuestionPool& pool, std::size_t k, SeededRng& rng) {
    const auto& backlog = pool.generated_backlog;
    if (k == 0 || backlog.empty()) return {};
    struct Ranked {
        int score;
        std::uint64_t key;
        std::size_t index;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(backlog.size());
    for (std::size_t i = 0; i < backlog.size(); ++i) ranked.push_back({total_score(backlog[i]), rng.next(), i});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.key != b.key) return a.key < b.key;
        return a.index < b.index;
    });
    std::vector<Question> out;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(backlog[ranked[i].index]);
    return out;
}

std::vector<Question> select_predefined(const std::vector<Question>& bank, std::size_t k, SeededRng& rng) {
    std::vector<Question> remaining = bank;
    std::vector<Question> out;
    while (out.size() < k && !remaining.empty()) {
        std::array<std::size_t, kThemeCount> counts{};
        for (const auto& q : remaining) {
            if (q.theme) ++counts[index_of(*q.theme)];
        }
        const auto best = *std::max_element(counts.begin(), counts.end());
        if (best == 0) break;
        std::vector<Theme> tied;
        for (auto theme : kAllThemes) {
            if (counts[index_of(theme)] == best) tied.push_back(theme);
        }
        const Theme theme = tied.size() == 1 ? tied.front() : tied[rng.below(tied.size())];
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            if (remaining[i].theme == theme) members.push_back(i);
        }
        const std::size_t pick = members.size() == 1 ? members.front() : members[rng.below(members.size())];
        out.push_back(remaining[pick]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return out;
}

bool refill_enabled(const DisplayBoard& board) noexcept {
    return board.slots.size() <= kRefillThreshold;
}

FillPlan plan_fill(const DisplayBoard& board, const QuestionPool& pool, const Similarity& similarity) {
    FillPlan plan;
    plan.rng_after = pool.rng;
    const std::size_t empty = board.slots.size() >= kBoardCapacity ? 0 : kBoardCapacity - board.slots.size();
    const std::size_t want_predefined = empty / 2;
    std::size_t want_generated = empty - want_predefined;

    plan.predefined = select_predefined(pool.predefined_bank, want_predefined, plan.rng_after);
    want_generated += want_predefined - plan.predefined.size();

    QuestionPool scored = pool;
    for (auto& q : scored.generated_backlog) q.originality = originality(q, pool.answered_history, similarity);
    plan.generated = select_generated(scored, want_generated, plan.rng_after);

    if (plan.generated.size() < want_generated) {
        std::vector<Question> rest;
        for (const auto& q : pool.predefined_bank) {
            const bool taken = std::any_of(plan.predefined.begin(), plan.predefined.end(),
                                           [&](const Question& p) { return p.id == q.id; });
            if (!taken) rest.push_back(q);
        }
        auto extra = select_predefined(rest, want_generated - plan.generated.size(), plan.rng_after);
        plan.predefined.insert(plan.predefined.end(), extra.begin(), extra.end());
    }
    plan.insufficient = plan.size() < empty;
    return plan;
}

// ---------------------------------------------------------------------------
// State transitions

namespace {

using Bucket = std::vector<Question>;

Bucket::iterator find_in(Bucket& bucket, const std::string& id) {
    return std::find_if(bucket.begin(), bucket.end(), [&](const Question& q) { return q.id == id; });
}

Question take_from_board(DisplayBoard& board, const QuestionPool& pool, const std::string& id) {
    auto it = find_in(board.slots, id);
    if (it == board.slots.end()) {
        if (locate(board, pool, id)) throw Error(ErrorCode::NotDisplayed, "question " + id + " is not displayed");
        throw Error(ErrorCode::UnknownQuestion, "no question " + id);
    }
    Question q = std::move(*it);
    board.slots.erase(it);
    ++board.version;
    return q;
}

} // namespace

std::string question_id(std::uint64_t number) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "q-%04llu", static_cast<unsigned long long>(number));
    return buf;
}

std::optional<QuestionStatus> locate(const DisplayBoard& board, const QuestionPool& pool, const std::string& id) {
    auto in = [&](const Bucket& bucket) {
        return std::any_of(bucket.begin(), bucket.end(), [&](const Question& q) { return q.id == id; });
    };
    if (in(board.slots)) return QuestionStatus::displayed;
    if (in(pool.generated_backlog) || in(pool.predefined_bank)) return QuestionStatus::pooled;
    if (in(pool.answered_history)) return QuestionStatus::answered;
    if (in(pool.removed)) return QuestionStatus::removed;
    return std::nullopt;
}

const Question* find_question(const DisplayBoard& board, const QuestionPool& pool, const std::string& id) {
    for (const Bucket* bucket : {&board.slots, &pool.generated_backlog, &pool.predefined_bank,
                                 &pool.answered_history, &pool.removed}) {
        for (const auto& q : *bucket) {
            if (q.id == id) return &q;
        }
    }
    return nullptr;
}

void add_question(QuestionPool& pool, Question question) {
    if (find_in(pool.generated_backlog, question.id) != pool.generated_backlog.end() ||
        find_in(pool.predefined_bank, question.id) != pool.predefined_bank.end() ||
        find_in(pool.answered_history, question.id) != pool.answered_history.end() ||
        find_in(pool.removed, question.id) != pool.removed.end()) {
        throw Error(ErrorCode::InvalidArgument, "duplicate question id " + question.id);
    }
    question.status = QuestionStatus::pooled;
    ++pool.next_question_number;
    if (question.origin == QuestionOrigin::predefined) {
        pool.predefined_bank.push_back(std::move(question));
    } else {
        pool.generated_backlog.push_back(std::move(question));
    }
}

void display_question(DisplayBoard& board, QuestionPool& pool, const std::string& id, int originality_score) {
    if (board.slots.size() >= kBoardCapacity) throw Error(ErrorCode::LimitExceeded, "board is full");
    for (Bucket* bucket : {&pool.generated_backlog, &pool.predefined_bank}) {
        auto it = find_in(*bucket, id);
        if (it == bucket->end()) continue;
        Question q = std::move(*it);
        bucket->erase(it);
        q.status = QuestionStatus::displayed;
        q.originality = std::clamp(originality_score, kMinScore, kMaxScore);
        board.slots.push_back(std::move(q));
        ++board.version;
        return;
    }
    if (locate(board, pool, id)) throw Error(ErrorCode::PreconditionNotMet, "question " + id + " is not pooled");
    throw Error(ErrorCode::UnknownQuestion, "no question " + id);
}

void remove_question(DisplayBoard& board, QuestionPool& pool, const std::string& id) {
    Question q = take_from_board(board, pool, id);
    q.status = QuestionStatus::removed;
    pool.removed.push_back(std::move(q));
}

void mark_answered(DisplayBoard& board, QuestionPool& pool, const std::string& id) {
    Question q = take_from_board(board, pool, id);
    q.status = QuestionStatus::answered;
    pool.answered_history.push_back(std::move(q));
}

void decay_recency(DisplayBoard& board, QuestionPool& pool) {
    for (Bucket* bucket : {&board.slots, &pool.generated_backlog, &pool.predefined_bank}) {
        for (auto& q : *bucket) q.recency = std::max(kMinScore, q.recency - 1);
    }
}

FillPlan fill_board(DisplayBoard& board, QuestionPool& pool, const Similarity& similarity) {
    FillPlan plan = plan_fill(board, pool, similarity);
    for (const auto& q : plan.predefined) display_question(board, pool, q.id, q.originality);
    for (const auto& q : plan.generated) display_question(board, pool, q.id, q.originality);
    pool.rng = plan.rng_after;
    return plan;
}

// ---------------------------------------------------------------------------
// Generation

std::vector<Question> generate_questions(CompletionProvider& provider, const CompletionRequest& request,
                                         std::size_t count, std::string_view dataset_text, std::uint64_t first_number,
                                         const std::optional<std::string>& trigger_annotation_id) {
    std::vector<prompts::ParsedQuestion> parsed;
    try {
        parsed = prompts::parse_questions(provider.complete(request), count);
    } catch (const Error& first) {
        if (first.code() != ErrorCode::MalformedOutput && first.code() != ErrorCode::CountMismatch) throw;
        CompletionRequest repair = request;
        repair.prompt = prompts::render_repair(request.prompt, first.what());
        try {
            parsed = prompts::parse_questions(provider.complete(repair), count);
        } catch (const Error& second) {
            if (second.code() != ErrorCode::MalformedOutput && second.code() != ErrorCode::CountMismatch) throw;
            throw Error(ErrorCode::MalformedProviderOutput, second.what());
        }
    }
    std::vector<Question> out;
    out.reserve(parsed.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        Question q;
        q.id = question_id(first_number + i);
        q.text = std::move(parsed[i].text);
        q.origin = QuestionOrigin::generated;
        q.theme = parsed[i].theme;
        q.status = QuestionStatus::pooled;
        q.trigger_annotation_id = trigger_annotation_id;
        const auto score = importance(q.text, dataset_text, provider);
        q.importance = score.value;
        q.importance_degraded = score.degraded;
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Question> generate_initial(CompletionProvider& provider, std::string_view dataset_text,
                                       std::uint64_t first_number) {
    CompletionRequest request{Tier::initial_generation, prompts::render_T1(dataset_text), Purpose::generation};
    return generate_questions(provider, request, kInitialGenerated, dataset_text, first_number);
}

std::vector<Question> generate_follow_ups(CompletionProvider& provider, const GenerationContext& context,
                                          const Annotation& annotation,
                                          const std::optional<std::string>& source_question,
                                          std::uint64_t first_number) {
    CompletionRequest request{Tier::standard,
                              prompts::render_T2(context.dataset_text, context.questions_all, context.annotations_all,
                                                 source_question, annotation),
                              Purpose::follow_up};
    return generate_questions(provider, request, kFollowUpsPerAnnotation, context.dataset_text, first_number,
                              annotation.id);
}

std::vector<Question> generate_replenishment(CompletionProvider& provider, const GenerationContext& context,
                                             std::uint64_t first_number) {
    CompletionRequest request{Tier::standard,
                              prompts::render_replenish(context.dataset_text, context.questions_all,
                                                        context.annotations_all, kReplenishCount),
                              Purpose::generation};
    return generate_questions(provider, request, kReplenishCount, context.dataset_text, first_number);
}

// ---------------------------------------------------------------------------
// Composite operations

std::vector<Question> make_bank_questions(const std::vector<PredefinedEntry>& bank, std::uint64_t first_number) {
    std::vector<Question> out;
    out.reserve(bank.size());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        Question q;
        q.id = question_id(first_number + i);
        q.text = bank[i].text;
        q.origin = QuestionOrigin::predefined;
        q.theme = bank[i].theme;
        out.push_back(std::move(q));
    }
    return out;
}

Bootstrapped bootstrap(const Dataset& dataset, CompletionProvider& provider, const std::vector<PredefinedEntry>& bank,
                       std::uint64_t seed, std::size_t prompt_budget) {
    if (bank.empty()) throw Error(ErrorCode::InvalidArgument, "predefined question bank is empty");
    const auto dataset_text = prompts::serialize_dataset(dataset, prompt_budget);
    Bootstrapped out;
    out.pool.rng = SeededRng(seed);
    for (auto& q : generate_initial(provider, dataset_text, out.pool.next_question_number)) {
        add_question(out.pool, std::move(q));
    }
    for (auto& q : make_bank_questions(bank, out.pool.next_question_number)) add_question(out.pool, std::move(q));
    fill_board(out.board, out.pool);
    return out;
}

CommitOutcome on_annotation_committed(QuestionPool& pool, DisplayBoard& board, const Annotation& annotation,
                                      const GenerationContext& context,
                                      const std::optional<std::string>& source_question,
                                      CompletionProvider& provider) {
    decay_recency(board, pool);
    CommitOutcome outcome;
    try {
        auto follow_ups =
            generate_follow_ups(provider, context, annotation, source_question, pool.next_question_number);
        outcome.follow_ups_added = follow_ups.size();
        for (auto& q : follow_ups) add_question(pool, std::move(q));
        if (pool.generated_backlog.size() < kReplenishBelow) {
            auto more = generate_replenishment(provider, context, pool.next_question_number);
            outcome.replenished = more.size();
            for (auto& q : more) add_question(pool, std::move(q));
        }
    } catch (const Error& e) {
        if (!is_provider_failure(e.code())) throw;
        outcome.failure = e.code();
    }
    return outcome;
}

} // namespace elicit::engine
