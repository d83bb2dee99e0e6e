#include <cstdio>
#include <ctime>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/prompts.hpp"
#include "elicit/session.hpp"
#include "elicit/text.hpp"
#include "elicit/validation.hpp"

namespace elicit {

using nlohmann::json;

std::string format_utc(std::chrono::sys_seconds t) {
    const std::time_t secs = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string SystemClock::now() {
    return format_utc(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

std::string StepClock::now() {
    const auto t = next_.fetch_add(step_);
    return format_utc(std::chrono::sys_seconds{std::chrono::seconds{t}});
}

namespace {

std::string annotation_id(std::uint64_t number) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "a-%04llu", static_cast<unsigned long long>(number));
    return buf;
}

json question_event(const Question& q) {
    return json{{"question", q}};
}

} // namespace

Session::Session(std::string id, SessionState state, CompletionProvider& provider, EventStore& store, Clock& clock,
                 bool wait_for_writer)
    : id_(std::move(id)), state_(std::move(state)), provider_(provider), store_(store), clock_(clock),
      wait_for_writer_(wait_for_writer) {}

std::unique_ptr<Session> Session::create(std::string session_id, std::string dataset_name, std::string bytes,
                                         const SessionOptions& options, CompletionProvider& provider,
                                         EventStore& store, Clock& clock) {
    if (options.bank.empty()) throw Error(ErrorCode::InvalidArgument, "predefined question bank is empty");
    if (store.exists(session_id)) throw Error(ErrorCode::StorageError, "session " + session_id + " already exists");
    const auto dataset = ingest::parse_tabular(bytes, options.ingest, dataset_name);
    const auto dataset_text = prompts::serialize_dataset(dataset, dataset_budget(options.prompt_budget));

    // Every provider call happens before the first event is written.
    const auto generated = engine::generate_initial(provider, dataset_text, 1);
    const auto bank = engine::make_bank_questions(options.bank, 1 + generated.size());

    std::unique_ptr<Session> session(
        new Session(session_id, SessionState{}, provider, store, clock, options.wait_for_writer));
    try {
        session->emit(EventKind::dataset_ingested, json{{"session_id", session_id},
                                                        {"created_at", clock.now()},
                                                        {"name", dataset_name},
                                                        {"bytes", bytes},
                                                        {"ingest_config", options.ingest},
                                                        {"prompt_budget", options.prompt_budget},
                                                        {"seed", options.seed}});
        for (const auto& q : generated) session->emit(EventKind::question_generated, question_event(q));
        for (const auto& q : bank) session->emit(EventKind::question_generated, question_event(q));
        const auto plan = engine::plan_fill(session->state_.board, session->state_.pool);
        for (const auto* part : {&plan.predefined, &plan.generated}) {
            for (const auto& q : *part) {
                session->emit(EventKind::question_displayed, json{{"question_id", q.id},
                                                                  {"originality", q.originality},
                                                                  {"rng_draws", plan.rng_after.draws()}});
            }
        }
    } catch (...) {
        store.remove(session_id);
        throw;
    }
    return session;
}

std::unique_ptr<Session> Session::load(const std::string& session_id, CompletionProvider& provider, EventStore& store,
                                       Clock& clock, bool wait_for_writer) {
    if (!store.exists(session_id)) throw Error(ErrorCode::UnknownSession, "no session " + session_id);
    SessionState state;
    if (auto snapshot = store.latest_snapshot(session_id)) {
        state = state_from_json(snapshot->second);
        if (state.last_sequence != snapshot->first) {
            throw Error(ErrorCode::CorruptLog, "snapshot " + std::to_string(snapshot->first) + " is inconsistent");
        }
    }
    const auto tail = store.read_events(session_id, state.last_sequence);
    for (const auto& e : tail) apply(state, e);
    if (state.last_sequence == 0) throw Error(ErrorCode::UnknownSession, "session " + session_id + " has no events");
    return std::unique_ptr<Session>(new Session(session_id, std::move(state), provider, store, clock, wait_for_writer));
}

SessionState Session::state() const {
    std::shared_lock lock(state_mutex_);
    return state_;
}

std::uint64_t Session::hash() const {
    std::shared_lock lock(state_mutex_);
    return state_hash(state_);
}

BoardView Session::board() const {
    std::shared_lock lock(state_mutex_);
    return {state_.board.slots, engine::refill_enabled(state_.board), state_.board.version};
}

std::vector<Annotation> Session::annotations() const {
    std::shared_lock lock(state_mutex_);
    return state_.annotations;
}

std::array<ThemeProgress, kThemeCount> Session::progress() const {
    std::shared_lock lock(state_mutex_);
    return theme_progress(state_);
}

std::unique_lock<std::mutex> Session::writer_lock() {
    if (wait_for_writer_) return std::unique_lock(writer_);
    std::unique_lock lock(writer_, std::try_to_lock);
    if (!lock.owns_lock()) throw Error(ErrorCode::SessionBusy, "another change to session " + id_ + " is in progress");
    return lock;
}

void Session::emit(EventKind kind, json payload) {
    SessionEvent event{state_.last_sequence + 1, kind, std::move(payload), clock_.now()};
    // Validate against a scratch copy first so a rejected event is never persisted.
    SessionState next = [&] {
        std::shared_lock lock(state_mutex_);
        return state_;
    }();
    apply(next, event);
    store_.append(id_, event);
    json snapshot;
    if (event.sequence % kSnapshotInterval == 0) snapshot = state_to_json(next);
    {
        std::unique_lock lock(state_mutex_);
        state_ = std::move(next);
    }
    if (!snapshot.is_null()) store_.write_snapshot(id_, event.sequence, snapshot);
}

RefillOutcome Session::refill() {
    auto lock = writer_lock();
    if (!engine::refill_enabled(state_.board)) {
        throw Error(ErrorCode::RefillNotEnabled,
                    std::to_string(state_.board.slots.size()) + " questions are still displayed");
    }
    const auto plan = engine::plan_fill(state_.board, state_.pool);
    for (const auto* part : {&plan.predefined, &plan.generated}) {
        for (const auto& q : *part) {
            emit(EventKind::question_displayed,
                 json{{"question_id", q.id}, {"originality", q.originality}, {"rng_draws", plan.rng_after.draws()}});
        }
    }
    return {plan.predefined.size(), plan.generated.size(), plan.insufficient};
}

void Session::remove_question(const std::string& question_id) {
    auto lock = writer_lock();
    const auto where = engine::locate(state_.board, state_.pool, question_id);
    if (!where) throw Error(ErrorCode::UnknownQuestion, "no question " + question_id);
    if (*where != QuestionStatus::displayed) throw Error(ErrorCode::NotDisplayed, "question " + question_id + " is not displayed");
    emit(EventKind::question_removed, json{{"question_id", question_id}});
}

SubmitOutcome Session::submit_answer(const std::string& question_id, const std::string& answer_text) {
    auto lock = writer_lock();
    const auto where = engine::locate(state_.board, state_.pool, question_id);
    if (!where) throw Error(ErrorCode::UnknownQuestion, "no question " + question_id);
    if (*where != QuestionStatus::displayed) throw Error(ErrorCode::NotDisplayed, "question " + question_id + " is not displayed");
    const std::string text(trim(answer_text));
    if (text.empty()) throw Error(ErrorCode::InvalidArgument, "answer text is empty");
    const Question question = *engine::find_question(state_.board, state_.pool, question_id);

    SubmitOutcome outcome;
    outcome.result = validation::validate_answer(question, text, state_.annotations, provider_,
                                                 dataset_budget(state_.prompt_budget));
    if (!outcome.result.accepted()) {
        emit(EventKind::answer_rejected, json{{"question_id", question_id},
                                              {"stage", to_string(*outcome.result.stage)},
                                              {"feedback", outcome.result.feedback}});
        return outcome;
    }

    Annotation annotation;
    annotation.id = annotation_id(state_.next_annotation_number);
    annotation.selection = validation::answer_selection(question, state_.annotations);
    annotation.text = text;
    annotation.origin = AnnotationOrigin::answer;
    annotation.question_id = question_id;
    annotation.sequence = state_.last_sequence + 1;
    annotation.created_at = clock_.now();
    emit(EventKind::question_answered, json{{"question_id", question_id}, {"annotation", annotation}});
    outcome.annotation = annotation;
    outcome.commit = after_commit(annotation, question.text);

    if (question.theme && theme_progress(state_)[index_of(*question.theme)].answered >= kSummaryThreshold) {
        try {
            refresh_summary(*question.theme);
        } catch (const Error& e) {
            // The summary stays stale and is retried on the next answer in the theme.
            if (!is_provider_failure(e.code())) throw;
        }
    }
    return outcome;
}

AnnotateOutcome Session::annotate(const Selection& selection, const std::string& text) {
    auto lock = writer_lock();
    const auto& ds = *state_.dataset;
    Selection checked = validate_selection(selection, ds.row_count(), ds.column_count());
    const std::string body(trim(text));
    if (body.empty()) throw Error(ErrorCode::InvalidArgument, "annotation text is empty");

    Annotation annotation;
    annotation.id = annotation_id(state_.next_annotation_number);
    annotation.selection = std::move(checked);
    annotation.text = body;
    annotation.origin = AnnotationOrigin::direct;
    annotation.sequence = state_.last_sequence + 1;
    annotation.created_at = clock_.now();
    emit(EventKind::annotation_committed, json{{"annotation", annotation}});
    return {annotation, after_commit(annotation, std::nullopt)};
}

engine::CommitOutcome Session::after_commit(const Annotation& annotation,
                                            const std::optional<std::string>& source_question) {
    engine::CommitOutcome outcome;
    try {
        // Earlier annotations whose follow-ups failed are retried here, oldest first.
        for (const auto& pending : pending_follow_ups(state_)) {
            std::optional<std::string> source = pending.id == annotation.id ? source_question : std::nullopt;
            if (pending.id != annotation.id && pending.question_id) {
                if (const auto* q = engine::find_question(state_.board, state_.pool, *pending.question_id)) {
                    source = q->text;
                }
            }
            const auto questions = engine::generate_follow_ups(provider_, generation_context(state_), pending, source,
                                                               state_.pool.next_question_number);
            for (const auto& q : questions) emit(EventKind::question_generated, question_event(q));
            outcome.follow_ups_added += questions.size();
        }
        if (state_.pool.generated_backlog.size() < engine::kReplenishBelow) {
            const auto questions = engine::generate_replenishment(provider_, generation_context(state_),
                                                                  state_.pool.next_question_number);
            for (const auto& q : questions) emit(EventKind::question_generated, question_event(q));
            outcome.replenished = questions.size();
        }
    } catch (const Error& e) {
        if (!is_provider_failure(e.code())) throw;
        outcome.failure = e.code();
    }
    return outcome;
}

void Session::refresh_summary(Theme theme) {
    std::vector<prompts::QuestionAnswer> answered;
    for (const auto& q : state_.pool.answered_history) {
        if (q.theme != theme) continue;
        for (const auto& a : state_.annotations) {
            if (a.question_id == q.id) answered.push_back({q.text, a.text});
        }
    }
    CompletionRequest request{Tier::standard, prompts::render_theme_summary(theme, answered), Purpose::summary};
    const std::string text(trim(provider_.complete(request)));
    emit(EventKind::summary_updated,
         json{{"theme", to_string(theme)}, {"text", text}, {"answered_count", answered.size()}});
}

std::string Session::update_theme_summary(Theme theme) {
    auto lock = writer_lock();
    const auto answered = theme_progress(state_)[index_of(theme)].answered;
    if (answered < kSummaryThreshold) {
        throw Error(ErrorCode::PreconditionNotMet, std::string(to_string(theme)) + " has " + std::to_string(answered) +
                                                       " answered questions");
    }
    refresh_summary(theme);
    return state_.summaries[index_of(theme)]->text;
}

json Session::export_annotations() {
    auto lock = writer_lock();
    emit(EventKind::export_requested, json::object());
    return export_document(state_);
}

std::string Session::generate_report() {
    const SessionState snapshot = state();
    if (snapshot.annotations.empty()) throw Error(ErrorCode::NoAnnotations, "the session has no annotations");
    std::optional<std::string> overview;
    try {
        CompletionRequest request{Tier::standard,
                                  prompts::render_report(snapshot.dataset_text, snapshot.annotations,
                                                         dataset_budget(snapshot.prompt_budget)),
                                  Purpose::report};
        overview = std::string(trim(provider_.complete(request)));
    } catch (const Error& e) {
        if (!is_provider_failure(e.code())) throw;
    }
    return report_markdown(snapshot, overview);
}

} // namespace elicit
