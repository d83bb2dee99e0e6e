#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/domain.hpp"
#include "elicit/ingest.hpp"
#include "elicit/provider.hpp"
#include "elicit/question_engine.hpp"

namespace elicit {

// ---------------------------------------------------------------------------
// Clocks. Timestamps are ISO-8601 UTC strings with second precision.

class Clock {
public:
    virtual ~Clock() = default;
    virtual std::string now() = 0;
};

std::string format_utc(std::chrono::sys_seconds t);

class SystemClock final : public Clock {
public:
    std::string now() override;
};

// Starts at `start` and advances by `step` on every reading.
class StepClock final : public Clock {
public:
    explicit StepClock(std::chrono::sys_seconds start = std::chrono::sys_seconds{std::chrono::seconds{1767225600}},
                       std::chrono::seconds step = std::chrono::seconds{1})
        : next_(start.time_since_epoch().count()), step_(step.count()) {}
    std::string now() override;

private:
    std::atomic<std::int64_t> next_;
    std::int64_t step_;
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind {
    dataset_ingested,
    question_generated,
    question_displayed,
    question_removed,
    question_answered,
    annotation_committed,
    summary_updated,
    export_requested,
    answer_rejected,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

struct SessionEvent {
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::dataset_ingested;
    nlohmann::json payload;
    std::string timestamp;

    friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

nlohmann::json event_to_json(const SessionEvent& event);
SessionEvent event_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// State

struct ThemeSummary {
    std::string text;
    std::size_t answered_at_summary = 0;

    friend bool operator==(const ThemeSummary&, const ThemeSummary&) = default;
};

struct ThemeProgress {
    std::size_t answered = 0;
    std::size_t unanswered_bank = 0;
    std::optional<std::string> summary;
    bool summary_stale = false;

    friend bool operator==(const ThemeProgress&, const ThemeProgress&) = default;
};

inline constexpr std::size_t kSummaryThreshold = 2;
inline constexpr std::uint64_t kSnapshotInterval = 50;

struct SessionState {
    std::string session_id;
    std::string created_at;
    std::string dataset_name;
    std::string source_bytes;
    ingest::IngestConfig ingest_config;
    std::size_t prompt_budget = 24000;
    std::shared_ptr<const Dataset> dataset;  // immutable, shared between copies
    std::string dataset_text;                // prompt serialization, derived from the above

    engine::QuestionPool pool;
    engine::DisplayBoard board;
    std::vector<Annotation> annotations;
    std::array<std::optional<ThemeSummary>, kThemeCount> summaries;
    std::uint64_t next_annotation_number = 1;

    // Bookkeeping outside the knowledge state; not part of state_hash.
    std::uint64_t last_sequence = 0;
    std::uint64_t rejected_answers = 0;
    std::uint64_t exports = 0;
};

// Compares the serialized form, so two independently parsed datasets with the
// same content are equal.
bool operator==(const SessionState& a, const SessionState& b);

// Dataset share of the prompt budget, in tokens.
std::size_t dataset_budget(std::size_t prompt_budget) noexcept;

// Folds one event into the state. Throws Error{SequenceConflict} unless
// event.sequence == state.last_sequence + 1; other failures mean the log is
// inconsistent and surface as Error{CorruptLog}.
void apply(SessionState& state, const SessionEvent& event);
SessionState replay(const std::vector<SessionEvent>& events);

nlohmann::json state_to_json(const SessionState& state);
SessionState state_from_json(const nlohmann::json& j);

// Fingerprint of the knowledge state: dataset, pool, board, annotations and
// summaries. Sequence numbers and audit counters are excluded.
std::uint64_t state_hash(const SessionState& state);

std::array<ThemeProgress, kThemeCount> theme_progress(const SessionState& state);

// Question texts that produced annotations, oldest first.
std::vector<std::string> questions_used(const SessionState& state);

// Annotations for which no follow-up question has been generated yet.
std::vector<Annotation> pending_follow_ups(const SessionState& state);

engine::GenerationContext generation_context(const SessionState& state);

// ---------------------------------------------------------------------------
// Export and report

inline constexpr std::string_view kExportFormatVersion = "1";

nlohmann::json export_document(const SessionState& state);

// Reads an export document back. Throws Error{InvalidArgument} on schema
// violations.
struct ExportedQuestion {
    std::string text;
    QuestionOrigin origin = QuestionOrigin::generated;
    std::optional<Theme> theme;

    friend bool operator==(const ExportedQuestion&, const ExportedQuestion&) = default;
};

struct ExportedAnnotation {
    std::string id;
    std::uint64_t sequence = 0;
    bool general = true;
    Selection selection;
    std::string text;
    AnnotationOrigin origin = AnnotationOrigin::direct;
    std::optional<ExportedQuestion> question;
    std::string created_at;

    friend bool operator==(const ExportedAnnotation&, const ExportedAnnotation&) = default;
};

struct ExportedDataset {
    std::string name;
    std::size_t row_count = 0;
    std::vector<std::pair<std::string, ColumnType>> columns;

    friend bool operator==(const ExportedDataset&, const ExportedDataset&) = default;
};

struct ExportDocument {
    std::string format_version;
    ExportedDataset dataset;
    std::vector<ExportedAnnotation> annotations;
    std::array<std::optional<std::string>, kThemeCount> theme_summaries;
    std::array<engine::ThemeCounts, kThemeCount> theme_progress{};
};

ExportDocument load_export(const nlohmann::json& doc);

inline constexpr std::string_view kNotYetCovered = "not yet covered";
inline constexpr std::string_view kOverviewUnavailable = "_Overview unavailable: the completion provider failed._";

// Markdown. `overview` is the provider prose, or nullopt for the placeholder.
std::string report_markdown(const SessionState& state, const std::optional<std::string>& overview);

// ---------------------------------------------------------------------------
// Persistence boundary

class EventStore {
public:
    virtual ~EventStore() = default;
    virtual bool exists(const std::string& session_id) const = 0;
    virtual std::vector<std::string> list_sessions() const = 0;
    // Durable before returning. Throws Error{SequenceConflict} when the
    // sequence does not extend the stored log, Error{StorageError} on I/O.
    virtual void append(const std::string& session_id, const SessionEvent& event) = 0;
    virtual void write_snapshot(const std::string& session_id, std::uint64_t sequence,
                                const nlohmann::json& state) = 0;
    // Events with sequence > after, in order.
    virtual std::vector<SessionEvent> read_events(const std::string& session_id, std::uint64_t after = 0) const = 0;
    virtual std::optional<std::pair<std::uint64_t, nlohmann::json>> latest_snapshot(
        const std::string& session_id) const = 0;
    virtual void remove(const std::string& session_id) = 0;
};

// ---------------------------------------------------------------------------
// Live session

struct SessionOptions {
    std::uint64_t seed = 1;
    std::size_t prompt_budget = 24000;
    ingest::IngestConfig ingest;
    std::vector<engine::PredefinedEntry> bank = engine::default_bank();
    // When false, a mutator that finds another mutator running throws
    // Error{SessionBusy} instead of waiting.
    bool wait_for_writer = true;
};

struct SubmitOutcome {
    ValidationResult result;
    std::optional<Annotation> annotation;
    engine::CommitOutcome commit;
};

struct AnnotateOutcome {
    Annotation annotation;
    engine::CommitOutcome commit;
};

struct RefillOutcome {
    std::size_t predefined = 0;
    std::size_t generated = 0;
    bool insufficient = false;
};

struct BoardView {
    std::vector<Question> questions;
    bool refill_enabled = false;
    std::uint64_t board_version = 0;
};

// Single-writer wrapper around a SessionState. Every change goes through an
// event that is persisted first and then folded in with apply(), so the live
// state always equals a replay of the log. Provider calls run before the
// state lock is taken; readers are never blocked by them.
class Session {
public:
    // Ingests the bytes and bootstraps the question board. Nothing is
    // persisted unless bootstrap succeeds.
    static std::unique_ptr<Session> create(std::string session_id, std::string dataset_name, std::string bytes,
                                           const SessionOptions& options, CompletionProvider& provider,
                                           EventStore& store, Clock& clock);
    // Latest snapshot plus the tail of the log. Throws Error{UnknownSession}.
    static std::unique_ptr<Session> load(const std::string& session_id, CompletionProvider& provider,
                                         EventStore& store, Clock& clock, bool wait_for_writer = true);

    const std::string& id() const noexcept { return id_; }
    SessionState state() const;
    std::uint64_t hash() const;

    BoardView board() const;
    std::vector<Annotation> annotations() const;
    std::array<ThemeProgress, kThemeCount> progress() const;

    RefillOutcome refill();
    void remove_question(const std::string& question_id);
    SubmitOutcome submit_answer(const std::string& question_id, const std::string& answer_text);
    AnnotateOutcome annotate(const Selection& selection, const std::string& text);
    std::string update_theme_summary(Theme theme);
    nlohmann::json export_annotations();
    std::string generate_report();

private:
    Session(std::string id, SessionState state, CompletionProvider& provider, EventStore& store, Clock& clock,
            bool wait_for_writer);

    std::unique_lock<std::mutex> writer_lock();
    void emit(EventKind kind, nlohmann::json payload);
    engine::CommitOutcome after_commit(const Annotation& annotation, const std::optional<std::string>& source_question);
    void refresh_summary(Theme theme);

    std::string id_;
    SessionState state_;
    CompletionProvider& provider_;
    EventStore& store_;
    Clock& clock_;
    bool wait_for_writer_;
    std::mutex writer_;
    mutable std::shared_mutex state_mutex_;
};

} // namespace elicit
