#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"
#include "elicit/json_io.hpp"
#include "elicit/prompts.hpp"
#include "elicit/session.hpp"

namespace elicit {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 9> kEventKinds{{
    {EventKind::dataset_ingested, "dataset_ingested"},
    {EventKind::question_generated, "question_generated"},
    {EventKind::question_displayed, "question_displayed"},
    {EventKind::question_removed, "question_removed"},
    {EventKind::question_answered, "question_answered"},
    {EventKind::annotation_committed, "annotation_committed"},
    {EventKind::summary_updated, "summary_updated"},
    {EventKind::export_requested, "export_requested"},
    {EventKind::answer_rejected, "answer_rejected"},
}};

Theme theme_field(const json& j, const char* name) {
    const auto text = field<std::string>(j, name);
    const auto theme = parse_theme(text);
    if (!theme) throw Error(ErrorCode::InvalidArgument, "unknown theme " + text);
    return *theme;
}

void load_dataset(SessionState& state) {
    state.dataset = std::make_shared<const Dataset>(
        ingest::parse_tabular(state.source_bytes, state.ingest_config, state.dataset_name));
    state.dataset_text = prompts::serialize_dataset(*state.dataset, dataset_budget(state.prompt_budget));
}

void apply_unchecked(SessionState& state, const SessionEvent& event) {
    const json& p = event.payload;
    switch (event.kind) {
    case EventKind::dataset_ingested:
        if (state.dataset) throw Error(ErrorCode::InvalidArgument, "dataset already ingested");
        state.session_id = field<std::string>(p, "session_id");
        state.created_at = field<std::string>(p, "created_at");
        state.dataset_name = field<std::string>(p, "name");
        state.source_bytes = field<std::string>(p, "bytes");
        state.ingest_config = p.at("ingest_config").get<ingest::IngestConfig>();
        state.prompt_budget = field<std::uint64_t>(p, "prompt_budget");
        state.pool.rng = SeededRng(field<std::uint64_t>(p, "seed"));
        load_dataset(state);
        break;
    case EventKind::question_generated:
        engine::add_question(state.pool, p.at("question").get<Question>());
        break;
    case EventKind::question_displayed:
        engine::display_question(state.board, state.pool, field<std::string>(p, "question_id"),
                                 field<int>(p, "originality"));
        state.pool.rng = SeededRng(state.pool.rng.seed(), field<std::uint64_t>(p, "rng_draws"));
        break;
    case EventKind::question_removed:
        engine::remove_question(state.board, state.pool, field<std::string>(p, "question_id"));
        break;
    case EventKind::question_answered:
    case EventKind::annotation_committed: {
        auto annotation = p.at("annotation").get<Annotation>();
        if (event.kind == EventKind::question_answered) {
            const auto qid = field<std::string>(p, "question_id");
            if (annotation.question_id != qid) throw Error(ErrorCode::InvalidArgument, "answer for another question");
            engine::mark_answered(state.board, state.pool, qid);
        }
        state.annotations.push_back(std::move(annotation));
        ++state.next_annotation_number;
        engine::decay_recency(state.board, state.pool);
        break;
    }
    case EventKind::summary_updated:
        state.summaries[index_of(theme_field(p, "theme"))] =
            ThemeSummary{field<std::string>(p, "text"), field<std::uint64_t>(p, "answered_count")};
        break;
    case EventKind::export_requested:
        ++state.exports;
        break;
    case EventKind::answer_rejected:
        ++state.rejected_answers;
        break;
    }
}

json pool_to_json(const engine::QuestionPool& pool) {
    return json{{"generated_backlog", pool.generated_backlog},
                {"predefined_bank", pool.predefined_bank},
                {"answered_history", pool.answered_history},
                {"removed", pool.removed},
                {"rng_seed", pool.rng.seed()},
                {"rng_draws", pool.rng.draws()},
                {"next_question_number", pool.next_question_number}};
}

json knowledge_json(const SessionState& state) {
    json summaries = json::object();
    for (auto theme : kAllThemes) {
        const auto& s = state.summaries[index_of(theme)];
        if (s) summaries[std::string(to_string(theme))] = {{"text", s->text}, {"answered_at_summary", s->answered_at_summary}};
    }
    return json{{"session_id", state.session_id},
                {"created_at", state.created_at},
                {"dataset_name", state.dataset_name},
                {"source_bytes", state.source_bytes},
                {"ingest_config", state.ingest_config},
                {"prompt_budget", state.prompt_budget},
                {"pool", pool_to_json(state.pool)},
                {"board", {{"slots", state.board.slots}, {"version", state.board.version}}},
                {"annotations", state.annotations},
                {"summaries", std::move(summaries)},
                {"next_annotation_number", state.next_annotation_number}};
}

std::string theme_title(Theme theme) {
    std::string out(to_string(theme));
    std::replace(out.begin(), out.end(), '_', ' ');
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

const Question* answered_question(const SessionState& state, const std::string& id) {
    for (const auto& q : state.pool.answered_history) {
        if (q.id == id) return &q;
    }
    return nullptr;
}

} // namespace

std::string_view to_string(EventKind kind) noexcept {
    for (const auto& [k, name] : kEventKinds) {
        if (k == kind) return name;
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) noexcept {
    for (const auto& [k, text] : kEventKinds) {
        if (text == name) return k;
    }
    return std::nullopt;
}

json event_to_json(const SessionEvent& event) {
    return json{{"sequence", event.sequence},
                {"kind", to_string(event.kind)},
                {"payload", event.payload},
                {"timestamp", event.timestamp}};
}

SessionEvent event_from_json(const json& j) {
    SessionEvent event;
    event.sequence = field<std::uint64_t>(j, "sequence");
    const auto kind = parse_event_kind(field<std::string>(j, "kind"));
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown event kind");
    event.kind = *kind;
    event.payload = j.contains("payload") ? j["payload"] : json::object();
    event.timestamp = field<std::string>(j, "timestamp");
    return event;
}

std::size_t dataset_budget(std::size_t prompt_budget) noexcept {
    return prompt_budget / 2;
}

void apply(SessionState& state, const SessionEvent& event) {
    if (event.sequence != state.last_sequence + 1) {
        throw Error(ErrorCode::SequenceConflict, "event " + std::to_string(event.sequence) + " does not follow " +
                                                     std::to_string(state.last_sequence));
    }
    if (!state.dataset && event.kind != EventKind::dataset_ingested) {
        throw Error(ErrorCode::CorruptLog, "log does not start with dataset_ingested");
    }
    try {
        apply_unchecked(state, event);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptLog, "event " + std::to_string(event.sequence) + " (" +
                                               std::string(to_string(event.kind)) + "): " + e.what());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, "event " + std::to_string(event.sequence) + ": " + e.what());
    }
    state.last_sequence = event.sequence;
}

SessionState replay(const std::vector<SessionEvent>& events) {
    SessionState state;
    for (const auto& e : events) apply(state, e);
    return state;
}

json state_to_json(const SessionState& state) {
    json j = knowledge_json(state);
    j["last_sequence"] = state.last_sequence;
    j["rejected_answers"] = state.rejected_answers;
    j["exports"] = state.exports;
    return j;
}

SessionState state_from_json(const json& j) {
    SessionState state;
    try {
        state.session_id = field<std::string>(j, "session_id");
        state.created_at = field<std::string>(j, "created_at");
        state.dataset_name = field<std::string>(j, "dataset_name");
        state.source_bytes = field<std::string>(j, "source_bytes");
        state.ingest_config = j.at("ingest_config").get<ingest::IngestConfig>();
        state.prompt_budget = field<std::uint64_t>(j, "prompt_budget");
        const auto& pool = j.at("pool");
        state.pool.generated_backlog = pool.at("generated_backlog").get<std::vector<Question>>();
        state.pool.predefined_bank = pool.at("predefined_bank").get<std::vector<Question>>();
        state.pool.answered_history = pool.at("answered_history").get<std::vector<Question>>();
        state.pool.removed = pool.at("removed").get<std::vector<Question>>();
        state.pool.rng = SeededRng(field<std::uint64_t>(pool, "rng_seed"), field<std::uint64_t>(pool, "rng_draws"));
        state.pool.next_question_number = field<std::uint64_t>(pool, "next_question_number");
        state.board.slots = j.at("board").at("slots").get<std::vector<Question>>();
        state.board.version = field<std::uint64_t>(j.at("board"), "version");
        state.annotations = j.at("annotations").get<std::vector<Annotation>>();
        for (const auto& [name, s] : j.at("summaries").items()) {
            const auto theme = parse_theme(name);
            if (!theme) throw Error(ErrorCode::InvalidArgument, "unknown theme " + name);
            state.summaries[index_of(*theme)] =
                ThemeSummary{field<std::string>(s, "text"), field<std::uint64_t>(s, "answered_at_summary")};
        }
        state.next_annotation_number = field<std::uint64_t>(j, "next_annotation_number");
        state.last_sequence = field<std::uint64_t>(j, "last_sequence");
        state.rejected_answers = field<std::uint64_t>(j, "rejected_answers");
        state.exports = field<std::uint64_t>(j, "exports");
        load_dataset(state);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("snapshot: ") + e.what());
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptLog, std::string("snapshot: ") + e.what());
    }
    return state;
}

bool operator==(const SessionState& a, const SessionState& b) {
    return state_to_json(a) == state_to_json(b);
}

std::uint64_t state_hash(const SessionState& state) {
    return stable_hash(knowledge_json(state).dump());
}

std::array<ThemeProgress, kThemeCount> theme_progress(const SessionState& state) {
    const auto counts = engine::theme_progress(state.pool);
    std::array<ThemeProgress, kThemeCount> out{};
    for (std::size_t i = 0; i < kThemeCount; ++i) {
        out[i].answered = counts[i].answered;
        out[i].unanswered_bank = counts[i].unanswered_bank;
        if (const auto& s = state.summaries[i]) {
            out[i].summary = s->text;
            out[i].summary_stale = counts[i].answered > s->answered_at_summary;
        }
    }
    return out;
}

std::vector<std::string> questions_used(const SessionState& state) {
    std::vector<std::string> out;
    for (const auto& q : state.pool.answered_history) out.push_back(q.text);
    return out;
}

std::vector<Annotation> pending_follow_ups(const SessionState& state) {
    std::set<std::string> triggered;
    for (const auto* bucket : {&state.board.slots, &state.pool.generated_backlog, &state.pool.answered_history,
                               &state.pool.removed}) {
        for (const auto& q : *bucket) {
            if (q.trigger_annotation_id) triggered.insert(*q.trigger_annotation_id);
        }
    }
    std::vector<Annotation> out;
    for (const auto& a : state.annotations) {
        if (!triggered.count(a.id)) out.push_back(a);
    }
    return out;
}

engine::GenerationContext generation_context(const SessionState& state) {
    return {state.dataset_text, questions_used(state), state.annotations};
}

// ---------------------------------------------------------------------------
// Export

json export_document(const SessionState& state) {
    json columns = json::array();
    std::size_t rows = 0;
    if (state.dataset) {
        rows = state.dataset->row_count();
        for (const auto& c : state.dataset->columns()) {
            columns.push_back({{"name", c.name}, {"type", to_string(c.inferred_type)}});
        }
    }
    json annotations = json::array();
    for (const auto& a : state.annotations) {
        json record{{"id", a.id},
                    {"sequence", a.sequence},
                    {"scope", a.is_general() ? "general" : "data_specific"},
                    {"text", a.text},
                    {"origin", to_string(a.origin)},
                    {"created_at", a.created_at}};
        if (!a.is_general()) record["selection"] = a.selection;
        if (a.origin == AnnotationOrigin::answer && a.question_id) {
            if (const auto* q = answered_question(state, *a.question_id)) {
                record["question"] = {{"text", q->text},
                                      {"origin", to_string(q->origin)},
                                      {"theme", q->theme ? json(to_string(*q->theme)) : json(nullptr)}};
            }
        }
        annotations.push_back(std::move(record));
    }
    json summaries = json::object();
    json progress = json::object();
    const auto themes = theme_progress(state);
    for (auto theme : kAllThemes) {
        const auto& t = themes[index_of(theme)];
        const std::string name(to_string(theme));
        summaries[name] = t.summary ? json(*t.summary) : json(nullptr);
        progress[name] = {{"answered", t.answered}, {"unanswered_bank", t.unanswered_bank}};
    }
    return json{{"format_version", kExportFormatVersion},
                {"dataset", {{"name", state.dataset_name}, {"row_count", rows}, {"columns", std::move(columns)}}},
                {"annotations", std::move(annotations)},
                {"theme_summaries", std::move(summaries)},
                {"theme_progress", std::move(progress)}};
}

ExportDocument load_export(const json& doc) {
    ExportDocument out;
    try {
        out.format_version = field<std::string>(doc, "format_version");
        if (out.format_version != kExportFormatVersion) {
            throw Error(ErrorCode::InvalidArgument, "unsupported format_version " + out.format_version);
        }
        const auto& ds = doc.at("dataset");
        out.dataset.name = field<std::string>(ds, "name");
        out.dataset.row_count = field<std::uint64_t>(ds, "row_count");
        for (const auto& c : ds.at("columns")) {
            const auto type = parse_column_type(field<std::string>(c, "type"));
            if (!type) throw Error(ErrorCode::InvalidArgument, "unknown column type");
            out.dataset.columns.emplace_back(field<std::string>(c, "name"), *type);
        }
        for (const auto& r : doc.at("annotations")) {
            ExportedAnnotation a;
            a.id = field<std::string>(r, "id");
            a.sequence = field<std::uint64_t>(r, "sequence");
            const auto scope = field<std::string>(r, "scope");
            if (scope != "general" && scope != "data_specific") throw Error(ErrorCode::InvalidArgument, "bad scope");
            a.general = scope == "general";
            if (a.general == r.contains("selection")) {
                throw Error(ErrorCode::InvalidArgument, "selection must be present exactly for data_specific");
            }
            if (!a.general) a.selection = r.at("selection").get<Selection>();
            a.text = field<std::string>(r, "text");
            const auto origin = parse_annotation_origin(field<std::string>(r, "origin"));
            if (!origin) throw Error(ErrorCode::InvalidArgument, "bad origin");
            a.origin = *origin;
            if (r.contains("question")) {
                const auto& q = r["question"];
                ExportedQuestion eq;
                eq.text = field<std::string>(q, "text");
                const auto qo = parse_question_origin(field<std::string>(q, "origin"));
                if (!qo) throw Error(ErrorCode::InvalidArgument, "bad question origin");
                eq.origin = *qo;
                if (!q.at("theme").is_null()) eq.theme = theme_field(q, "theme");
                a.question = eq;
            }
            if ((a.origin == AnnotationOrigin::answer) != a.question.has_value()) {
                throw Error(ErrorCode::InvalidArgument, "question must be present exactly for answer annotations");
            }
            a.created_at = field<std::string>(r, "created_at");
            out.annotations.push_back(std::move(a));
        }
        for (auto theme : kAllThemes) {
            const std::string name(to_string(theme));
            const auto& s = doc.at("theme_summaries").at(name);
            if (!s.is_null()) out.theme_summaries[index_of(theme)] = s.get<std::string>();
            const auto& p = doc.at("theme_progress").at(name);
            out.theme_progress[index_of(theme)] = {field<std::uint64_t>(p, "answered"),
                                                   field<std::uint64_t>(p, "unanswered_bank")};
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("export document: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report

std::string report_markdown(const SessionState& state, const std::optional<std::string>& overview) {
    std::ostringstream out;
    out << "# Dataset report: " << state.dataset_name << "\n\n";
    if (state.dataset) {
        out << state.dataset->row_count() << " rows, " << state.dataset->column_count() << " columns.\n\n";
        out << "| Column | Type | Nulls |\n|---|---|---|\n";
        for (const auto& c : state.dataset->columns()) {
            out << "| " << c.name << " | " << to_string(c.inferred_type) << " | " << c.null_count << " |\n";
        }
        out << "\n";
    }
    out << "## Overview\n\n" << (overview ? *overview : std::string(kOverviewUnavailable)) << "\n\n";
    out << "## Themes\n\n";
    for (auto theme : kAllThemes) {
        const auto& s = state.summaries[index_of(theme)];
        out << "### " << theme_title(theme) << "\n\n" << (s ? s->text : std::string(kNotYetCovered)) << "\n\n";
    }
    out << "## Annotations\n\n";
    for (const auto& a : state.annotations) out << "- " << prompts::describe_annotation(a) << "\n";
    return out.str();
}

} // namespace elicit
