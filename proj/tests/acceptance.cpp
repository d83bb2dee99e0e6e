// Acceptance run: one PASS/FAIL line per primary criterion, offline against
// the mock provider with fixed seeds. Exits nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"
#include "elicit/ingest.hpp"
#include "elicit/prompts.hpp"
#include "elicit/question_engine.hpp"
#include "elicit/stats.hpp"
#include "elicit/validation.hpp"
#include "golden_cases.hpp"
#include "http_harness.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "verbatim.hpp"

using namespace elicit;
using namespace elicit::engine;
using Wall = std::chrono::steady_clock;

namespace {

// Collects failed expectations for one criterion.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    bool passed() const { return failed_ == 0; }
    std::size_t count() const { return count_; }
    std::size_t failed() const { return failed_; }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::size_t count_ = 0;
    std::size_t failed_ = 0;
    std::vector<std::string> failures_;
};

double seconds_since(Wall::time_point start) {
    return std::chrono::duration<double>(Wall::now() - start).count();
}

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

Question generated(std::uint64_t n, int o, int r, int i) {
    Question q;
    q.id = question_id(n);
    q.text = "generated question " + std::to_string(n);
    q.origin = QuestionOrigin::generated;
    q.originality = o;
    q.recency = r;
    q.importance = i;
    return q;
}

QuestionPool make_pool(std::size_t backlog, std::size_t bank, std::uint64_t seed = 1) {
    QuestionPool pool;
    pool.rng = SeededRng(seed);
    for (std::size_t i = 0; i < backlog; ++i) {
        add_question(pool, generated(pool.next_question_number, 5, 5, 1 + static_cast<int>(i % 5)));
    }
    for (std::size_t i = 0; i < bank; ++i) {
        Question q;
        q.id = question_id(pool.next_question_number);
        q.text = "bank question " + std::to_string(i);
        q.origin = QuestionOrigin::predefined;
        q.theme = kAllThemes[i % kThemeCount];
        add_question(pool, q);
    }
    return pool;
}

std::size_t count_origin(const std::vector<Question>& qs, QuestionOrigin origin) {
    return static_cast<std::size_t>(
        std::count_if(qs.begin(), qs.end(), [&](const Question& q) { return q.origin == origin; }));
}

std::string long_answer(const std::string& id) {
    return "A considered answer to " + id + " from the field team.";
}

// ---------------------------------------------------------------------------

void bootstrap_contract(Checks& c) {
    std::vector<std::pair<std::string, std::string>> inputs{{"stations", testing::sample_csv()}};
    const auto corpus = nlohmann::json::parse(testing::read_file(testing::source_dir() / "corpus" / "expected.json"));
    for (const auto& [file, want] : corpus.items()) {
        if (!want.contains("error")) inputs.emplace_back(file, testing::read_file(testing::source_dir() / "corpus" / file));
    }
    std::mt19937_64 rng(30);
    for (int i = 0; i < 5; ++i) {
        inputs.emplace_back("random" + std::to_string(i), testing::random_numeric_csv(rng, 1 + rng() % 200, 1 + rng() % 10));
    }
    for (const auto& [name, bytes] : inputs) {
        const auto ds = ingest::parse_tabular(bytes, {}, name);
        MockProvider mock(3);
        const auto start = Wall::now();
        const auto boot = bootstrap(ds, mock, default_bank(), 3, 12000);
        const double took = seconds_since(start);
        const auto shown_generated = count_origin(boot.board.slots, QuestionOrigin::generated);
        c.expect(boot.pool.generated_backlog.size() + shown_generated == kInitialGenerated,
                 name + ": 30 generated questions");
        c.expect(boot.pool.generated_backlog.size() == 25, name + ": 25 left in the backlog");
        c.expect(boot.board.slots.size() == 10, name + ": board of 10");
        c.expect(count_origin(boot.board.slots, QuestionOrigin::predefined) == 5, name + ": 5 predefined shown");
        c.expect(shown_generated == 5, name + ": 5 generated shown");
        for (const auto& q : boot.pool.generated_backlog) c.expect(q.recency == 5, name + ": fresh recency");
        c.expect(took < 1.0, name + ": bootstrap under 1 s");
    }
}

void fill_parity(Checks& c) {
    for (std::size_t d = 0; d <= 4; ++d) {
        auto pool = make_pool(40, 49);
        DisplayBoard board;
        fill_board(board, pool);
        while (board.slots.size() > d) remove_question(board, pool, board.slots.back().id);
        const auto plan = plan_fill(board, pool);
        const std::size_t e = kBoardCapacity - d;
        c.expect(plan.predefined.size() == e / 2, "d=" + std::to_string(d) + " predefined floor(e/2)");
        c.expect(plan.generated.size() == (e + 1) / 2, "d=" + std::to_string(d) + " generated ceil(e/2)");
    }
    auto pool = make_pool(40, 49);
    DisplayBoard board;
    board.slots = {generated(900, 5, 5, 5), generated(901, 5, 5, 5)};
    auto plan = plan_fill(board, pool);
    c.expect(plan.predefined.size() == 4 && plan.generated.size() == 4, "e=8 gives 4+4");
    board.slots.pop_back();
    plan = plan_fill(board, pool);
    c.expect(plan.predefined.size() == 4 && plan.generated.size() == 5, "e=9 gives 4+5");

    DisplayBoard empty;
    auto exhausted = make_pool(30, 0);
    plan = plan_fill(empty, exhausted);
    c.expect(plan.predefined.empty() && plan.generated.size() == 10, "empty bank gives all generated");
}

void refill_gating(Checks& c) {
    for (std::size_t d = 0; d <= kBoardCapacity; ++d) {
        DisplayBoard board;
        for (std::size_t i = 0; i < d; ++i) board.slots.push_back(generated(i + 1, 5, 5, 5));
        c.expect(refill_enabled(board) == (d <= kRefillThreshold), "refill_enabled at " + std::to_string(d));
    }
    testing::ServiceHarness h;
    const auto sid = h.upload(testing::sample_csv());
    c.expect(!sid.empty(), "upload");
    if (sid.empty()) return;
    const auto board = h.get_json("/sessions/" + sid + "/board");
    for (std::size_t shown = 10; shown >= 5; --shown) {
        auto res = h.client().Post("/sessions/" + sid + "/board/refill");
        c.expect(res && res->status == 409, "409 with " + std::to_string(shown) + " displayed");
        c.expect(res && nlohmann::json::parse(res->body)["error"] == "refill_not_enabled", "error name");
        const std::string qid = board["questions"][10 - shown]["id"];
        h.client().Delete("/sessions/" + sid + "/questions/" + qid);
    }
    auto res = h.client().Post("/sessions/" + sid + "/board/refill");
    c.expect(res && res->status == 200, "refill allowed with 4 displayed");
}

void annotation_trigger(Checks& c) {
    const auto start = Wall::now();
    MockProvider provider(21);
    MemoryEventStore store;
    StepClock clock;
    SessionOptions options;
    options.seed = 21;
    auto session = Session::create("t", "stations.csv", testing::sample_csv(), options, provider, store, clock);
    std::mt19937_64 rng(21);
    std::size_t commits = 0;
    for (int step = 0; step < 100; ++step) {
        const auto before = session->state();
        const auto op = rng() % 4;
        std::optional<Annotation> note;
        engine::CommitOutcome commit;
        if (op == 0 || before.board.slots.empty()) {
            auto out = session->annotate(Selection::of_rows({rng() % 6}), "note " + std::to_string(step));
            note = out.annotation;
            commit = out.commit;
        } else if (op == 1) {
            const auto& q = before.board.slots[rng() % before.board.slots.size()];
            auto out = session->submit_answer(q.id, long_answer(q.id));
            note = out.annotation;
            commit = out.commit;
        } else if (op == 2) {
            session->remove_question(before.board.slots[rng() % before.board.slots.size()].id);
        } else if (engine::refill_enabled(before.board)) {
            session->refill();
        }
        const auto after = session->state();
        if (session->board().refill_enabled) session->refill();
        if (!note) continue;
        ++commits;
        const std::string tag = "step " + std::to_string(step) + ": ";
        // Recency of every question still waiting dropped by one, floor 1.
        std::map<std::string, int> prior;
        for (const auto* bucket : {&before.board.slots, &before.pool.generated_backlog, &before.pool.predefined_bank}) {
            for (const auto& q : *bucket) prior[q.id] = q.recency;
        }
        for (const auto* bucket : {&after.board.slots, &after.pool.generated_backlog, &after.pool.predefined_bank}) {
            for (const auto& q : *bucket) {
                auto it = prior.find(q.id);
                if (it != prior.end()) c.expect(q.recency == std::max(1, it->second - 1), tag + "recency decay");
            }
        }
        std::size_t linked = 0;
        for (const auto& q : after.pool.generated_backlog) {
            if (!prior.count(q.id) && q.trigger_annotation_id == note->id) ++linked;
        }
        c.expect(commit.follow_ups_added == kFollowUpsPerAnnotation, tag + "5 follow-ups reported");
        c.expect(linked == kFollowUpsPerAnnotation, tag + "5 follow-ups linked to the annotation");
        c.expect(after.pool.generated_backlog.size() >= kReplenishBelow, tag + "backlog at least 10");
    }
    c.expect(commits > 20, "enough commits exercised");
    c.expect(seconds_since(start) < 5.0, "100 events under 5 s");
}

void eq1_scoring(Checks& c) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const int o = 1 + rng() % 5, r = 1 + rng() % 5, m = 1 + rng() % 5;
        c.expect(total_score(generated(1, o, r, m)) == o + r + m, "component sum");
    }
    for (int round = 0; round < 300; ++round) {
        QuestionPool pool;
        const std::size_t n = rng() % 51;
        const int spread = 1 + static_cast<int>(rng() % 3);
        for (std::size_t i = 0; i < n; ++i) {
            add_question(pool, generated(pool.next_question_number, 1 + rng() % spread, 1 + rng() % spread,
                                         1 + rng() % spread));
        }
        const std::size_t k = rng() % 12;
        SeededRng shared(rng());
        const auto expected = oracle::select_generated_ids(pool, k, shared);
        SeededRng used = shared;
        std::vector<std::string> ids;
        for (const auto& q : select_generated(pool, k, used)) ids.push_back(q.id);
        c.expect(ids == expected, "select_generated round " + std::to_string(round));
    }
}

void originality_boundaries(Checks& c) {
    const auto q = generated(1, 5, 5, 3);
    c.expect(originality(q, {}) == 5, "empty history gives 5");
    c.expect(originality(q, {q}) == 1, "identical history gives 1");
    c.expect(originality(q, {q, q, q}) == 1, "all-identical history gives 1");
    auto far = q;
    far.text = "unrelated wording entirely";
    int previous = 5;
    for (int step = 0; step <= 200; ++step) {
        const double s = step / 200.0;
        const int value = originality(q, {far, far, far}, [s](std::string_view, std::string_view) { return s; });
        c.expect(value >= 1 && value <= 5, "range at " + std::to_string(s));
        c.expect(value <= previous, "non-increasing at " + std::to_string(s));
        previous = value;
    }
    // Mean similarity over mixed histories, sampled.
    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const std::size_t same = rng() % 6, other = 1 + rng() % 6;
        std::vector<Question> history;
        auto twin = q;
        for (std::size_t k = 0; k < same; ++k) history.push_back(twin);
        for (std::size_t k = 0; k < other; ++k) history.push_back(far);
        auto more = history;
        more.push_back(twin);
        c.expect(originality(q, more) <= originality(q, history), "more overlap never raises originality");
    }
}

void validation_pipeline(Checks& c) {
    Question q;
    q.id = "q-0031";
    q.text = "What unit is the reading column measured in?";
    q.status = QuestionStatus::displayed;
    auto purposes = [](const MockProvider& p) {
        std::vector<Purpose> out;
        for (const auto& r : p.call_log()) out.push_back(r.purpose);
        return out;
    };
    MockProvider m1(1);
    const auto short_result = validation::validate_answer(q, "Celsius", {}, m1);
    c.expect(!short_result.accepted() && short_result.stage == ValidationStage::faithfulness, "short answer rejected at V1");
    c.expect(!short_result.feedback.empty(), "V1 rejection carries feedback");
    c.expect(purposes(m1) == std::vector<Purpose>{Purpose::faithfulness}, "no V2 call after V1 failure");

    MockProvider m2(1);
    const auto contra = validation::validate_answer(q, "Degrees CONTRA the station manual.", {}, m2);
    c.expect(!contra.accepted() && contra.stage == ValidationStage::contradiction, "CONTRA rejected at V2");
    MockProvider m3(1);
    c.expect(validation::validate_answer(q, "Degrees Celsius, read at noon each day.", {}, m3).accepted(),
             "plain long answer accepted");

    MockProvider provider(8);
    MemoryEventStore store;
    StepClock clock;
    auto session = Session::create("v", "stations.csv", testing::sample_csv(), {}, provider, store, clock);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        if (session->board().refill_enabled) session->refill();
        const auto qid = session->board().questions.front().id;
        const auto hash = session->hash();
        const auto count = session->annotations().size();
        const std::size_t log_before = provider.call_log().size();
        const auto kind = rng() % 3;
        const std::string text = kind == 0 ? "too short" : kind == 1 ? "Observed CONTRA the manual, says " + qid
                                                                     : long_answer(qid);
        const auto out = session->submit_answer(qid, text);
        const auto log = provider.call_log();
        for (std::size_t k = log_before; k + 1 < log.size(); ++k) {
            if (log[k].purpose == Purpose::faithfulness && log[k + 1].purpose == Purpose::contradiction) {
                c.expect(out.result.stage != ValidationStage::faithfulness, "V2 after a V1 failure");
            }
        }
        if (out.result.accepted()) {
            c.expect(session->annotations().size() == count + 1, "one annotation per acceptance");
        } else {
            c.expect(session->hash() == hash, "rejection leaves the hash unchanged");
            c.expect(session->annotations().size() == count, "rejection adds no annotation");
            if (out.result.stage == ValidationStage::faithfulness) {
                bool saw_v2 = false;
                for (std::size_t k = log_before; k < log.size(); ++k) saw_v2 |= log[k].purpose == Purpose::contradiction;
                c.expect(!saw_v2, "V2 skipped after V1 rejection");
            }
        }
    }
}

void theme_summaries(Checks& c) {
    MockProvider provider(13);
    MemoryEventStore store;
    StepClock clock;
    SessionOptions options;
    options.seed = 13;
    auto session = Session::create("th", "stations.csv", testing::sample_csv(), options, provider, store, clock);
    std::size_t summarized = 0;
    for (int i = 0; i < 30; ++i) {
        if (session->board().refill_enabled) session->refill();
        const auto board = session->board();
        if (board.questions.empty()) break;
        const auto& q = board.questions[i % board.questions.size()];
        session->submit_answer(q.id, long_answer(q.id));
        const auto progress = session->progress();
        for (auto theme : kAllThemes) {
            const auto& t = progress[index_of(theme)];
            c.expect(t.summary.has_value() == (t.answered >= kSummaryThreshold),
                     std::string(to_string(theme)) + " summary iff answered >= 2");
        }
    }
    for (const auto& t : session->progress()) summarized += t.summary.has_value();
    c.expect(summarized > 0, "some theme reached a summary");

    std::mt19937_64 rng(21);
    for (int round = 0; round < 300; ++round) {
        std::vector<Question> bank;
        const std::size_t n = rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            Question q;
            q.id = question_id(i + 1);
            q.text = "bank " + std::to_string(i);
            q.origin = QuestionOrigin::predefined;
            q.theme = kAllThemes[rng() % kThemeCount];
            bank.push_back(q);
        }
        SeededRng r(rng());
        const auto picks = select_predefined(bank, rng() % 12, r);
        const auto problem = oracle::predefined_mismatch(bank, picks);
        c.expect(problem.empty(), "predefined pick round " + std::to_string(round) + ": " + problem);
    }
}

void persistence(Checks& c) {
    const auto start = Wall::now();
    MemoryEventStore source;
    testing::run_scripted_session(3, source, 8, 5);
    const auto events = source.read_events("script");
    c.expect(events.size() <= 200, "session of at most 200 events (" + std::to_string(events.size()) + ")");
    c.expect(events.size() > kSnapshotInterval, "session spans a snapshot");
    testing::TempDir dir("accept");
    std::mt19937_64 rng(3);
    for (const auto& p : testing::crash_injection_mismatches(events, dir.path(), rng)) c.expect(false, p);

    // Hash after reload equals a full replay, via snapshot plus tail.
    FileEventStore files(dir.path() / "live");
    const auto scripted = testing::run_scripted_session(4, files, 8, 5);
    MockProvider provider(4);
    StepClock clock;
    const auto loaded = Session::load("script", provider, files, clock);
    const auto full = replay(files.read_events("script"));
    c.expect(files.latest_snapshot("script").has_value(), "a snapshot was written");
    c.expect(loaded->state() == full, "snapshot plus tail equals full replay");
    c.expect(loaded->hash() == state_hash(full) && loaded->hash() == scripted.state_hash, "hash after reload");

    // Export and load back, field by field.
    const auto doc = nlohmann::json::parse(scripted.export_dump);
    const auto back = load_export(doc);
    c.expect(back.dataset.name == full.dataset_name && back.dataset.row_count == full.dataset->row_count(),
             "dataset fields");
    c.expect(back.annotations.size() == full.annotations.size(), "annotation count");
    for (std::size_t i = 0; i < std::min(back.annotations.size(), full.annotations.size()); ++i) {
        const auto& a = full.annotations[i];
        const auto& b = back.annotations[i];
        c.expect(b.id == a.id && b.sequence == a.sequence && b.text == a.text && b.origin == a.origin &&
                     b.created_at == a.created_at && b.general == a.is_general(),
                 "annotation " + a.id);
        if (!a.is_general()) c.expect(b.selection == a.selection, "selection of " + a.id);
        c.expect(b.question.has_value() == (a.origin == AnnotationOrigin::answer), "question link of " + a.id);
    }
    const auto progress = theme_progress(full);
    for (auto theme : kAllThemes) {
        const auto i = index_of(theme);
        c.expect(back.theme_summaries[i] == progress[i].summary, "summary of " + std::string(to_string(theme)));
        c.expect(back.theme_progress[i].answered == progress[i].answered, "progress of " + std::string(to_string(theme)));
    }
    c.expect(export_document(full) == doc, "export of the replayed state is identical");
    c.expect(seconds_since(start) < 30.0, "under 30 s");
}

void ingestion_and_stats(Checks& c) {
    for (const auto& p : testing::corpus_mismatches()) c.expect(false, p);

    std::string ok = "c0";
    for (int i = 1; i < 20; ++i) ok += ",c" + std::to_string(i);
    std::string wide = ok + ",c20\n";
    ok += "\n";
    std::string row = "1";
    for (int i = 1; i < 20; ++i) row += ",1";
    std::string rows = ok;
    for (int i = 0; i < 10000; ++i) rows += row + "\n";
    c.expect(!code_of([&] { ingest::parse_tabular(rows); }), "10000 x 20 accepted");
    c.expect(code_of([&] { ingest::parse_tabular(rows + row + "\n"); }) == ErrorCode::LimitExceeded, "10001 rows");
    c.expect(code_of([&] { ingest::parse_tabular(wide); }) == ErrorCode::LimitExceeded, "21 columns");

    std::mt19937_64 rng(100);
    for (int i = 0; i < 100; ++i) {
        const auto ds = ingest::parse_tabular(testing::random_numeric_csv(rng, 1 + rng() % 200, 1 + rng() % 10));
        for (std::size_t col = 0; col < ds.column_count(); ++col) {
            if (ds.column(col).null_count == ds.row_count()) continue;
            std::optional<std::size_t> bins;
            if (rng() % 2) bins = 1 + rng() % 30;
            const auto spec = stats::histogram(ds, col, bins);
            const auto problem = oracle::histogram_mismatch(ds, col, spec);
            c.expect(problem.empty(), "histogram dataset " + std::to_string(i) + ": " + problem);
            const double low = -60.0 + static_cast<double>(rng() % 120);
            const double high = low + static_cast<double>(rng() % 60);
            c.expect(stats::rows_in_range(ds, col, low, high) == oracle::linear_range(ds, col, low, high),
                     "rows_in_range dataset " + std::to_string(i));
        }
    }
}

bool in_order(std::string_view prompt, const std::vector<std::string_view>& headings) {
    std::size_t last = 0;
    for (auto h : headings) {
        const auto pos = prompt.find("\n\n" + std::string(h) + "\n");
        if (pos == std::string_view::npos || pos < last) return false;
        last = pos + 1;
    }
    return true;
}

void prompt_fidelity(Checks& c) {
    using namespace prompts;
    using namespace prompts::heading;
    const auto cases = testing::golden_cases();
    for (const auto& [name, prompt] : cases) {
        if (name.starts_with("dataset")) continue;
        c.expect(prompt.starts_with(verbatim::kRole), name + " opens with the role paragraph");
    }
    c.expect(role_text() == verbatim::kRole, "role text");
    c.expect(task_t1_text() == verbatim::kTaskT1, "T1 task text");
    c.expect(task_v1_text() == verbatim::kTaskV1, "V1 task text");

    const auto text = serialize_dataset(ingest::parse_tabular(testing::sample_csv(), {}, "stations.csv"), 12000);
    const auto notes = testing::fixture_annotations();
    const auto t1 = render_T1(text);
    c.expect(t1.find("Generate 30 key questions") != std::string::npos, "T1 asks for 30 key questions");
    c.expect(segment_body(t1, task) == std::string(verbatim::kTaskT1), "T1 task segment verbatim");
    c.expect(in_order(t1, {dataset, task, output_format}), "T1 order");
    c.expect(in_order(render_T2(text, {"q"}, notes, std::string("q"), notes.back()),
                      {dataset, questions_all, annotations_all, question_recent, annotation_recent, task, output_format}),
             "T2 order");
    const auto v1 = render_V1("q", "a");
    c.expect(in_order(v1, {question, answer, task, output_format}), "V1 order");
    c.expect(segment_body(v1, task) == std::string(verbatim::kTaskV1), "V1 task segment verbatim");
    c.expect(in_order(render_V2(notes, "c", 8000), {existing_annotations, candidate_annotation, task, output_format}),
             "V2 order");

    const auto again = testing::golden_cases();
    c.expect(again == cases, "rendering is stable across runs");
    for (const auto& [name, prompt] : cases) {
        const auto path = testing::source_dir() / "golden" / name;
        c.expect(std::filesystem::exists(path) && testing::read_file(path) == prompt, "golden " + name);
    }
}

void determinism(Checks& c, Wall::time_point suite_start) {
    MemoryEventStore a;
    MemoryEventStore b;
    const auto first = testing::run_scripted_session(42, a, 10, 6);
    const auto second = testing::run_scripted_session(42, b, 10, 6);
    const auto doc = nlohmann::json::parse(first.export_dump);
    c.expect(doc["annotations"].size() == 16, "10 annotations and 6 answers exported");
    c.expect(first.export_dump == second.export_dump, "byte-identical exports");
    c.expect(first.call_log == second.call_log, "byte-identical call logs");
    c.expect(first.state_hash == second.state_hash, "same state hash");
    c.expect(seconds_since(suite_start) < 60.0, "whole run under 60 s");
}

} // namespace

int main() {
    const auto suite_start = Wall::now();
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria{
        {"bootstrap contract", bootstrap_contract},
        {"fill parity", fill_parity},
        {"refill gating", refill_gating},
        {"annotation trigger contract", annotation_trigger},
        {"eq. 1 scoring", eq1_scoring},
        {"originality boundaries", originality_boundaries},
        {"validation pipeline", validation_pipeline},
        {"theme summaries", theme_summaries},
        {"persistence", persistence},
        {"ingestion and stats", ingestion_and_stats},
        {"prompt fidelity", prompt_fidelity},
        {"determinism", [&](Checks& c) { determinism(c, suite_start); }},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Checks checks;
        const auto start = Wall::now();
        try {
            run(checks);
        } catch (const std::exception& e) {
            checks.expect(false, std::string("threw: ") + e.what());
        }
        const double took = seconds_since(start);
        if (checks.passed()) {
            std::printf("PASS %-28s %6zu checks  %.2fs\n", name.c_str(), checks.count(), took);
        } else {
            ++failed;
            std::printf("FAIL %-28s %zu of %zu checks failed  %.2fs\n", name.c_str(), checks.failed(), checks.count(),
                        took);
            for (const auto& f : checks.failures()) std::printf("     - %s\n", f.c_str());
        }
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
