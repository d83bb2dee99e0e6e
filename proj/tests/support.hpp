#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/ingest.hpp"
#include "elicit/provider.hpp"
#include "elicit/session.hpp"
#include "elicit/store.hpp"

namespace elicit::testing {

inline std::filesystem::path source_dir() {
    return ELICIT_TEST_SOURCE_DIR;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("elicit-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline const std::string& sample_csv() {
    static const std::string csv =
        "station,reading,recorded_at,status,note\n"
        "north,12.5,2024-03-01,ok,calibrated\n"
        "south,7.25,2024-03-02,ok,\n"
        "east,NA,2024-03-03,fault,sensor offline\n"
        "west,19,2024-03-04,ok,\"windy, gusts\"\n"
        "north,13.75,2024-03-05,ok,\n"
        "south,-2.5,2024-03-06,check,\"frost \"\"heavy\"\"\"\n";
    return csv;
}

// A rows x cols numeric table of small integers with roughly 10% nulls.
inline std::string random_numeric_csv(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::ostringstream out;
    for (std::size_t c = 0; c < cols; ++c) out << (c ? "," : "") << "c" << c;
    out << "\n";
    std::uniform_int_distribution<int> value(-50, 50);
    std::uniform_int_distribution<int> null_roll(0, 9);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out << ",";
            if (null_roll(rng) == 0) {
                out << "NA";
            } else {
                const int v = value(rng);
                // Mix integers and halves so bins see non-integral values too.
                if (v % 3 == 0) {
                    out << v << ".5";
                } else {
                    out << v;
                }
            }
        }
        out << "\n";
    }
    return out.str();
}

// Runs every file of the CSV conformance corpus against its expectation and
// returns one message per mismatch.
inline std::vector<std::string> corpus_mismatches() {
    std::vector<std::string> problems;
    const auto dir = source_dir() / "corpus";
    const auto expected = nlohmann::json::parse(read_file(dir / "expected.json"));
    for (const auto& [file, want] : expected.items()) {
        const std::string bytes = read_file(dir / file);
        if (want.contains("error")) {
            try {
                ingest::parse_tabular(bytes);
                problems.push_back(file + ": parsed, expected " + want["error"].get<std::string>());
            } catch (const Error& e) {
                if (error_name(e.code()) != want["error"].get<std::string>()) {
                    problems.push_back(file + ": got " + std::string(error_name(e.code())));
                }
            }
            continue;
        }
        try {
            const auto ds = ingest::parse_tabular(bytes);
            const auto& cols = want["columns"];
            const auto& rows = want["rows"];
            if (ds.column_count() != cols.size() || ds.row_count() != rows.size()) {
                problems.push_back(file + ": shape mismatch");
                continue;
            }
            for (std::size_t c = 0; c < cols.size(); ++c) {
                const auto& meta = ds.column(c);
                if (meta.name != cols[c][0].get<std::string>() ||
                    to_string(meta.inferred_type) != cols[c][1].get<std::string>() ||
                    meta.null_count != cols[c][2].get<std::size_t>()) {
                    problems.push_back(file + ": column " + std::to_string(c) + " metadata");
                }
            }
            std::vector<std::pair<std::size_t, std::size_t>> nulls;
            if (want.contains("nulls")) {
                for (const auto& n : want["nulls"]) nulls.emplace_back(n[0].get<std::size_t>(), n[1].get<std::size_t>());
            }
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    const auto& cell = ds.cell(r, c);
                    if (cell.raw != rows[r][c].get<std::string>()) {
                        problems.push_back(file + ": raw cell " + std::to_string(r) + "," + std::to_string(c));
                    }
                    const bool null_expected =
                        std::find(nulls.begin(), nulls.end(), std::pair{r, c}) != nulls.end();
                    if (cell.is_null != null_expected) {
                        problems.push_back(file + ": null flag " + std::to_string(r) + "," + std::to_string(c));
                    }
                }
            }
            // Serializing and parsing again keeps every raw cell.
            const auto again = ingest::parse_tabular(ingest::serialize_tabular(ds));
            if (again.cells() != ds.cells()) problems.push_back(file + ": serialize round-trip");
        } catch (const Error& e) {
            problems.push_back(file + ": " + e.what());
        }
    }
    return problems;
}

// Replays a recorded session log cut at every record boundary, each time with a
// torn fragment of the next record appended. After recovery the store must hold
// exactly the intact prefix, and loading must equal replaying that prefix.
// Returns one message per mismatch.
inline std::vector<std::string> crash_injection_mismatches(const std::vector<SessionEvent>& events,
                                                           const std::filesystem::path& work, std::mt19937_64& rng) {
    std::vector<std::string> problems;
    std::vector<std::string> records;
    for (const auto& e : events) records.push_back(encode_record(e));
    MockProvider provider(0);
    StepClock clock;
    SessionState expected;
    for (std::size_t k = 0; k <= events.size(); ++k) {
        if (k > 0) apply(expected, events[k - 1]);
        const auto root = work / ("cut-" + std::to_string(k));
        std::filesystem::create_directories(root / "s");
        std::string bytes;
        for (std::size_t i = 0; i < k; ++i) bytes += records[i];
        if (k < records.size()) {
            std::uniform_int_distribution<std::size_t> cut(1, records[k].size() - 1);
            bytes += records[k].substr(0, cut(rng));
        }
        write_file(root / "s" / "events.log", bytes);
        // Snapshots reach at most the last durable event.
        for (std::uint64_t seq = kSnapshotInterval; seq <= k; seq += kSnapshotInterval) {
            write_file(root / "s" / ("snapshot-" + std::to_string(seq) + ".json"),
                       state_to_json(replay({events.begin(), events.begin() + static_cast<std::ptrdiff_t>(seq)})).dump());
        }
        const std::string tag = "cut " + std::to_string(k) + ": ";
        FileEventStore store(root);
        if (k < records.size()) {
            try {
                store.read_events("s");
                problems.push_back(tag + "torn tail was not reported");
            } catch (const CorruptLogError& e) {
                if (e.good_events() != k) problems.push_back(tag + "wrong intact count");
            }
        }
        if (store.recover("s") != k) problems.push_back(tag + "recover kept the wrong count");
        if (k == 0) {
            if (store.read_events("s").size() != 0) problems.push_back(tag + "events survived an empty cut");
            continue;
        }
        if (store.read_events("s") != std::vector<SessionEvent>(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(k))) {
            problems.push_back(tag + "recovered events differ");
        }
        try {
            const auto session = Session::load("s", provider, store, clock);
            if (!(session->state() == expected)) problems.push_back(tag + "loaded state differs from replay");
        } catch (const Error& e) {
            problems.push_back(tag + e.what());
        }
        std::filesystem::remove_all(root);
    }
    return problems;
}

struct ScriptResult {
    std::string export_dump;
    std::string call_log;
    std::uint64_t state_hash = 0;
};

// upload -> `annotations` direct annotations -> `answers` accepted answers -> export.
inline ScriptResult run_scripted_session(std::uint64_t seed, EventStore& store, std::size_t annotations = 10,
                                         std::size_t answers = 6) {
    MockProvider provider(seed);
    StepClock clock;
    SessionOptions options;
    options.seed = seed;
    auto session = Session::create("script", "stations.csv", sample_csv(), options, provider, store, clock);
    const auto ds = session->state().dataset;
    for (std::size_t i = 0; i < annotations; ++i) {
        Selection selection = Selection::whole_dataset();
        switch (i % 4) {
        case 1: selection = Selection::of_columns({i % ds->column_count()}); break;
        case 2: selection = Selection::of_rows({i % ds->row_count()}); break;
        case 3: selection = Selection::of_cells({{i % ds->row_count(), i % ds->column_count()}}); break;
        default: break;
        }
        session->annotate(selection, "observation number " + std::to_string(i) + " about the stations");
    }
    std::size_t accepted = 0;
    while (accepted < answers) {
        auto board = session->board();
        if (board.questions.empty()) break;
        const auto& q = board.questions.front();
        // One rejection first, so the script exercises the resubmission loop.
        session->submit_answer(q.id, "too short");
        const auto out = session->submit_answer(q.id, "A considered answer to " + q.id + " from the field team.");
        if (out.result.accepted()) ++accepted;
        if (session->board().refill_enabled) session->refill();
    }
    ScriptResult result;
    result.export_dump = session->export_annotations().dump(2);
    result.call_log = format_call_log(provider.call_log());
    result.state_hash = session->hash();
    return result;
}

} // namespace elicit::testing
