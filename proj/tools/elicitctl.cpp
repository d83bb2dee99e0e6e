// Offline maintenance for session directories.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"
#include "elicit/ingest.hpp"
#include "elicit/question_engine.hpp"
#include "elicit/store.hpp"

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw elicit::Error(elicit::ErrorCode::InvalidArgument, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elicitctl: inspect datasets and session logs"};
    app.require_subcommand(1);
    std::string data_dir = "data";
    std::string session_id;
    std::string file;

    auto* inspect = app.add_subcommand("inspect", "parse a CSV file and print its inferred columns");
    inspect->add_option("file", file)->required()->check(CLI::ExistingFile);

    auto* verify = app.add_subcommand("verify", "replay a session log and print its state hash");
    auto* recover = app.add_subcommand("recover", "truncate a torn session log to its last intact record");
    auto* dump = app.add_subcommand("export", "print the export document of a session");
    for (auto* sub : {verify, recover, dump}) {
        sub->add_option("--data-dir", data_dir);
        sub->add_option("session", session_id)->required();
    }
    auto* bank = app.add_subcommand("bank", "print the built-in predefined question bank");
    CLI11_PARSE(app, argc, argv);

    try {
        if (*inspect) {
            const auto ds = elicit::ingest::parse_tabular(read_text(file), {}, file);
            std::cout << ds.row_count() << " rows\n";
            for (const auto& c : ds.columns()) {
                std::cout << c.name << "\t" << elicit::to_string(c.inferred_type) << "\tnulls=" << c.null_count << "\n";
            }
        } else if (*bank) {
            std::cout << elicit::engine::serialize_bank(elicit::engine::default_bank()) << "\n";
        } else {
            elicit::FileEventStore store(data_dir);
            if (*recover) {
                std::cout << "kept " << elicit::recover_session(store, session_id) << " events\n";
            } else {
                const auto state = elicit::replay(store.read_events(session_id));
                if (*verify) {
                    std::cout << state.last_sequence << " events, state " << elicit::to_hex(elicit::state_hash(state))
                              << "\n";
                } else {
                    std::cout << elicit::export_document(state).dump(2) << "\n";
                }
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "elicitctl: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
