#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "elicit/session.hpp"
#include "elicit/stats.hpp"

namespace httplib {
class Server;
}

namespace elicit {

struct ServiceConfig {
    SessionOptions session;
    // When set, every request must carry "Authorization: Bearer <token>".
    std::optional<std::string> token;
    // Produces new session ids; defaults to 128 random bits in hex.
    std::function<std::string()> id_generator;
};

std::string random_session_id();

// HTTP status for a core error.
int http_status(ErrorCode code) noexcept;
// {"error": <name>, "message": ..., "retryable": bool (provider failures only)}
nlohmann::json error_body(const Error& error);

// Response bodies, shared by the handlers and the contract tests.
nlohmann::json board_json(const BoardView& board);
nlohmann::json submit_json(const SubmitOutcome& outcome);
nlohmann::json commit_json(const engine::CommitOutcome& outcome);
nlohmann::json histogram_json(const stats::HistogramSpec& spec, const Dataset& dataset);
nlohmann::json scatter_json(const std::vector<stats::ScatterPoint>& points, std::size_t x, std::size_t y);
nlohmann::json summaries_json(const std::array<ThemeProgress, kThemeCount>& progress);
nlohmann::json dataset_page_json(const Dataset& dataset, std::size_t offset, std::size_t limit);

// Routes requests to sessions held in `store`. Sessions are created on upload
// and loaded lazily on first access after a restart.
class Service {
public:
    Service(EventStore& store, CompletionProvider& provider, Clock& clock, ServiceConfig config = {});

    void mount(httplib::Server& server);

    // Throws Error{UnknownSession}.
    std::shared_ptr<Session> session(const std::string& id);
    std::shared_ptr<Session> create_session(const std::string& name, std::string bytes);

private:
    EventStore& store_;
    CompletionProvider& provider_;
    Clock& clock_;
    ServiceConfig config_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

} // namespace elicit
