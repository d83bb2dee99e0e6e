#include "elicit/service.hpp"

#include <httplib.h>

#include <charconv>
#include <random>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"
#include "elicit/ingest.hpp"
#include "elicit/json_io.hpp"

namespace elicit {

using nlohmann::json;

std::string random_session_id() {
    std::random_device device;
    std::uint64_t hi = (static_cast<std::uint64_t>(device()) << 32) | device();
    std::uint64_t lo = (static_cast<std::uint64_t>(device()) << 32) | device();
    return "s" + to_hex(hi) + to_hex(lo);
}

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownQuestion:
    case ErrorCode::NotDisplayed:
        return 404;
    case ErrorCode::RefillNotEnabled:
    case ErrorCode::SequenceConflict:
    case ErrorCode::SessionBusy:
    case ErrorCode::PreconditionNotMet:
    case ErrorCode::NoAnnotations:
        return 409;
    case ErrorCode::AuthError:
    case ErrorCode::Timeout:
    case ErrorCode::RateLimited:
    case ErrorCode::TransportError:
    case ErrorCode::ProviderError:
    case ErrorCode::MalformedProviderOutput:
        return 502;
    case ErrorCode::StorageError:
    case ErrorCode::CorruptLog:
    case ErrorCode::UnboundSlot:
    case ErrorCode::MalformedOutput:
    case ErrorCode::CountMismatch:
        return 500;
    default:
        return 400;
    }
}

json error_body(const Error& error) {
    json body{{"error", error_name(error.code())}, {"message", error.what()}};
    if (is_provider_failure(error.code())) body["retryable"] = error.code() != ErrorCode::AuthError;
    return body;
}

json board_json(const BoardView& board) {
    return json{{"questions", board.questions},
                {"refill_enabled", board.refill_enabled},
                {"board_version", board.board_version}};
}

json commit_json(const engine::CommitOutcome& outcome) {
    json j{{"follow_ups_added", outcome.follow_ups_added}, {"replenished", outcome.replenished}};
    if (outcome.failure) j["generation_error"] = error_name(*outcome.failure);
    return j;
}

json submit_json(const SubmitOutcome& outcome) {
    json j{{"verdict", to_string(outcome.result.verdict)}, {"feedback", outcome.result.feedback}};
    if (outcome.result.stage) j["stage"] = to_string(*outcome.result.stage);
    if (outcome.annotation) {
        j["annotation"] = *outcome.annotation;
        j["generation"] = commit_json(outcome.commit);
    }
    return j;
}

json histogram_json(const stats::HistogramSpec& spec, const Dataset& dataset) {
    return json{{"column_index", spec.column_index},
                {"column", dataset.column(spec.column_index).name},
                {"bin_count", spec.bin_count},
                {"bin_edges", spec.bin_edges},
                {"counts", spec.counts},
                {"matching_row_ids", spec.matching_row_ids}};
}

json scatter_json(const std::vector<stats::ScatterPoint>& points, std::size_t x, std::size_t y) {
    json list = json::array();
    for (const auto& p : points) list.push_back({{"row_id", p.row_id}, {"x", p.x}, {"y", p.y}});
    return json{{"x", x}, {"y", y}, {"points", std::move(list)}};
}

json summaries_json(const std::array<ThemeProgress, kThemeCount>& progress) {
    json themes = json::object();
    for (auto theme : kAllThemes) {
        const auto& p = progress[index_of(theme)];
        themes[std::string(to_string(theme))] = {{"answered", p.answered},
                                                 {"unanswered_bank", p.unanswered_bank},
                                                 {"summary", p.summary ? json(*p.summary) : json(nullptr)},
                                                 {"summary_stale", p.summary_stale}};
    }
    return json{{"themes", std::move(themes)}};
}

json dataset_page_json(const Dataset& dataset, std::size_t offset, std::size_t limit) {
    json columns = json::array();
    for (const auto& c : dataset.columns()) {
        columns.push_back({{"name", c.name}, {"type", to_string(c.inferred_type)}, {"null_count", c.null_count}});
    }
    json rows = json::array();
    const auto end = std::min(dataset.row_count(), offset + limit);
    for (std::size_t r = offset; r < end; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < dataset.column_count(); ++c) {
            const auto& cell = dataset.cell(r, c);
            row.push_back(cell.is_null ? json(nullptr) : json(cell.raw));
        }
        rows.push_back(std::move(row));
    }
    return json{{"id", dataset.id()},     {"name", dataset.name()}, {"row_count", dataset.row_count()},
                {"columns", columns},     {"offset", offset},        {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------

Service::Service(EventStore& store, CompletionProvider& provider, Clock& clock, ServiceConfig config)
    : store_(store), provider_(provider), clock_(clock), config_(std::move(config)) {
    config_.session.wait_for_writer = false;
    if (!config_.id_generator) config_.id_generator = random_session_id;
}

std::shared_ptr<Session> Service::session(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    std::shared_ptr<Session> loaded = Session::load(id, provider_, store_, clock_, false);
    sessions_[id] = loaded;
    return loaded;
}

std::shared_ptr<Session> Service::create_session(const std::string& name, std::string bytes) {
    std::string id = config_.id_generator();
    std::shared_ptr<Session> created =
        Session::create(id, name, std::move(bytes), config_.session, provider_, store_, clock_);
    std::lock_guard lock(sessions_mutex_);
    sessions_[id] = created;
    return created;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

std::optional<std::size_t> parse_index(std::string_view text) {
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
    return value;
}

std::size_t column_ref(const Dataset& dataset, const std::string& ref) {
    if (auto index = parse_index(ref)) return *index;
    for (std::size_t i = 0; i < dataset.column_count(); ++i) {
        if (dataset.column(i).name == ref) return i;
    }
    throw Error(ErrorCode::OutOfBounds, "no column " + ref);
}

std::string required_param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) throw Error(ErrorCode::InvalidArgument, std::string("missing parameter ") + name);
    return req.get_param_value(name);
}

double number_param(const httplib::Request& req, const char* name) {
    const auto value = ingest::parse_number(required_param(req, name));
    if (!value) throw Error(ErrorCode::InvalidArgument, std::string("parameter ") + name + " is not a number");
    return *value;
}

std::size_t index_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    if (!req.has_param(name)) return fallback;
    const auto value = parse_index(req.get_param_value(name));
    if (!value) throw Error(ErrorCode::InvalidArgument, std::string("parameter ") + name + " is not an index");
    return *value;
}

} // namespace

void Service::mount(httplib::Server& server) {
    // Wraps a handler with token checking and error mapping.
    auto route = [this](auto handler) {
        return [this, handler](const httplib::Request& req, httplib::Response& res) {
            if (config_.token) {
                const auto header = req.get_header_value("Authorization");
                if (header != "Bearer " + *config_.token) {
                    send_json(res, 401, json{{"error", "Unauthorized"}, {"message", "missing or wrong token"}});
                    return;
                }
            }
            try {
                handler(req, res);
            } catch (const Error& e) {
                send_json(res, http_status(e.code()), error_body(e));
            } catch (const std::exception& e) {
                send_json(res, 500, json{{"error", "InternalError"}, {"message", e.what()}});
            }
        };
    };
    auto body_json = [](const httplib::Request& req) { return parse_json(req.body); };

    server.Get("/health", route([](const httplib::Request&, httplib::Response& res) {
                   send_json(res, 200, json{{"status", "ok"}});
               }));

    server.Post("/sessions", route([this](const httplib::Request& req, httplib::Response& res) {
                    std::string name = req.has_param("name") ? req.get_param_value("name") : "dataset";
                    std::string bytes;
                    if (req.is_multipart_form_data()) {
                        if (!req.has_file("file")) throw Error(ErrorCode::InvalidArgument, "missing multipart field file");
                        const auto file = req.get_file_value("file");
                        if (!file.filename.empty() && !req.has_param("name")) name = file.filename;
                        bytes = file.content;
                    } else {
                        bytes = req.body;
                    }
                    auto s = create_session(name, std::move(bytes));
                    send_json(res, 201, json{{"session_id", s->id()}});
                }));

    server.Get(R"(/sessions/([^/]+)/board)", route([this](const httplib::Request& req, httplib::Response& res) {
                   const auto board = session(req.matches[1])->board();
                   const auto etag = "\"" + std::to_string(board.board_version) + "\"";
                   res.set_header("ETag", etag);
                   if (req.get_header_value("If-None-Match") == etag) {
                       res.status = 304;
                       return;
                   }
                   send_json(res, 200, board_json(board));
               }));

    server.Post(R"(/sessions/([^/]+)/board/refill)", route([this](const httplib::Request& req, httplib::Response& res) {
                    auto s = session(req.matches[1]);
                    const auto filled = s->refill();
                    json body = board_json(s->board());
                    body["filled"] = {{"predefined", filled.predefined},
                                      {"generated", filled.generated},
                                      {"insufficient", filled.insufficient}};
                    send_json(res, 200, body);
                }));

    server.Delete(R"(/sessions/([^/]+)/questions/([^/]+))",
                  route([this](const httplib::Request& req, httplib::Response& res) {
                      auto s = session(req.matches[1]);
                      s->remove_question(req.matches[2]);
                      send_json(res, 200, board_json(s->board()));
                  }));

    server.Post(R"(/sessions/([^/]+)/questions/([^/]+)/answer)",
                route([this, body_json](const httplib::Request& req, httplib::Response& res) {
                    auto s = session(req.matches[1]);
                    const auto body = body_json(req);
                    send_json(res, 200, submit_json(s->submit_answer(req.matches[2], field<std::string>(body, "text"))));
                }));

    server.Post(R"(/sessions/([^/]+)/annotations)",
                route([this, body_json](const httplib::Request& req, httplib::Response& res) {
                    auto s = session(req.matches[1]);
                    const auto body = body_json(req);
                    if (!body.contains("selection")) throw Error(ErrorCode::InvalidArgument, "missing field selection");
                    const auto selection = body["selection"].get<Selection>();
                    const auto outcome = s->annotate(selection, field<std::string>(body, "text"));
                    json out = outcome.annotation;
                    out["generation"] = commit_json(outcome.commit);
                    send_json(res, 201, out);
                }));

    server.Get(R"(/sessions/([^/]+)/annotations)", route([this](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, 200, json{{"annotations", session(req.matches[1])->annotations()}});
               }));

    server.Get(R"(/sessions/([^/]+)/annotations/([^/]+)/instances)",
               route([this](const httplib::Request& req, httplib::Response& res) {
                   auto s = session(req.matches[1]);
                   const auto state = s->state();
                   for (const auto& a : state.annotations) {
                       if (a.id != req.matches[2]) continue;
                       json cells = json::array();
                       for (const auto& c : selection_instances(a.selection, *state.dataset)) {
                           cells.push_back({{"row", c.row}, {"column", c.column}});
                       }
                       send_json(res, 200, json{{"annotation_id", a.id}, {"general", a.is_general()}, {"cells", cells}});
                       return;
                   }
                   send_json(res, 404, json{{"error", "UnknownAnnotation"}, {"message", "no such annotation"}});
               }));

    server.Get(R"(/sessions/([^/]+)/dataset)", route([this](const httplib::Request& req, httplib::Response& res) {
                   const auto state = session(req.matches[1])->state();
                   const auto offset = index_param(req, "offset", 0);
                   const auto limit = index_param(req, "limit", state.dataset->row_count());
                   send_json(res, 200, dataset_page_json(*state.dataset, offset, limit));
               }));

    server.Get(R"(/sessions/([^/]+)/columns/([^/]+)/histogram)",
               route([this](const httplib::Request& req, httplib::Response& res) {
                   const auto state = session(req.matches[1])->state();
                   const auto& ds = *state.dataset;
                   const auto column = column_ref(ds, req.matches[2]);
                   std::optional<std::size_t> bins;
                   if (req.has_param("bins")) bins = index_param(req, "bins", 0);
                   send_json(res, 200, histogram_json(stats::histogram(ds, column, bins), ds));
               }));

    server.Get(R"(/sessions/([^/]+)/scatter)", route([this](const httplib::Request& req, httplib::Response& res) {
                   const auto state = session(req.matches[1])->state();
                   const auto& ds = *state.dataset;
                   const auto x = column_ref(ds, required_param(req, "x"));
                   const auto y = column_ref(ds, required_param(req, "y"));
                   send_json(res, 200, scatter_json(stats::scatter_points(ds, x, y), x, y));
               }));

    server.Get(R"(/sessions/([^/]+)/rows-in-range)", route([this](const httplib::Request& req, httplib::Response& res) {
                   const auto state = session(req.matches[1])->state();
                   const auto& ds = *state.dataset;
                   const auto column = column_ref(ds, required_param(req, "column"));
                   const auto ids = stats::rows_in_range(ds, column, number_param(req, "low"), number_param(req, "high"));
                   send_json(res, 200, json{{"column_index", column}, {"row_ids", ids}});
               }));

    server.Get(R"(/sessions/([^/]+)/summaries)", route([this](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, 200, summaries_json(session(req.matches[1])->progress()));
               }));

    server.Post(R"(/sessions/([^/]+)/summaries/([^/]+))",
                route([this](const httplib::Request& req, httplib::Response& res) {
                    auto s = session(req.matches[1]);
                    const auto theme = parse_theme(std::string(req.matches[2]));
                    if (!theme) throw Error(ErrorCode::InvalidArgument, "unknown theme");
                    s->update_theme_summary(*theme);
                    send_json(res, 200, summaries_json(s->progress()));
                }));

    server.Get(R"(/sessions/([^/]+)/export)", route([this](const httplib::Request& req, httplib::Response& res) {
                   auto s = session(req.matches[1]);
                   const auto doc = s->export_annotations();
                   res.set_header("Content-Disposition", "attachment; filename=\"annotations-" + s->id() + ".json\"");
                   send_json(res, 200, doc);
               }));

    server.Post(R"(/sessions/([^/]+)/report)", route([this](const httplib::Request& req, httplib::Response& res) {
                    res.status = 200;
                    res.set_content(session(req.matches[1])->generate_report(), "text/markdown; charset=utf-8");
                }));
}

} // namespace elicit
