#include "elicit/provider.hpp"

#include <cstdlib>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "elicit/domain.hpp"
#include "elicit/hash.hpp"
#include "elicit/prompts.hpp"
#include "elicit/text.hpp"

namespace elicit {

using nlohmann::json;

std::string_view to_string(Tier tier) noexcept {
    return tier == Tier::initial_generation ? "initial_generation" : "standard";
}

std::optional<Tier> parse_tier(std::string_view name) noexcept {
    if (name == "initial_generation") return Tier::initial_generation;
    if (name == "standard") return Tier::standard;
    return std::nullopt;
}

std::string_view to_string(Purpose purpose) noexcept {
    switch (purpose) {
    case Purpose::generation: return "generation";
    case Purpose::follow_up: return "follow_up";
    case Purpose::importance: return "importance";
    case Purpose::faithfulness: return "faithfulness";
    case Purpose::contradiction: return "contradiction";
    case Purpose::summary: return "summary";
    case Purpose::report: return "report";
    }
    return "?";
}

std::string format_call_log(const std::vector<CallRecord>& log) {
    std::string out;
    for (const auto& c : log) {
        out += std::string(to_string(c.purpose)) + " " + std::string(to_string(c.tier)) + " " + to_hex(c.prompt_hash) +
               " " + (c.failed ? std::string("failed") : to_hex(c.output_hash)) + "\n";
    }
    return out;
}

void CallLog::record(CallRecord entry) {
    std::lock_guard lock(mutex_);
    entries_.push_back(entry);
}

std::vector<CallRecord> CallLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

void CallLog::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
}

void ProviderConfig::validate() const {
    for (auto tier : {Tier::initial_generation, Tier::standard}) {
        auto it = tier_models.find(tier);
        if (it == tier_models.end() || it->second.empty()) {
            throw Error(ErrorCode::InvalidArgument, "no model configured for tier " + std::string(to_string(tier)));
        }
    }
    if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
    if (max_retries < 0) throw Error(ErrorCode::InvalidArgument, "max_retries must not be negative");
}

ProviderConfig provider_config_from_json(std::string_view json_text) {
    const auto doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorCode::InvalidArgument, "config is not a JSON object");
    ProviderConfig config;
    const json& p = doc.contains("provider") ? doc["provider"] : doc;
    try {
        if (p.contains("base_url")) config.base_url = p["base_url"].get<std::string>();
        if (p.contains("api_key_env")) config.api_key_env = p["api_key_env"].get<std::string>();
        if (p.contains("tier_models")) {
            config.tier_models.clear();
            for (const auto& [name, model] : p["tier_models"].items()) {
                auto tier = parse_tier(name);
                if (!tier) throw Error(ErrorCode::InvalidArgument, "unknown tier " + name);
                config.tier_models[*tier] = model.get<std::string>();
            }
        }
        if (p.contains("timeout_ms")) config.timeout = std::chrono::milliseconds(p["timeout_ms"].get<long>());
        if (p.contains("max_retries")) config.max_retries = p["max_retries"].get<int>();
        if (p.contains("prompt_budget")) config.prompt_budget = p["prompt_budget"].get<std::size_t>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("provider config: ") + e.what());
    }
    config.validate();
    return config;
}

// ---------------------------------------------------------------------------
// MockProvider

namespace {

std::size_t requested_count(std::string_view prompt) {
    const auto format = prompts::segment_body(prompt, prompts::heading::output_format).value_or("");
    const auto pos = format.find("exactly ");
    if (pos == std::string::npos) return 0;
    return static_cast<std::size_t>(std::strtoul(format.c_str() + pos + 8, nullptr, 10));
}

std::vector<std::string> column_names(std::string_view prompt) {
    std::vector<std::string> names;
    const auto body = prompts::segment_body(prompt, prompts::heading::dataset);
    if (!body) return names;
    bool in_columns = false;
    for (const auto& line : split_lines(*body)) {
        if (line == "Columns:") {
            in_columns = true;
            continue;
        }
        if (!in_columns) continue;
        if (!line.starts_with("- ")) break;
        const auto bracket = line.rfind(" [");
        names.push_back(line.substr(2, bracket == std::string::npos ? std::string::npos : bracket - 2));
    }
    return names;
}

std::size_t count_line(std::string_view body) {
    const auto pos = body.find("Count: ");
    if (pos == std::string_view::npos) return 0;
    return static_cast<std::size_t>(std::strtoul(std::string(body.substr(pos + 7)).c_str(), nullptr, 10));
}

} // namespace

void MockProvider::inject(Purpose purpose, Fault fault) {
    std::lock_guard lock(faults_mutex_);
    faults_[purpose].push_back(fault);
}

std::string MockProvider::complete(const CompletionRequest& request) {
    CallRecord record{request.purpose, request.tier, stable_hash(request.prompt), 0, false};
    std::optional<Fault> fault;
    {
        std::lock_guard lock(faults_mutex_);
        auto& queue = faults_[request.purpose];
        if (!queue.empty()) {
            fault = queue.front();
            queue.pop_front();
        }
    }
    if (fault && fault->kind == FaultKind::error) {
        record.failed = true;
        log_.record(record);
        throw Error(fault->code, "injected fault");
    }
    std::string output = fault ? std::string("I am unable to produce the requested structure.") : respond(request);
    record.output_hash = stable_hash(output);
    log_.record(record);
    return output;
}

std::string MockProvider::respond(const CompletionRequest& request) const {
    const std::string_view prompt = request.prompt;
    switch (request.purpose) {
    case Purpose::generation:
    case Purpose::follow_up: {
        const auto count = requested_count(prompt);
        const auto columns = column_names(prompt);
        const auto prompt_hash = stable_hash(prompt);
        std::vector<prompts::ParsedQuestion> questions;
        for (std::size_t k = 0; k < count; ++k) {
            const auto h = StableHash{}.add(seed_).add(prompt_hash).add(static_cast<std::uint64_t>(k)).value();
            std::string text = "MQ-" + to_hex(h) + ": about ";
            text += columns.empty() ? std::string("the dataset") : columns[k % columns.size()];
            questions.push_back({std::move(text), kAllThemes[k % kThemeCount]});
        }
        return prompts::format_questions_block(questions);
    }
    case Purpose::importance: {
        const auto question = prompts::segment_body(prompt, prompts::heading::question).value_or("");
        return std::to_string(1 + stable_hash(question) % 5);
    }
    case Purpose::faithfulness: {
        const auto answer = prompts::segment_body(prompt, prompts::heading::answer).value_or("");
        if (utf8_length(answer) < kMinAnswerLength) {
            return prompts::format_verdict_block(false, "answer too brief to address the question");
        }
        return prompts::format_verdict_block(true, "");
    }
    case Purpose::contradiction: {
        const auto candidate = prompts::segment_body(prompt, prompts::heading::candidate_annotation).value_or("");
        if (candidate.find(kContradictionToken) != std::string::npos) {
            return prompts::format_verdict_block(false, "conflicts with an existing annotation");
        }
        return prompts::format_verdict_block(true, "");
    }
    case Purpose::summary: {
        const auto theme = prompts::segment_body(prompt, prompts::heading::theme).value_or("?");
        const auto answered = prompts::segment_body(prompt, prompts::heading::answered_questions).value_or("");
        return "SUMMARY(" + theme + "): " + std::to_string(count_line(answered)) + " answers";
    }
    case Purpose::report: {
        const auto annotations = prompts::segment_body(prompt, prompts::heading::annotations_all).value_or("");
        return "OVERVIEW: " + std::to_string(count_line(annotations)) + " annotations";
    }
    }
    return {};
}

// ---------------------------------------------------------------------------
// HttpProvider

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()); v && *v) return std::string(v);
    return std::nullopt;
}

HttpProvider::HttpProvider(ProviderConfig config, HttpTransport transport, EnvLookup env, Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), env_(std::move(env)), sleeper_(std::move(sleeper)) {
    config_.validate();
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string HttpProvider::request_body(const CompletionRequest& request) const {
    json body{
        {"model", config_.tier_models.at(request.tier)},
        {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
    };
    switch (request.purpose) {
    case Purpose::importance:
    case Purpose::faithfulness:
    case Purpose::contradiction:
        body["temperature"] = 0;
        break;
    default:
        break;
    }
    return body.dump();
}

std::string HttpProvider::complete(const CompletionRequest& request) {
    if (request.prompt.empty()) throw Error(ErrorCode::InvalidArgument, "empty prompt");
    CallRecord record{request.purpose, request.tier, stable_hash(request.prompt), 0, true};
    auto fail = [&](ErrorCode code, const std::string& message) -> Error {
        log_.record(record);
        return Error(code, message);
    };

    const auto key = env_(config_.api_key_env);
    if (!key) throw fail(ErrorCode::AuthError, "environment variable " + config_.api_key_env + " is not set");

    HttpRequest http;
    http.url = config_.base_url + "/chat/completions";
    http.body = request_body(request);
    http.headers = {{"Authorization", "Bearer " + *key}, {"Content-Type", "application/json"}};
    http.timeout = config_.timeout;

    ErrorCode last_code = ErrorCode::TransportError;
    std::string last_message;
    const int attempts = 1 + config_.max_retries;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) sleeper_(std::chrono::milliseconds(500) * (1 << (attempt - 1)));
        const HttpResponse response = transport_(http);
        if (response.timed_out) {
            last_code = ErrorCode::Timeout;
            last_message = "request timed out";
            continue;
        }
        if (response.transport_failed) {
            last_code = ErrorCode::TransportError;
            last_message = response.error;
            continue;
        }
        if (response.status == 401 || response.status == 403) {
            throw fail(ErrorCode::AuthError, "status " + std::to_string(response.status));
        }
        if (response.status == 429) {
            last_code = ErrorCode::RateLimited;
            last_message = "status 429";
            continue;
        }
        if (response.status >= 500) {
            last_code = ErrorCode::TransportError;
            last_message = "status " + std::to_string(response.status);
            continue;
        }
        if (response.status != 200) {
            throw fail(ErrorCode::ProviderError, "status " + std::to_string(response.status));
        }
        const auto doc = json::parse(response.body, nullptr, false);
        try {
            auto content = doc.at("choices").at(0).at("message").at("content").get<std::string>();
            record.failed = false;
            record.output_hash = stable_hash(content);
            log_.record(record);
            return content;
        } catch (const json::exception&) {
            throw fail(ErrorCode::ProviderError, "response body has no message content");
        }
    }
    throw fail(last_code, last_message + " after " + std::to_string(attempts) + " attempts");
}

} // namespace elicit
