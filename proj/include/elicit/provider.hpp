#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/error.hpp"

namespace elicit {

enum class Tier { initial_generation, standard };

enum class Purpose { generation, follow_up, importance, faithfulness, contradiction, summary, report };

std::string_view to_string(Tier tier) noexcept;
std::string_view to_string(Purpose purpose) noexcept;
std::optional<Tier> parse_tier(std::string_view name) noexcept;

struct CompletionRequest {
    Tier tier = Tier::standard;
    std::string prompt;
    Purpose purpose = Purpose::generation;
};

// Audit record. Prompts can embed the dataset, so only a hash is kept.
struct CallRecord {
    Purpose purpose = Purpose::generation;
    Tier tier = Tier::standard;
    std::uint64_t prompt_hash = 0;
    std::uint64_t output_hash = 0;
    bool failed = false;

    friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

std::string format_call_log(const std::vector<CallRecord>& log);

class CallLog {
public:
    void record(CallRecord entry);
    std::vector<CallRecord> entries() const;
    void clear();

private:
    mutable std::mutex mutex_;
    std::vector<CallRecord> entries_;
};

// The completion boundary. Implementations throw Error with one of AuthError,
// Timeout, RateLimited, TransportError or ProviderError.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual std::string complete(const CompletionRequest& request) = 0;
    virtual std::vector<CallRecord> call_log() const = 0;
};

struct ProviderConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "ELICIT_API_KEY";
    std::map<Tier, std::string> tier_models{{Tier::initial_generation, "o1"}, {Tier::standard, "gpt-4o"}};
    std::chrono::milliseconds timeout{60000};
    int max_retries = 2;
    std::size_t prompt_budget = 24000;

    // Throws Error{InvalidArgument} when a tier is unmapped or timeout <= 0.
    void validate() const;
};

// Reads the "provider" object of a JSON config document. Missing fields keep
// their defaults. Secrets are never read from the file.
ProviderConfig provider_config_from_json(std::string_view json_text);

// ---------------------------------------------------------------------------
// Deterministic offline provider.
//
// generation/follow_up: a fenced JSON list of the count requested by the
//   prompt; question k reads "MQ-<hash(seed, prompt, k)>: about <column
//   k mod column_count>" with themes cycling through the seven genres.
// importance: 1 + hash(question text) mod 5.
// faithfulness: fail when the answer has fewer than 20 characters.
// contradiction: fail when the candidate contains "CONTRA".
// summary: "SUMMARY(<theme>): <count> answers"; report: "OVERVIEW: <n> annotations".
class MockProvider final : public CompletionProvider {
public:
    enum class FaultKind { error, garbage };
    struct Fault {
        FaultKind kind = FaultKind::error;
        ErrorCode code = ErrorCode::Timeout;
    };

    explicit MockProvider(std::uint64_t seed) : seed_(seed) {}

    std::string complete(const CompletionRequest& request) override;
    std::vector<CallRecord> call_log() const override { return log_.entries(); }

    // Queues a fault for the next call with the given purpose.
    void inject(Purpose purpose, Fault fault);

    std::uint64_t seed() const noexcept { return seed_; }

    static constexpr std::size_t kMinAnswerLength = 20;
    static constexpr std::string_view kContradictionToken = "CONTRA";

private:
    std::string respond(const CompletionRequest& request) const;

    std::uint64_t seed_;
    CallLog log_;
    std::mutex faults_mutex_;
    std::map<Purpose, std::deque<Fault>> faults_;
};

// ---------------------------------------------------------------------------
// Hosted chat-completion client.

struct HttpRequest {
    std::string url;  // base_url + "/chat/completions"
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
    std::chrono::milliseconds timeout{0};
};

struct HttpResponse {
    int status = 0;
    std::string body;
    bool timed_out = false;
    bool transport_failed = false;
    std::string error;
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

HttpTransport default_http_transport();
std::optional<std::string> process_env(const std::string& name);

class HttpProvider final : public CompletionProvider {
public:
    explicit HttpProvider(ProviderConfig config, HttpTransport transport = default_http_transport(),
                          EnvLookup env = process_env, Sleeper sleeper = {});

    // Retries timeouts, 429 and 5xx with exponential backoff (500 ms base),
    // 1 + max_retries attempts in total.
    std::string complete(const CompletionRequest& request) override;
    std::vector<CallRecord> call_log() const override { return log_.entries(); }

    std::string request_body(const CompletionRequest& request) const;

private:
    ProviderConfig config_;
    HttpTransport transport_;
    EnvLookup env_;
    Sleeper sleeper_;
    CallLog log_;
};

} // namespace elicit
