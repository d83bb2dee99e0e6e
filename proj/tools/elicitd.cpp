// HTTP server for elicitation sessions.
#include <httplib.h>

#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/json_io.hpp"
#include "elicit/provider.hpp"
#include "elicit/service.hpp"
#include "elicit/store.hpp"

namespace {

httplib::Server* g_server = nullptr;

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw elicit::Error(elicit::ErrorCode::InvalidArgument, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elicitd: knowledge-elicitation session server"};
    std::string listen = "127.0.0.1:8080";
    std::string data_dir = "data";
    std::string config_path;
    std::optional<std::uint64_t> mock_seed;
    std::string bank_path;
    std::string token_env;
    app.add_option("--listen", listen, "host:port to bind");
    app.add_option("--data-dir", data_dir, "directory holding one subdirectory per session");
    app.add_option("--config", config_path, "JSON config with provider and session sections")->check(CLI::ExistingFile);
    app.add_option("--mock-provider", mock_seed, "run offline against the deterministic mock with this seed");
    app.add_option("--bank", bank_path, "predefined question bank (JSON array of {theme, text})")
        ->check(CLI::ExistingFile);
    app.add_option("--token-env", token_env, "require a bearer token read from this environment variable");
    CLI11_PARSE(app, argc, argv);

    try {
        elicit::ServiceConfig config;
        elicit::ProviderConfig provider_config;
        if (!config_path.empty()) {
            const auto text = read_text(config_path);
            provider_config = elicit::provider_config_from_json(text);
            const auto doc = elicit::parse_json(text);
            if (doc.contains("session")) {
                const auto& s = doc["session"];
                if (s.contains("seed")) config.session.seed = elicit::field<std::uint64_t>(s, "seed");
                if (s.contains("ingest")) config.session.ingest = s["ingest"].get<elicit::ingest::IngestConfig>();
            }
        }
        config.session.prompt_budget = provider_config.prompt_budget;
        if (!bank_path.empty()) config.session.bank = elicit::engine::parse_bank(read_text(bank_path));
        if (!token_env.empty()) {
            config.token = elicit::process_env(token_env);
            if (!config.token) throw elicit::Error(elicit::ErrorCode::InvalidArgument, token_env + " is not set");
        }

        std::unique_ptr<elicit::CompletionProvider> provider;
        if (mock_seed) {
            provider = std::make_unique<elicit::MockProvider>(*mock_seed);
        } else {
            provider = std::make_unique<elicit::HttpProvider>(provider_config);
        }

        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw elicit::Error(elicit::ErrorCode::InvalidArgument, "--listen needs host:port");
        const auto host = listen.substr(0, colon);
        const int port = std::stoi(listen.substr(colon + 1));

        elicit::FileEventStore store(data_dir);
        elicit::SystemClock clock;
        elicit::Service service(store, *provider, clock, config);
        httplib::Server server;
        service.mount(server);
        g_server = &server;
        std::signal(SIGINT, [](int) { g_server->stop(); });
        std::signal(SIGTERM, [](int) { g_server->stop(); });

        std::cerr << "elicitd listening on " << host << ":" << port << " ("
                  << (mock_seed ? "mock provider" : provider_config.base_url) << ", data in " << data_dir << ")\n";
        if (!server.listen(host, port)) {
            std::cerr << "cannot bind " << listen << "\n";
            return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "elicitd: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
