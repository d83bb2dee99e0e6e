#include <httplib.h>

#include "elicit/provider.hpp"

namespace elicit {

HttpTransport default_http_transport() {
    return [](const HttpRequest& request) {
        HttpResponse out;
        const auto scheme_end = request.url.find("://");
        const auto path_start = request.url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        const std::string origin = request.url.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : request.url.substr(path_start);

        httplib::Client client(origin);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : request.headers) {
            if (name == "Content-Type") {
                content_type = value;
            } else {
                headers.emplace(name, value);
            }
        }
        auto result = client.Post(path, headers, request.body, content_type);
        if (!result) {
            const auto err = result.error();
            out.timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
            out.transport_failed = !out.timed_out;
            out.error = httplib::to_string(err);
            return out;
        }
        out.status = result->status;
        out.body = result->body;
        return out;
    };
}

} // namespace elicit
