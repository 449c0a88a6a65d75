#include <algorithm>
#include <thread>

#include "httplib.h"
#include "ragwb/llm_gateway.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::llm {
namespace {

using Clock = std::chrono::steady_clock;

// Splits "http://host:port/prefix" into the client origin and the path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url,
                                                   const std::string& variant) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ValidationError("variant '" + variant + "': base_url '" + base_url +
                              "' must start with http:// or https://");
    }
    const auto scheme = base_url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ValidationError("variant '" + variant + "': unsupported scheme '" + scheme + "'");
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    std::string origin = base_url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {origin, prefix};
}

}  // namespace

HttpChatEndpoint::HttpChatEndpoint(ModelVariant variant, RetryPolicy retry,
                                   std::shared_ptr<RequestLimiter> limiter,
                                   std::optional<std::string> api_key)
    : variant_(std::move(variant)),
      retry_(retry),
      limiter_(std::move(limiter)),
      api_key_(std::move(api_key)) {
    auto [origin, prefix] = split_base_url(variant_.base_url, variant_.name);
    scheme_host_port_ = std::move(origin);
    path_ = prefix + "/v1/chat/completions";
}

ChatResponse HttpChatEndpoint::attempt(const ChatRequest& request, const std::string& body) {
    httplib::Client client(scheme_host_port_);
    const auto timeout = request.timeout;
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    if (api_key_) headers.emplace("Authorization", "Bearer " + *api_key_);

    const auto start = Clock::now();
    auto result = client.Post(path_, headers, body, "application/json");
    const auto elapsed = Clock::now() - start;
    const double latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();

    if (!result) {
        const auto err = result.error();
        // httplib reports an expired read timeout as a plain Read error.
        const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                               (err == httplib::Error::Read && elapsed >= timeout);
        throw EndpointError(timed_out ? EndpointErrorKind::Timeout : EndpointErrorKind::Transport,
                            variant_.name, httplib::to_string(err));
    }
    if (result->status < 200 || result->status >= 300) {
        throw EndpointError(EndpointErrorKind::HttpStatus, variant_.name,
                            "HTTP " + std::to_string(result->status), result->status);
    }
    ChatResponse response = parse_response_body(result->body, variant_.name);
    response.latency_ms = latency_ms;
    return response;
}

ChatResponse HttpChatEndpoint::complete(const ChatRequest& request) {
    const bool has_user = std::any_of(request.messages.begin(), request.messages.end(),
                                      [](const Message& m) { return m.role == Role::User; });
    if (!has_user) throw ValidationError("chat request needs at least one user message");

    const std::string body = build_request_body(variant_.model_id, request).dump();
    auto backoff = retry_.backoff_base;
    for (int attempt_no = 1;; ++attempt_no) {
        try {
            RequestLimiter::Guard guard(limiter_.get());
            ChatResponse response = attempt(request, body);
            response.attempts = attempt_no;
            return response;
        } catch (const EndpointError& e) {
            if (!e.retryable() || attempt_no > retry_.retry_max) throw;
            spdlog::warn("{} (attempt {}), retrying in {} ms", e.what(), attempt_no, backoff.count());
        }
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(static_cast<double>(backoff.count()) * retry_.backoff_multiplier));
    }
}

}  // namespace ragwb::llm
