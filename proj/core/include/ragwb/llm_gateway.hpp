#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ragwb/error.hpp"

namespace ragwb::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Message {
    Role role = Role::User;
    std::string content;
};

struct ChatRequest {
    std::vector<Message> messages;
    double temperature = 0.0;
    int max_tokens = 512;
    std::chrono::milliseconds timeout{60'000};
};

struct ChatResponse {
    std::string content;
    std::string finish_reason;
    double latency_ms = 0.0;
    int attempts = 1;
};

enum class EndpointErrorKind {
    Transport,
    Timeout,
    HttpStatus,
    MalformedResponse,
};

std::string_view to_string(EndpointErrorKind kind);

/// Every failure talking to a model endpoint. Carries the variant name so
/// errors stay attributable after fan-out.
class EndpointError : public Error {
public:
    EndpointError(EndpointErrorKind kind, std::string variant, const std::string& detail,
                  int http_status = 0);

    EndpointErrorKind endpoint_kind() const noexcept { return kind_; }
    const std::string& variant() const noexcept { return variant_; }
    int http_status() const noexcept { return http_status_; }

    /// Transport failures, timeouts and 5xx responses are transient; 4xx and
    /// malformed bodies are not.
    bool retryable() const noexcept;

private:
    EndpointErrorKind kind_;
    std::string variant_;
    int http_status_;
};

/// A chat model reachable by name. HttpChatEndpoint is the production
/// implementation; tests substitute scripted ones.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual const std::string& name() const = 0;
    /// Context window budget in characters; 0 means unlimited.
    virtual std::size_t context_budget_chars() const { return 0; }
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// One member of the model family. `provenance` is carried verbatim and never
/// interpreted (LoRA rank/alpha/dropout, quantization bits, training hours).
struct ModelVariant {
    std::string name;
    std::string base_url;
    std::string model_id;
    bool uses_rag = false;
    std::string index_dir;
    std::size_t context_budget_chars = 0;
    nlohmann::json provenance = nlohmann::json::object();

    bool operator==(const ModelVariant&) const = default;
};

class Registry {
public:
    Registry() = default;
    /// Validates names (non-empty, unique) and rag index references; stores
    /// variants sorted by name.
    explicit Registry(std::vector<ModelVariant> variants);

    const std::vector<ModelVariant>& variants() const { return variants_; }
    std::size_t size() const { return variants_.size(); }
    bool empty() const { return variants_.empty(); }
    const ModelVariant* find(std::string_view name) const;
    const ModelVariant& at(std::string_view name) const;

    bool operator==(const Registry&) const = default;

private:
    std::vector<ModelVariant> variants_;
};

/// Parses a JSON array of variant objects. `index_dir` is kept as written;
/// relative paths resolve against the working directory when used.
Registry parse_registry(std::string_view json_text);
Registry load_registry(const std::filesystem::path& path);
std::string serialize_registry(const Registry& registry);

struct RetryPolicy {
    /// Retries after the first attempt; total attempts are at most retry_max + 1.
    int retry_max = 3;
    std::chrono::milliseconds backoff_base{200};
    double backoff_multiplier = 2.0;
};

/// Bounds the number of in-flight requests shared by any number of endpoints.
class RequestLimiter {
public:
    explicit RequestLimiter(std::size_t max_in_flight);

    void acquire();
    void release();
    std::size_t max_in_flight() const { return max_; }

    class Guard {
    public:
        explicit Guard(RequestLimiter* limiter) : limiter_(limiter) {
            if (limiter_) limiter_->acquire();
        }
        ~Guard() {
            if (limiter_) limiter_->release();
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        RequestLimiter* limiter_;
    };

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t max_;
    std::size_t in_flight_ = 0;
};

/// `RAGWB_API_KEY_<NAME>` with NAME upper-cased and non-alphanumerics mapped to '_'.
std::string api_key_env_name(std::string_view variant_name);

/// OpenAI-compatible request body: {model, messages, temperature, max_tokens}.
nlohmann::json build_request_body(std::string_view model_id, const ChatRequest& request);

/// Reads choices[0].message.content and choices[0].finish_reason.
/// Throws EndpointError(MalformedResponse) otherwise.
ChatResponse parse_response_body(std::string_view body, const std::string& variant);

/// POSTs to `{base_url}/v1/chat/completions` with retry and backoff.
class HttpChatEndpoint : public ChatEndpoint {
public:
    HttpChatEndpoint(ModelVariant variant, RetryPolicy retry = {},
                     std::shared_ptr<RequestLimiter> limiter = nullptr,
                     std::optional<std::string> api_key = std::nullopt);

    const std::string& name() const override { return variant_.name; }
    std::size_t context_budget_chars() const override { return variant_.context_budget_chars; }
    ChatResponse complete(const ChatRequest& request) override;

    const ModelVariant& variant() const { return variant_; }

private:
    ChatResponse attempt(const ChatRequest& request, const std::string& body);

    ModelVariant variant_;
    RetryPolicy retry_;
    std::shared_ptr<RequestLimiter> limiter_;
    std::optional<std::string> api_key_;
    std::string scheme_host_port_;
    std::string path_;
};

/// Reads the variant's API key from the environment when set.
std::optional<std::string> api_key_from_env(std::string_view variant_name);

}  // namespace ragwb::llm
