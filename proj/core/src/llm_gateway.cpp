#include "ragwb/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <set>

#include "ragwb/io.hpp"

namespace ragwb::llm {
namespace {

using nlohmann::json;

constexpr std::size_t kDefaultContextBudgetChars = 16'000;

std::string required_string(const json& obj, const char* key, std::size_t index) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string() || it->get<std::string>().empty()) {
        throw ValidationError("registry entry " + std::to_string(index) + ": '" + key +
                              "' must be a non-empty string");
    }
    return it->get<std::string>();
}

}  // namespace

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::string_view to_string(EndpointErrorKind kind) {
    switch (kind) {
        case EndpointErrorKind::Transport: return "transport";
        case EndpointErrorKind::Timeout: return "timeout";
        case EndpointErrorKind::HttpStatus: return "http-status";
        case EndpointErrorKind::MalformedResponse: return "malformed-response";
    }
    return "transport";
}

EndpointError::EndpointError(EndpointErrorKind kind, std::string variant, const std::string& detail,
                             int http_status)
    : Error(ErrorKind::Endpoint,
            "endpoint '" + variant + "' " + std::string(to_string(kind)) + " error: " + detail),
      kind_(kind),
      variant_(std::move(variant)),
      http_status_(http_status) {}

bool EndpointError::retryable() const noexcept {
    switch (kind_) {
        case EndpointErrorKind::Transport:
        case EndpointErrorKind::Timeout:
            return true;
        case EndpointErrorKind::HttpStatus:
            return http_status_ >= 500;
        case EndpointErrorKind::MalformedResponse:
            return false;
    }
    return false;
}

Registry::Registry(std::vector<ModelVariant> variants) : variants_(std::move(variants)) {
    std::sort(variants_.begin(), variants_.end(),
              [](const ModelVariant& a, const ModelVariant& b) { return a.name < b.name; });
    for (std::size_t i = 0; i < variants_.size(); ++i) {
        const auto& v = variants_[i];
        if (v.name.empty()) throw ValidationError("registry variant with empty name");
        if (i > 0 && variants_[i - 1].name == v.name) {
            throw ValidationError("duplicate variant name '" + v.name + "'");
        }
        if (v.uses_rag && v.index_dir.empty()) {
            throw ValidationError("variant '" + v.name + "' uses RAG but has no index_dir");
        }
        if (v.context_budget_chars == 0) {
            throw ValidationError("variant '" + v.name + "' needs a positive context_budget_chars");
        }
    }
}

const ModelVariant* Registry::find(std::string_view name) const {
    auto it = std::lower_bound(variants_.begin(), variants_.end(), name,
                               [](const ModelVariant& v, std::string_view n) { return v.name < n; });
    if (it == variants_.end() || it->name != name) return nullptr;
    return &*it;
}

const ModelVariant& Registry::at(std::string_view name) const {
    if (const auto* v = find(name)) return *v;
    throw Error(ErrorKind::NotFound, "no variant named '" + std::string(name) + "' in registry");
}

Registry parse_registry(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed registry JSON: ") + e.what(), e.byte);
    }
    if (!doc.is_array()) throw ParseError("registry must be a JSON array of variants", 0);

    std::vector<ModelVariant> variants;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& obj = doc[i];
        if (!obj.is_object()) throw ValidationError("registry entry " + std::to_string(i) + " is not an object");
        ModelVariant v;
        v.name = required_string(obj, "name", i);
        v.base_url = required_string(obj, "base_url", i);
        v.model_id = required_string(obj, "model_id", i);
        v.uses_rag = obj.value("uses_rag", false);
        v.index_dir = obj.value("index_dir", std::string{});
        const auto budget = obj.value("context_budget_chars", static_cast<std::int64_t>(kDefaultContextBudgetChars));
        if (budget <= 0) throw ValidationError("variant '" + v.name + "': context_budget_chars must be positive");
        v.context_budget_chars = static_cast<std::size_t>(budget);
        if (auto it = obj.find("provenance"); it != obj.end()) {
            if (!it->is_object()) throw ValidationError("variant '" + v.name + "': provenance must be an object");
            v.provenance = *it;
        }
        variants.push_back(std::move(v));
    }
    return Registry(std::move(variants));
}

Registry load_registry(const std::filesystem::path& path) {
    return parse_registry(io::read_file(path));
}

std::string serialize_registry(const Registry& registry) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& v : registry.variants()) {
        nlohmann::ordered_json obj{
            {"name", v.name},
            {"base_url", v.base_url},
            {"model_id", v.model_id},
            {"uses_rag", v.uses_rag},
        };
        if (!v.index_dir.empty()) obj["index_dir"] = v.index_dir;
        obj["context_budget_chars"] = v.context_budget_chars;
        obj["provenance"] = nlohmann::ordered_json::parse(v.provenance.dump());
        out.push_back(std::move(obj));
    }
    return out.dump(2) + "\n";
}

RequestLimiter::RequestLimiter(std::size_t max_in_flight) : max_(std::max<std::size_t>(1, max_in_flight)) {}

void RequestLimiter::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return in_flight_ < max_; });
    ++in_flight_;
}

void RequestLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        --in_flight_;
    }
    cv_.notify_one();
}

std::string api_key_env_name(std::string_view variant_name) {
    std::string out = "RAGWB_API_KEY_";
    for (const char c : variant_name) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(std::isalnum(u) ? static_cast<char>(std::toupper(u)) : '_');
    }
    return out;
}

std::optional<std::string> api_key_from_env(std::string_view variant_name) {
    const auto var = api_key_env_name(variant_name);
    if (const char* value = std::getenv(var.c_str()); value && *value) return std::string(value);
    return std::nullopt;
}

json build_request_body(std::string_view model_id, const ChatRequest& request) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    return {
        {"model", model_id},
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
}

ChatResponse parse_response_body(std::string_view body, const std::string& variant) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw EndpointError(EndpointErrorKind::MalformedResponse, variant,
                            std::string("response is not JSON: ") + e.what());
    }
    const auto* choices = doc.is_object() && doc.contains("choices") ? &doc["choices"] : nullptr;
    if (!choices || !choices->is_array() || choices->empty()) {
        throw EndpointError(EndpointErrorKind::MalformedResponse, variant, "response has no choices");
    }
    const auto& first = (*choices)[0];
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object() ||
        !first["message"].contains("content") || !first["message"]["content"].is_string()) {
        throw EndpointError(EndpointErrorKind::MalformedResponse, variant,
                            "choices[0].message.content missing");
    }
    ChatResponse out;
    out.content = first["message"]["content"].get<std::string>();
    if (auto it = first.find("finish_reason"); it != first.end() && it->is_string()) {
        out.finish_reason = it->get<std::string>();
    }
    return out;
}

}  // namespace ragwb::llm
