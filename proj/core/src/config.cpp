#include "ragwb/config.hpp"

#include <set>

#include "json.hpp"
#include "ragwb/error.hpp"
#include "ragwb/io.hpp"

namespace ragwb {

WorkbenchConfig parse_config(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed config: ") + e.what(), e.byte);
    }
    if (!doc.is_object()) throw ParseError("config must be a JSON object", 0);

    static const std::set<std::string> known{"corpus",      "index_dir", "registry",    "threshold",
                                             "limit",       "excerpt_chars", "max_fragment_chars", "seed",
                                             "parallelism", "timeout_ms", "retry_max", "log_level"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) throw ValidationError("unknown config key '" + key + "'");
    }

    WorkbenchConfig c;
    try {
        c.corpus = doc.value("corpus", std::string{});
        c.index_dir = doc.value("index_dir", std::string{});
        c.registry = doc.value("registry", std::string{});
        c.threshold = doc.value("threshold", c.threshold);
        c.limit = doc.value("limit", c.limit);
        c.excerpt_chars = doc.value("excerpt_chars", c.excerpt_chars);
        c.max_fragment_chars = doc.value("max_fragment_chars", c.max_fragment_chars);
        c.seed = doc.value("seed", c.seed);
        c.parallelism = doc.value("parallelism", c.parallelism);
        c.timeout_ms = doc.value("timeout_ms", c.timeout_ms);
        c.retry_max = doc.value("retry_max", c.retry_max);
        c.log_level = doc.value("log_level", c.log_level);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

WorkbenchConfig load_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::NotFound, "config file not found: " + path.string());
    return parse_config(io::read_file(path));
}

void validate(const WorkbenchConfig& c) {
    if (!(c.threshold >= 0.0 && c.threshold <= 1.0)) throw ValidationError("threshold must be in [0, 1]");
    if (c.limit == 0) throw ValidationError("limit must be positive");
    if (c.excerpt_chars == 0) throw ValidationError("excerpt_chars must be positive");
    if (c.max_fragment_chars < 200) throw ValidationError("max_fragment_chars must be at least 200");
    if (c.parallelism == 0) throw ValidationError("parallelism must be positive");
    if (c.timeout_ms <= 0) throw ValidationError("timeout_ms must be positive");
    if (c.retry_max < 0) throw ValidationError("retry_max must be non-negative");
    static const std::set<std::string> levels{"trace", "debug", "info", "warn", "error", "off"};
    if (!levels.contains(c.log_level)) throw ValidationError("unknown log level '" + c.log_level + "'");
}

std::string config_to_json(const WorkbenchConfig& c) {
    nlohmann::ordered_json j{
        {"corpus", c.corpus.string()},
        {"index_dir", c.index_dir.string()},
        {"registry", c.registry.string()},
        {"threshold", c.threshold},
        {"limit", c.limit},
        {"excerpt_chars", c.excerpt_chars},
        {"max_fragment_chars", c.max_fragment_chars},
        {"seed", c.seed},
        {"parallelism", c.parallelism},
        {"timeout_ms", c.timeout_ms},
        {"retry_max", c.retry_max},
        {"log_level", c.log_level},
    };
    return j.dump();
}

}  // namespace ragwb
