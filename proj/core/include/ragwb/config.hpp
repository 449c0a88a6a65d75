#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ragwb {

/// Workbench-wide settings. Every field can be overridden by a CLI flag.
struct WorkbenchConfig {
    std::filesystem::path corpus;
    std::filesystem::path index_dir;
    std::filesystem::path registry;
    double threshold = 0.1;
    std::size_t limit = 3;
    std::size_t excerpt_chars = 1200;
    std::size_t max_fragment_chars = 1500;
    std::uint64_t seed = 42;
    std::size_t parallelism = 4;
    std::int64_t timeout_ms = 60'000;
    int retry_max = 3;
    std::string log_level = "info";
};

/// Reads a JSON object whose keys mirror the struct fields. Unknown keys are
/// rejected so typos do not silently fall back to defaults.
WorkbenchConfig parse_config(std::string_view json_text);
WorkbenchConfig load_config(const std::filesystem::path& path);

/// Throws ValidationError for out-of-range values.
void validate(const WorkbenchConfig& config);

std::string config_to_json(const WorkbenchConfig& config);

}  // namespace ragwb
