#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "ragwb/config.hpp"
#include "ragwb/llm_gateway.hpp"

namespace ragwb::cli {

struct Context {
    WorkbenchConfig config;
    std::ostream& out;
    std::ostream& err;
};

using Action = std::function<void(Context&)>;

/// Each registrar adds its subcommands to `app` and, when one of them is
/// selected on the command line, stores the work to run in `action`.
void add_corpus_commands(CLI::App& app, Action& action);
void add_qa_commands(CLI::App& app, Action& action);
void add_index_commands(CLI::App& app, Action& action);
void add_rag_commands(CLI::App& app, Action& action);
void add_bench_commands(CLI::App& app, Action& action);

/// Resolves a path flag against the config fallback; throws a usage error
/// naming `flag` when neither is set.
std::filesystem::path require_path(const std::optional<std::string>& flag, const std::filesystem::path& fallback,
                                   const char* flag_name);

/// Throws NotFound when `path` does not exist.
void require_exists(const std::filesystem::path& path, const char* what);

std::shared_ptr<llm::ChatEndpoint> make_endpoint(const llm::ModelVariant& variant, const WorkbenchConfig& config,
                                                 std::shared_ptr<llm::RequestLimiter> limiter);

/// Sampling settings shared by every model call in a run.
llm::ChatRequest request_settings(const WorkbenchConfig& config);

}  // namespace ragwb::cli
