#include "ragwb/cli.hpp"

#include <iostream>

#include "ragwb/commands.hpp"
#include "ragwb/io.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace ragwb::cli {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage:
        case ErrorKind::Parse:
        case ErrorKind::Validation:
        case ErrorKind::NotFound:
            return 1;
        case ErrorKind::Io:
        case ErrorKind::Endpoint:
            return 2;
    }
    return 2;
}

std::filesystem::path require_path(const std::optional<std::string>& flag, const std::filesystem::path& fallback,
                                   const char* flag_name) {
    if (flag && !flag->empty()) return *flag;
    if (!fallback.empty()) return fallback;
    throw Error(ErrorKind::Usage, std::string("missing ") + flag_name + " (pass it or set it in --config)");
}

void require_exists(const std::filesystem::path& path, const char* what) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::NotFound, std::string(what) + " not found: " + path.string());
    }
}

std::shared_ptr<llm::ChatEndpoint> make_endpoint(const llm::ModelVariant& variant, const WorkbenchConfig& config,
                                                 std::shared_ptr<llm::RequestLimiter> limiter) {
    llm::RetryPolicy retry;
    retry.retry_max = config.retry_max;
    return std::make_shared<llm::HttpChatEndpoint>(variant, retry, std::move(limiter),
                                                   llm::api_key_from_env(variant.name));
}

llm::ChatRequest request_settings(const WorkbenchConfig& config) {
    llm::ChatRequest settings;
    settings.temperature = 0.0;
    settings.timeout = std::chrono::milliseconds(config.timeout_ms);
    return settings;
}

namespace {

void install_logger(const std::string& level) {
    auto logger = spdlog::get("ragwb");
    if (!logger) {
        logger = spdlog::stderr_color_mt("ragwb");
        spdlog::set_default_logger(logger);
    }
    spdlog::set_level(spdlog::level::from_str(level));
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ragwb: corpus ingestion, QA datasets, TF-IDF retrieval and LLM-as-a-judge benchmarking"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> log_level;
    std::optional<std::size_t> parallelism;
    app.add_option("--config", config_path, "Workbench config file (JSON)");
    app.add_option("--seed", seed, "Seed for every random choice (split shuffle, judge presentation order)");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    app.add_option("--parallelism", parallelism, "Maximum concurrent model requests")->check(CLI::PositiveNumber);

    Action action;
    add_corpus_commands(app, action);
    add_qa_commands(app, action);
    add_index_commands(app, action);
    add_rag_commands(app, action);
    add_bench_commands(app, action);

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        // Point at the innermost selected subcommand's usage.
        const CLI::App* usage = &app;
        while (!usage->get_subcommands().empty()) usage = usage->get_subcommands().front();
        err << usage->help();
        return 1;
    }

    try {
        Context ctx{config_path ? load_config(*config_path) : WorkbenchConfig{}, out, err};
        if (seed) ctx.config.seed = *seed;
        if (log_level) ctx.config.log_level = *log_level;
        if (parallelism) ctx.config.parallelism = *parallelism;
        validate(ctx.config);
        install_logger(ctx.config.log_level);

        std::string command;
        for (const auto& a : args.subspan(1)) command += (command.empty() ? "" : " ") + a;
        spdlog::info("ragwb {}", command);
        spdlog::info("effective config: {}", config_to_json(ctx.config));

        if (!action) throw Error(ErrorKind::Usage, "no command selected; see --help");
        action(ctx);
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace ragwb::cli
