#include <algorithm>
#include <map>
#include <sstream>

#include "ragwb/commands.hpp"
#include "ragwb/io.hpp"
#include "ragwb/judge.hpp"
#include "ragwb/report.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::cli {
namespace {

struct RunOptions {
    std::optional<std::string> questions;
    std::optional<std::string> registry;
    std::string judge;
    std::optional<std::string> judge_registry;
    std::string out = "bench";
    std::vector<std::string> variants;
    int judge_reasks = 1;
    std::optional<std::string> template_file;
};

struct ReportOptions {
    std::string dir = "bench";
    std::string format = "table";
    bool write = false;
};

std::vector<std::string> split_names(const std::vector<std::string>& raw) {
    std::vector<std::string> names;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        std::string name;
        while (std::getline(ss, name, ',')) {
            if (!name.empty()) names.push_back(name);
        }
    }
    return names;
}

void run_bench(const RunOptions& o, Context& ctx) {
    const auto questions_path = require_path(o.questions, {}, "--questions");
    const auto registry_path = require_path(o.registry, ctx.config.registry, "--registry");
    require_exists(questions_path, "questions file");
    require_exists(registry_path, "registry");
    const auto questions = judge::load_questions(questions_path);
    const auto registry = llm::load_registry(registry_path);
    llm::Registry judge_registry;
    if (o.judge_registry) {
        require_exists(*o.judge_registry, "judge registry");
        judge_registry = llm::load_registry(*o.judge_registry);
    }
    const auto& judge_variant = o.judge_registry ? judge_registry.at(o.judge) : registry.at(o.judge);

    std::vector<const llm::ModelVariant*> selected;
    const auto requested = split_names(o.variants);
    if (requested.empty()) {
        for (const auto& v : registry.variants()) {
            if (v.name != judge_variant.name) selected.push_back(&v);
        }
    } else {
        for (const auto& name : requested) {
            if (name == judge_variant.name) throw ValidationError("the judge cannot also be a contestant");
            selected.push_back(&registry.at(name));
        }
    }

    auto limiter = std::make_shared<llm::RequestLimiter>(ctx.config.parallelism);
    std::map<std::filesystem::path, std::shared_ptr<const rag::KnowledgeBase>> bases;
    std::vector<judge::Contestant> contestants;
    for (const auto* v : selected) {
        judge::Contestant c{v->name, make_endpoint(*v, ctx.config, limiter), nullptr};
        if (v->uses_rag) {
            auto& kb = bases[v->index_dir];
            if (!kb) kb = std::make_shared<const rag::KnowledgeBase>(rag::load_knowledge_base(v->index_dir));
            c.knowledge = kb;
        }
        contestants.push_back(std::move(c));
    }
    auto judge_endpoint = make_endpoint(judge_variant, ctx.config, limiter);

    judge::BenchmarkParams params;
    params.seed = ctx.config.seed;
    params.parallelism = ctx.config.parallelism;
    params.judge_reasks = o.judge_reasks;
    params.retrieval = {ctx.config.threshold, ctx.config.limit, ctx.config.excerpt_chars};
    if (o.template_file) {
        require_exists(*o.template_file, "prompt template");
        params.rag_template = io::read_file(*o.template_file);
    }
    params.answer_settings = request_settings(ctx.config);
    params.judge_settings = request_settings(ctx.config);

    const auto run = judge::run_benchmark(questions, contestants, *judge_endpoint, params);
    const auto lb = judge::aggregate(run.records, run.variants);

    const std::filesystem::path dir = o.out;
    report::RunMetadata meta;
    meta.seed = params.seed;
    meta.judge = judge_variant.name;
    meta.variants = run.variants;
    meta.questions_total = questions.size();
    meta.excluded = run.excluded;
    meta.retrieval = params.retrieval;
    io::write_file(dir / report::kRunFile, report::run_metadata_to_json(meta));
    io::write_file(dir / report::kTimingsFile, report::timings_to_json(run.records));
    report::emit_report(lb, run.records, report::Format::Json, dir);
    for (const auto f : {report::Format::Csv, report::Format::Table}) {
        io::write_file(dir / ("leaderboard." + std::string(report::extension(f))), report::render(lb, f));
    }
    if (!run.excluded.empty()) {
        spdlog::warn("{} of {} questions excluded", run.excluded.size(), questions.size());
    }
    ctx.out << report::leaderboard_to_table(lb);
}

void run_report(const ReportOptions& o, Context& ctx) {
    const auto format = report::format_from_string(o.format);
    const std::filesystem::path dir = o.dir;
    const auto records_path = dir / report::kRecordsFile;
    const auto run_path = dir / report::kRunFile;
    require_exists(records_path, "records file");
    require_exists(run_path, "run metadata");
    const auto records = report::records_from_json(io::read_file(records_path));
    const auto meta = report::run_metadata_from_json(io::read_file(run_path));
    const auto lb = judge::aggregate(records, meta.variants);
    const auto text = report::render(lb, format);
    if (o.write) {
        io::write_file(dir / ("leaderboard." + std::string(report::extension(format))), text);
        io::write_file(dir / report::kAverageSeriesFile, report::average_position_series(lb));
        io::write_file(dir / report::kFirstPlaceSeriesFile, report::first_place_series(lb));
    }
    ctx.out << text;
}

}  // namespace

void add_bench_commands(CLI::App& app, Action& action) {
    auto* bench_cmd = app.add_subcommand("bench", "Ranking benchmark with an LLM judge");
    bench_cmd->require_subcommand(1);

    auto run = std::make_shared<RunOptions>();
    auto* run_cmd = bench_cmd->add_subcommand("run", "Ask every variant, have the judge rank the answers");
    run_cmd->add_option("--questions", run->questions, "Benchmark questions (JSON)");
    run_cmd->add_option("--registry", run->registry, "Model registry file");
    run_cmd->add_option("--judge", run->judge, "Registry variant acting as judge")->required();
    run_cmd->add_option("--judge-registry", run->judge_registry, "Registry holding the judge, if not the main one");
    run_cmd->add_option("--out", run->out, "Output directory");
    run_cmd->add_option("--variants", run->variants, "Contestants (comma separated); default all but the judge");
    run_cmd->add_option("--judge-reasks", run->judge_reasks, "Judge retries after an unparseable ranking")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--template", run->template_file, "Prompt template for RAG variants");
    run_cmd->callback([&action, run] { action = [run](Context& ctx) { run_bench(*run, ctx); }; });

    auto rep = std::make_shared<ReportOptions>();
    auto* rep_cmd = bench_cmd->add_subcommand("report", "Re-aggregate stored records");
    rep_cmd->add_option("--dir", rep->dir, "Run directory");
    rep_cmd->add_option("--format", rep->format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    rep_cmd->add_flag("--write", rep->write, "Also write leaderboard.<ext> and the series files");
    rep_cmd->callback([&action, rep] { action = [rep](Context& ctx) { run_report(*rep, ctx); }; });
}

}  // namespace ragwb::cli
