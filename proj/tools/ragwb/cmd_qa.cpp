#include <limits>

#include "json.hpp"
#include "ragwb/commands.hpp"
#include "ragwb/io.hpp"
#include "ragwb/qa_dataset.hpp"

namespace ragwb::cli {
namespace {

struct FragmentOptions {
    std::optional<std::string> corpus;
    std::optional<std::size_t> max_chars;
    std::string out = "fragments.json";
};

struct GenerateOptions {
    std::string generator;
    std::optional<std::string> registry;
    std::string fragments = "fragments.json";
    std::optional<std::string> template_file;
    std::string out = "qa_pairs.json";
};

struct SplitOptions {
    std::string pairs = "qa_pairs.json";
    double ratio = qa::kDefaultTrainRatio;
    std::string out = ".";
};

struct QaStatsOptions {
    std::string pairs = "qa_pairs.json";
};

void run_fragment(const FragmentOptions& o, Context& ctx) {
    const auto corpus_path = require_path(o.corpus, ctx.config.corpus, "--corpus");
    require_exists(corpus_path, "corpus");
    const auto max_chars = o.max_chars.value_or(ctx.config.max_fragment_chars);
    const auto corpus = corpus::load_corpus(corpus_path).records;
    std::vector<qa::Fragment> fragments;
    for (const auto& [uri, record] : corpus) {
        for (auto& f : qa::fragment_document(record, max_chars)) fragments.push_back(std::move(f));
    }
    io::write_file(o.out, qa::fragments_to_json(fragments));
    ctx.out << fragments.size() << " fragments from " << corpus.size() << " records -> " << o.out << "\n";
}

void run_generate(const GenerateOptions& o, Context& ctx) {
    const auto registry_path = require_path(o.registry, ctx.config.registry, "--registry");
    require_exists(registry_path, "registry");
    require_exists(o.fragments, "fragments file");
    const auto registry = llm::load_registry(registry_path);
    const auto& variant = registry.at(o.generator);

    std::string instruction(qa::kDefaultInstructionTemplate);
    if (o.template_file) {
        require_exists(*o.template_file, "instruction template");
        instruction = io::read_file(*o.template_file);
    }
    const auto fragments = qa::fragments_from_json(io::read_file(o.fragments));
    auto limiter = std::make_shared<llm::RequestLimiter>(ctx.config.parallelism);
    auto endpoint = make_endpoint(variant, ctx.config, limiter);

    const auto report = qa::generate_all(fragments, *endpoint, instruction, ctx.config.parallelism,
                                         request_settings(ctx.config));
    if (report.pairs.empty() && report.failed_fragments > 0) {
        throw Error(ErrorKind::Endpoint, "generator failed on all " + std::to_string(report.failed_fragments) +
                                             " fragments");
    }
    qa::save_pairs(report.pairs, o.out);
    ctx.out << report.pairs.size() << " pairs from " << fragments.size() << " fragments (" << report.skipped_lines
            << " unparseable lines skipped, " << report.failed_fragments << " fragments failed) -> " << o.out << "\n";
}

void run_split(const SplitOptions& o, Context& ctx) {
    require_exists(o.pairs, "QA dataset");
    const auto pairs = qa::load_pairs(o.pairs);
    const auto split = qa::split_dataset(pairs, o.ratio, ctx.config.seed);
    qa::save_split(split, o.out);
    ctx.out << "train " << split.train.size() << ", test " << split.test.size() << " (seed " << split.seed
            << ") -> " << o.out << "\n";
}

void run_qa_stats(const QaStatsOptions& o, Context& ctx) {
    require_exists(o.pairs, "QA dataset");
    const auto pairs = qa::load_pairs(o.pairs);
    const auto avg = qa::qa_stats(pairs);
    nlohmann::ordered_json j{{"pairs", pairs.size()},
                             {"avg_prompt_chars", avg.prompt_chars},
                             {"avg_completion_chars", avg.completion_chars}};
    ctx.out << j.dump(2) << "\n";
}

}  // namespace

void add_qa_commands(CLI::App& app, Action& action) {
    auto* qa_cmd = app.add_subcommand("qa", "Fine-tuning QA dataset tools");
    qa_cmd->require_subcommand(1);

    auto frag = std::make_shared<FragmentOptions>();
    auto* frag_cmd = qa_cmd->add_subcommand("fragment", "Split corpus texts into fragments");
    frag_cmd->add_option("--corpus", frag->corpus, "Corpus JSON file");
    frag_cmd->add_option("--max-chars", frag->max_chars, "Maximum fragment length in characters (>= 200)")
        ->check(CLI::Range(std::size_t{200}, std::numeric_limits<std::size_t>::max()));
    frag_cmd->add_option("--out", frag->out, "Output fragments file");
    frag_cmd->callback([&action, frag] { action = [frag](Context& ctx) { run_fragment(*frag, ctx); }; });

    auto gen = std::make_shared<GenerateOptions>();
    auto* gen_cmd = qa_cmd->add_subcommand("generate", "Generate QA pairs with a generator endpoint");
    gen_cmd->add_option("--generator", gen->generator, "Registry variant used as generator")->required();
    gen_cmd->add_option("--registry", gen->registry, "Model registry file");
    gen_cmd->add_option("--fragments", gen->fragments, "Fragments file from `qa fragment`");
    gen_cmd->add_option("--template", gen->template_file, "Instruction template with a {fragment} placeholder");
    gen_cmd->add_option("--out", gen->out, "Output QA dataset file");
    gen_cmd->callback([&action, gen] { action = [gen](Context& ctx) { run_generate(*gen, ctx); }; });

    auto split = std::make_shared<SplitOptions>();
    auto* split_cmd = qa_cmd->add_subcommand("split", "Deterministic train/test split (uses --seed)");
    split_cmd->add_option("--pairs", split->pairs, "QA dataset file");
    split_cmd->add_option("--ratio", split->ratio, "Train fraction in (0, 1)")->check(CLI::Range(0.0, 1.0));
    split_cmd->add_option("--out", split->out, "Output directory for train.json, test.json, split.json");
    split_cmd->callback([&action, split] { action = [split](Context& ctx) { run_split(*split, ctx); }; });

    auto stats = std::make_shared<QaStatsOptions>();
    auto* stats_cmd = qa_cmd->add_subcommand("stats", "Average prompt and completion lengths");
    stats_cmd->add_option("--pairs", stats->pairs, "QA dataset file");
    stats_cmd->callback([&action, stats] { action = [stats](Context& ctx) { run_qa_stats(*stats, ctx); }; });
}

}  // namespace ragwb::cli
