#include <fstream>
#include <sstream>

#include "ragwb/commands.hpp"
#include "ragwb/corpus.hpp"
#include "ragwb/io.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::cli {
namespace {

struct IngestOptions {
    std::optional<std::string> corpus;
    std::optional<std::string> ledger;
    std::optional<std::string> enqueue;
    std::optional<std::string> staging;
    bool retry_failed = false;
};

struct StatsOptions {
    std::optional<std::string> corpus;
    std::string format = "table";
};

ledger::Ledger load_ledger(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return ledger::Ledger::read(in);
}

void save_ledger(const ledger::Ledger& l, const std::filesystem::path& path) {
    std::ostringstream buffer;
    l.write(buffer);
    io::write_file(path, buffer.str());
}

void run_ingest(const IngestOptions& o, Context& ctx) {
    const auto corpus_path = require_path(o.corpus, ctx.config.corpus, "--corpus");
    const std::filesystem::path ledger_path = o.ledger ? std::filesystem::path(*o.ledger)
                                                       : std::filesystem::path(corpus_path.string() + ".ledger.tsv");

    corpus::Corpus corpus;
    if (std::filesystem::exists(corpus_path)) corpus = corpus::load_corpus(corpus_path).records;
    auto ledger = load_ledger(ledger_path);

    std::size_t enqueued = 0;
    if (o.enqueue) {
        require_exists(*o.enqueue, "uri list");
        const auto text = io::read_file(*o.enqueue);
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
            if (line.empty() || line.front() == '#') continue;
            if (ledger.enqueue(line)) ++enqueued;
        }
    }
    const std::size_t retried = o.retry_failed ? ledger.retry_all_failed() : 0;

    corpus::IngestSummary summary;
    if (o.staging) {
        require_exists(*o.staging, "staging file");
        corpus::StagedFetcher fetcher(corpus::load_corpus(*o.staging).records);
        summary = corpus::run_ingestion(corpus, ledger, fetcher);
    }

    save_corpus(corpus, corpus_path);
    save_ledger(ledger, ledger_path);

    const auto counts = ledger.counts();
    ctx.out << "enqueued " << enqueued << ", retried " << retried << ", processed " << summary.processed
            << ", failed " << summary.failed << "\n"
            << "ledger: " << counts.pending << " pending, " << counts.processed << " processed, " << counts.failed
            << " failed\n"
            << "corpus: " << corpus.size() << " records\n";
}

void run_stats(const StatsOptions& o, Context& ctx) {
    const auto corpus_path = require_path(o.corpus, ctx.config.corpus, "--corpus");
    require_exists(corpus_path, "corpus");
    const auto parsed = corpus::load_corpus(corpus_path);
    if (parsed.missing_fields > 0) {
        spdlog::warn("{} missing field(s) defaulted to empty strings", parsed.missing_fields);
    }
    const auto stats = corpus::compute_stats(parsed.records);
    ctx.out << (o.format == "json" ? corpus::stats_to_json(stats) : corpus::stats_to_table(stats));
}

}  // namespace

void add_corpus_commands(CLI::App& app, Action& action) {
    auto ingest = std::make_shared<IngestOptions>();
    auto* ingest_cmd = app.add_subcommand("ingest", "Advance the URI ledger and ingest pre-extracted documents");
    ingest_cmd->add_option("--corpus", ingest->corpus, "Corpus JSON file (created when missing)");
    ingest_cmd->add_option("--ledger", ingest->ledger, "Ledger file (default: <corpus>.ledger.tsv)");
    ingest_cmd->add_option("--enqueue", ingest->enqueue, "File with one uri per line to mark pending");
    ingest_cmd->add_option("--staging", ingest->staging, "Pre-extracted documents in the corpus schema");
    ingest_cmd->add_flag("--retry-failed", ingest->retry_failed, "Move failed entries back to pending first");
    ingest_cmd->callback([&action, ingest] { action = [ingest](Context& ctx) { run_ingest(*ingest, ctx); }; });

    auto stats = std::make_shared<StatsOptions>();
    auto* stats_cmd = app.add_subcommand("stats", "Print corpus statistics");
    stats_cmd->add_option("--corpus", stats->corpus, "Corpus JSON file");
    stats_cmd->add_option("--format", stats->format, "json or table")->check(CLI::IsMember({"json", "table"}));
    stats_cmd->callback([&action, stats] { action = [stats](Context& ctx) { run_stats(*stats, ctx); }; });
}

}  // namespace ragwb::cli
