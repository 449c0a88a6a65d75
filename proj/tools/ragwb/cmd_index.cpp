#include <cstdio>
#include <limits>

#include "json.hpp"
#include "ragwb/commands.hpp"
#include "ragwb/index_store.hpp"
#include "ragwb/io.hpp"
#include "ragwb/rag.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::cli {
namespace {

struct BuildOptions {
    std::optional<std::string> corpus;
    std::optional<std::string> out;
    std::optional<std::string> stopwords;
    bool include_metadata = false;
};

struct IndexQueryOptions {
    std::optional<std::string> dir;
    std::string text;
    std::size_t top = 10;
};

struct RagQueryOptions {
    std::optional<std::string> index;
    std::string text;
    std::optional<double> threshold;
    std::optional<std::size_t> limit;
    std::optional<std::size_t> excerpt_chars;
    std::optional<std::string> template_file;
    std::optional<std::string> model;
    std::optional<std::string> registry;
    bool json = false;
};

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", score);
    return buf;
}

void run_build(const BuildOptions& o, Context& ctx) {
    const auto corpus_path = require_path(o.corpus, ctx.config.corpus, "--corpus");
    const auto out_dir = require_path(o.out, ctx.config.index_dir, "--out");
    require_exists(corpus_path, "corpus");
    Tokenizer tokenizer;
    if (o.stopwords) {
        require_exists(*o.stopwords, "stopword list");
        tokenizer = Tokenizer(Tokenizer::parse_stopwords(io::read_file(*o.stopwords)));
    }
    const auto corpus = corpus::load_corpus(corpus_path).records;
    const auto docs = index::documents_from_corpus(corpus, o.include_metadata);
    if (docs.size() < corpus.size()) {
        spdlog::info("{} of {} records have no extracted text and are not indexed", corpus.size() - docs.size(),
                     corpus.size());
    }
    auto idx = tfidf::TfidfIndex::build(docs, tokenizer);
    std::vector<std::string> texts;
    texts.reserve(docs.size());
    for (const auto& d : docs) texts.push_back(d.text);
    const rag::KnowledgeBase kb(std::move(idx), std::move(texts));
    rag::save_knowledge_base(kb, out_dir);
    ctx.out << "indexed " << kb.index.size() << " documents, " << kb.index.vocabulary().size() << " terms -> "
            << out_dir.string() << "\n";
}

void run_index_query(const IndexQueryOptions& o, Context& ctx) {
    const auto dir = require_path(o.dir, ctx.config.index_dir, "--dir");
    const auto kb = rag::load_knowledge_base(dir);
    rag::RetrievalParams params;
    params.threshold = std::numeric_limits<double>::min();
    params.limit = o.top;
    params.excerpt_chars = 0;
    const auto result = rag::retrieve(kb, o.text, params);
    std::size_t rank = 1;
    for (const auto& hit : result.hits) {
        ctx.out << rank++ << "\t" << format_score(hit.score) << "\t" << hit.uri << "\n";
    }
    if (result.hits.empty()) ctx.err << "no document shares a term with the query\n";
}

nlohmann::ordered_json retrieval_to_json(const rag::RetrievalResult& r) {
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const auto& h : r.hits) {
        hits.push_back({{"row", h.row}, {"uri", h.uri}, {"score", h.score}, {"excerpt", h.excerpt}});
    }
    return {{"query", r.query},
            {"threshold", r.threshold},
            {"limit", r.limit},
            {"excerpt_chars", r.excerpt_chars},
            {"hits", hits}};
}

void run_rag_query(const RagQueryOptions& o, Context& ctx) {
    if (o.text.empty()) throw Error(ErrorKind::Usage, "a query text is required");
    const auto dir = require_path(o.index, ctx.config.index_dir, "--index");
    const auto kb = rag::load_knowledge_base(dir);

    rag::RetrievalParams params;
    params.threshold = o.threshold.value_or(ctx.config.threshold);
    params.limit = o.limit.value_or(ctx.config.limit);
    params.excerpt_chars = o.excerpt_chars.value_or(ctx.config.excerpt_chars);
    std::string prompt_template(rag::kDefaultTemplate);
    if (o.template_file) {
        require_exists(*o.template_file, "prompt template");
        prompt_template = io::read_file(*o.template_file);
    }

    if (!o.model) {
        const auto result = rag::retrieve(kb, o.text, params);
        const auto prompt = rag::augment_prompt(o.text, result, prompt_template);
        if (o.json) {
            nlohmann::ordered_json j{{"retrieval", retrieval_to_json(result)}, {"prompt", prompt.text}};
            ctx.out << j.dump(2) << "\n";
        } else {
            ctx.out << prompt.text << "\n";
        }
        return;
    }

    const auto registry_path = require_path(o.registry, ctx.config.registry, "--registry");
    require_exists(registry_path, "registry");
    const auto registry = llm::load_registry(registry_path);
    const auto& variant = registry.at(*o.model);
    auto endpoint = make_endpoint(variant, ctx.config, std::make_shared<llm::RequestLimiter>(1));
    const auto answer = rag::rag_answer(o.text, kb, *endpoint, params, request_settings(ctx.config), prompt_template);
    if (o.json) {
        nlohmann::ordered_json j{{"retrieval", retrieval_to_json(answer.retrieval)},
                                 {"prompt", answer.prompt.text},
                                 {"dropped_hits", answer.dropped_hits},
                                 {"model", variant.name},
                                 {"response", answer.response.content},
                                 {"latency_ms", answer.response.latency_ms}};
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << answer.response.content << "\n";
    }
}

}  // namespace

void add_index_commands(CLI::App& app, Action& action) {
    auto* index_cmd = app.add_subcommand("index", "TF-IDF index over the corpus");
    index_cmd->require_subcommand(1);

    auto build = std::make_shared<BuildOptions>();
    auto* build_cmd = index_cmd->add_subcommand("build", "Build and persist the index");
    build_cmd->add_option("--corpus", build->corpus, "Corpus JSON file");
    build_cmd->add_option("--out", build->out, "Index directory");
    build_cmd->add_option("--stopwords", build->stopwords, "Stopword list, one word per line");
    build_cmd->add_flag("--include-metadata", build->include_metadata, "Append title and description to the text");
    build_cmd->callback([&action, build] { action = [build](Context& ctx) { run_build(*build, ctx); }; });

    auto query = std::make_shared<IndexQueryOptions>();
    auto* query_cmd = index_cmd->add_subcommand("query", "Rank documents against a query");
    query_cmd->add_option("--dir", query->dir, "Index directory");
    query_cmd->add_option("--text,text", query->text, "Query text")->required();
    query_cmd->add_option("--top", query->top, "Number of documents to list")->check(CLI::PositiveNumber);
    query_cmd->callback([&action, query] { action = [query](Context& ctx) { run_index_query(*query, ctx); }; });
}

void add_rag_commands(CLI::App& app, Action& action) {
    auto* rag_cmd = app.add_subcommand("rag", "Retrieval-augmented prompting");
    rag_cmd->require_subcommand(1);

    auto q = std::make_shared<RagQueryOptions>();
    auto* q_cmd = rag_cmd->add_subcommand("query", "Enrich a query with retrieved context, optionally ask a model");
    q_cmd->add_option("--text,text", q->text, "Query text")->required();
    q_cmd->add_option("--index", q->index, "Index directory");
    q_cmd->add_option("--threshold", q->threshold, "Minimum cosine similarity")->check(CLI::Range(0.0, 1.0));
    q_cmd->add_option("--limit", q->limit, "Maximum number of documents")->check(CLI::PositiveNumber);
    q_cmd->add_option("--excerpt-chars", q->excerpt_chars, "Characters taken from each document");
    q_cmd->add_option("--template", q->template_file, "Prompt template with {query} and {context}");
    q_cmd->add_option("--model", q->model, "Registry variant to answer the enriched prompt");
    q_cmd->add_option("--registry", q->registry, "Model registry file");
    q_cmd->add_flag("--json", q->json, "Print retrieval details as JSON");
    q_cmd->callback([&action, q] { action = [q](Context& ctx) { run_rag_query(*q, ctx); }; });
}

}  // namespace ragwb::cli
