#include "ragwb/rag.hpp"

#include <algorithm>
#include <numeric>

#include "ragwb/index_store.hpp"
#include "ragwb/utf8.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::rag {
namespace {

// Single pass, so placeholder-like text inside the query or excerpts is
// never expanded.
std::string render(std::string_view tmpl, std::string_view query, std::string_view context) {
    std::string out;
    for (std::size_t pos = 0; pos < tmpl.size();) {
        if (tmpl.compare(pos, 7, "{query}") == 0) {
            out += query;
            pos += 7;
        } else if (tmpl.compare(pos, 9, "{context}") == 0) {
            out += context;
            pos += 9;
        } else {
            out.push_back(tmpl[pos++]);
        }
    }
    return out;
}

}  // namespace

KnowledgeBase::KnowledgeBase(tfidf::TfidfIndex idx, std::vector<std::string> docs)
    : index(std::move(idx)), texts(std::move(docs)) {
    if (texts.size() != index.size()) {
        throw ValidationError("knowledge base has " + std::to_string(index.size()) + " rows but " +
                              std::to_string(texts.size()) + " texts");
    }
}

KnowledgeBase KnowledgeBase::empty() {
    return KnowledgeBase(tfidf::TfidfIndex(tfidf::Vocabulary({}, {}, 0), {}, {}), {});
}

KnowledgeBase load_knowledge_base(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::NotFound, "index directory not found: " + dir.string());
    }
    return KnowledgeBase(index::load_index(dir), index::load_documents(dir));
}

void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& dir) {
    index::save_index(kb.index, dir);
    index::save_documents(kb.texts, dir);
}

RetrievalResult retrieve(const KnowledgeBase& kb, std::string_view query, const RetrievalParams& params) {
    RetrievalResult result;
    result.query = std::string(query);
    result.threshold = params.threshold;
    result.limit = params.limit;
    result.excerpt_chars = params.excerpt_chars;
    if (kb.index.size() == 0 || params.limit == 0) return result;

    const auto scores = kb.index.cosine_scores(kb.index.vectorize(query));
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < scores.size(); ++r) {
        if (scores[r] >= params.threshold) rows.push_back(r);
    }
    const auto better = [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    };
    const auto keep = std::min(rows.size(), params.limit);
    std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(keep), rows.end(), better);
    rows.resize(keep);

    for (const auto r : rows) {
        result.hits.push_back({r, kb.index.uris()[r], scores[r],
                               std::string(utf8::prefix(kb.texts[r], params.excerpt_chars))});
    }
    return result;
}

EnrichedPrompt augment_prompt(std::string_view query, const RetrievalResult& result,
                              std::string_view prompt_template) {
    if (prompt_template.find("{query}") == std::string_view::npos) {
        throw ValidationError("prompt template must contain a {query} placeholder");
    }
    EnrichedPrompt out;
    if (result.hits.empty()) {
        out.text = std::string(query);
        return out;
    }
    std::string context;
    for (std::size_t i = 0; i < result.hits.size(); ++i) {
        if (i > 0) context.push_back('\n');
        context += result.hits[i].excerpt;
        out.source_uris.push_back(result.hits[i].uri);
    }
    out.text = render(prompt_template, query, context);
    return out;
}

RagEndpointError::RagEndpointError(const llm::EndpointError& cause, RetrievalResult retrieval)
    : llm::EndpointError(cause), retrieval_(std::move(retrieval)) {}

std::size_t fit_to_budget(std::string_view query, RetrievalResult& result, std::string_view prompt_template,
                          std::size_t budget_chars) {
    if (budget_chars == 0) return 0;
    std::size_t dropped = 0;
    while (!result.hits.empty() && utf8::length(augment_prompt(query, result, prompt_template).text) > budget_chars) {
        result.hits.pop_back();
        ++dropped;
    }
    return dropped;
}

RagAnswer rag_answer(std::string_view query, const KnowledgeBase& kb, llm::ChatEndpoint& model,
                     const RetrievalParams& params, llm::ChatRequest request, std::string_view prompt_template) {
    RagAnswer out;
    out.retrieval = retrieve(kb, query, params);
    out.dropped_hits = fit_to_budget(query, out.retrieval, prompt_template, model.context_budget_chars());
    if (out.dropped_hits > 0) {
        spdlog::warn("{}: dropped {} excerpt(s) to fit the {}-character context budget", model.name(),
                     out.dropped_hits, model.context_budget_chars());
    }
    out.prompt = augment_prompt(query, out.retrieval, prompt_template);
    if (model.context_budget_chars() > 0 && utf8::length(out.prompt.text) > model.context_budget_chars()) {
        spdlog::warn("{}: query alone exceeds the context budget", model.name());
    }
    request.messages = {{llm::Role::User, out.prompt.text}};
    try {
        out.response = model.complete(request);
    } catch (const llm::EndpointError& e) {
        throw RagEndpointError(e, out.retrieval);
    }
    return out;
}

}  // namespace ragwb::rag
