#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ragwb/llm_gateway.hpp"
#include "ragwb/tfidf.hpp"

namespace ragwb::rag {

/// An index plus the row-aligned texts excerpts are cut from.
struct KnowledgeBase {
    tfidf::TfidfIndex index;
    std::vector<std::string> texts;

    /// Throws ValidationError when texts and rows disagree in count.
    KnowledgeBase(tfidf::TfidfIndex idx, std::vector<std::string> docs);

    /// A knowledge base with no documents; retrieval always comes back empty.
    static KnowledgeBase empty();
};

KnowledgeBase load_knowledge_base(const std::filesystem::path& dir);
void save_knowledge_base(const KnowledgeBase& kb, const std::filesystem::path& dir);

struct RetrievalParams {
    double threshold = 0.1;
    std::size_t limit = 3;
    std::size_t excerpt_chars = 1200;
};

struct Hit {
    std::size_t row = 0;
    std::string uri;
    double score = 0.0;
    std::string excerpt;
};

struct RetrievalResult {
    std::string query;
    std::vector<Hit> hits;
    double threshold = 0.0;
    std::size_t limit = 0;
    std::size_t excerpt_chars = 0;
};

/// Keeps rows scoring >= threshold, best first with ties broken by row, at
/// most `limit` of them. The excerpt is the document's first excerpt_chars
/// characters.
RetrievalResult retrieve(const KnowledgeBase& kb, std::string_view query, const RetrievalParams& params = {});

inline constexpr std::string_view kDefaultTemplate = "{query}\nKeep in mind this context:\n{context}";

struct EnrichedPrompt {
    std::string text;
    std::vector<std::string> source_uris;
};

/// Renders `{query}` and `{context}` (excerpts joined by newlines). With no
/// hits the result is the bare query. Throws ValidationError when the
/// template has no `{query}`.
EnrichedPrompt augment_prompt(std::string_view query, const RetrievalResult& result,
                              std::string_view prompt_template = kDefaultTemplate);

struct RagAnswer {
    llm::ChatResponse response;
    RetrievalResult retrieval;
    EnrichedPrompt prompt;
    std::size_t dropped_hits = 0;
};

/// Raised when the model call fails after retrieval succeeded.
class RagEndpointError : public llm::EndpointError {
public:
    RagEndpointError(const llm::EndpointError& cause, RetrievalResult retrieval);
    const RetrievalResult& retrieval() const { return retrieval_; }

private:
    RetrievalResult retrieval_;
};

/// Drops hits from the tail until the prompt fits `budget_chars` (0 = no
/// limit). Returns the number dropped; `result` is trimmed in place.
std::size_t fit_to_budget(std::string_view query, RetrievalResult& result, std::string_view prompt_template,
                          std::size_t budget_chars);

/// retrieve -> augment (within the endpoint's context budget) -> complete.
/// `request` supplies sampling settings; its messages are replaced.
RagAnswer rag_answer(std::string_view query, const KnowledgeBase& kb, llm::ChatEndpoint& model,
                     const RetrievalParams& params = {}, llm::ChatRequest request = {},
                     std::string_view prompt_template = kDefaultTemplate);

}  // namespace ragwb::rag
