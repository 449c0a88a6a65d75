#include "ragwb/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ragwb/error.hpp"

namespace ragwb::tfidf {
namespace {

void normalize(SparseVector& v) {
    const double norm = l2_norm(v);
    if (norm == 0.0) return;
    for (auto& e : v) e.weight /= norm;
}

}  // namespace

double l2_norm(const SparseVector& v) {
    double sum = 0.0;
    for (const auto& e : v) sum += e.weight * e.weight;
    return std::sqrt(sum);
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs)
    : terms_(std::move(terms)), df_(std::move(df)), n_docs_(n_docs) {
    if (terms_.size() != df_.size()) {
        throw ValidationError("vocabulary has " + std::to_string(terms_.size()) + " terms but " +
                              std::to_string(df_.size()) + " document frequencies");
    }
    idf_.reserve(terms_.size());
    columns_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (i > 0 && !(terms_[i - 1] < terms_[i])) {
            throw ValidationError("vocabulary terms must be unique and sorted (at '" + terms_[i] + "')");
        }
        if (df_[i] < 1 || df_[i] > n_docs_) {
            throw ValidationError("document frequency of '" + terms_[i] + "' outside [1, n_docs]");
        }
        idf_.push_back(std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + static_cast<double>(df_[i]))) + 1.0);
        columns_.emplace(terms_[i], static_cast<std::uint32_t>(i));
    }
}

std::optional<std::uint32_t> Vocabulary::column_of(std::string_view term) const {
    auto it = columns_.find(std::string(term));
    if (it == columns_.end()) return std::nullopt;
    return it->second;
}

TfidfIndex TfidfIndex::build(std::span<const Document> docs, const Tokenizer& tokenizer) {
    if (docs.empty()) throw ValidationError("cannot build an index from zero documents");

    std::vector<std::map<std::string, std::size_t, std::less<>>> counts(docs.size());
    std::map<std::string, std::size_t, std::less<>> df;
    std::set<std::string_view> uris;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (!uris.insert(docs[d].uri).second) {
            throw ValidationError("duplicate document uri '" + docs[d].uri + "'");
        }
        for (auto& term : tokenizer.tokenize(docs[d].text)) ++counts[d][std::move(term)];
        for (const auto& [term, tf] : counts[d]) ++df[term];
    }
    if (df.empty()) throw ValidationError("every document is empty; nothing to index");

    std::vector<std::string> terms;
    std::vector<std::size_t> dfs;
    terms.reserve(df.size());
    dfs.reserve(df.size());
    for (auto& [term, n] : df) {
        terms.push_back(term);
        dfs.push_back(n);
    }
    Vocabulary vocab(std::move(terms), std::move(dfs), docs.size());

    std::vector<SparseVector> rows(docs.size());
    for (std::size_t d = 0; d < docs.size(); ++d) {
        // counts[d] iterates in term order, which is column order.
        rows[d].reserve(counts[d].size());
        for (const auto& [term, tf] : counts[d]) {
            const auto col = *vocab.column_of(term);
            rows[d].push_back({col, static_cast<double>(tf) * vocab.idf(col)});
        }
        normalize(rows[d]);
    }

    std::vector<std::string> manifest;
    manifest.reserve(docs.size());
    for (const auto& doc : docs) manifest.push_back(doc.uri);
    return TfidfIndex(std::move(vocab), std::move(rows), std::move(manifest), tokenizer);
}

TfidfIndex::TfidfIndex(Vocabulary vocabulary, std::vector<SparseVector> rows, std::vector<std::string> uris,
                       Tokenizer tokenizer)
    : vocabulary_(std::move(vocabulary)),
      rows_(std::move(rows)),
      uris_(std::move(uris)),
      tokenizer_(std::move(tokenizer)) {
    if (rows_.size() != uris_.size()) {
        throw ValidationError("index shape mismatch: " + std::to_string(rows_.size()) + " rows but " +
                              std::to_string(uris_.size()) + " uris");
    }
    if (vocabulary_.n_docs() != rows_.size()) {
        throw ValidationError("index shape mismatch: vocabulary counts " + std::to_string(vocabulary_.n_docs()) +
                              " documents but there are " + std::to_string(rows_.size()) + " rows");
    }
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (row[i].column >= vocabulary_.size() || (i > 0 && row[i - 1].column >= row[i].column)) {
                throw ValidationError("index row has unsorted or out-of-range columns");
            }
        }
    }
    build_postings();
}

void TfidfIndex::build_postings() {
    postings_.assign(vocabulary_.size(), {});
    for (std::uint32_t r = 0; r < rows_.size(); ++r) {
        for (const auto& e : rows_[r]) postings_[e.column].push_back({r, e.weight});
    }
}

SparseVector TfidfIndex::vectorize(std::string_view text) const {
    std::map<std::uint32_t, std::size_t> tf;
    for (const auto& term : tokenizer_.tokenize(text)) {
        if (auto col = vocabulary_.column_of(term)) ++tf[*col];
    }
    SparseVector v;
    v.reserve(tf.size());
    for (const auto& [col, count] : tf) v.push_back({col, static_cast<double>(count) * vocabulary_.idf(col)});
    normalize(v);
    return v;
}

std::vector<double> TfidfIndex::cosine_scores(const SparseVector& query) const {
    std::vector<double> scores(rows_.size(), 0.0);
    for (const auto& q : query) {
        if (q.column >= vocabulary_.size()) {
            throw ValidationError("query column " + std::to_string(q.column) + " outside vocabulary of size " +
                                  std::to_string(vocabulary_.size()));
        }
    }
    // Columns ascend, so each row accumulates its products in column order.
    for (const auto& q : query) {
        for (const auto& p : postings_[q.column]) scores[p.row] += q.weight * p.weight;
    }
    return scores;
}

}  // namespace ragwb::tfidf
