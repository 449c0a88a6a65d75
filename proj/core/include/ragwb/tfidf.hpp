#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragwb/tokenizer.hpp"

namespace ragwb::tfidf {

struct SparseEntry {
    std::uint32_t column = 0;
    double weight = 0.0;

    bool operator==(const SparseEntry&) const = default;
};

/// Entries sorted by column, no duplicates, no explicit zeros.
using SparseVector = std::vector<SparseEntry>;

double l2_norm(const SparseVector& v);

/// Terms in code-point order; column i is terms[i].
class Vocabulary {
public:
    Vocabulary() = default;
    /// Throws ValidationError unless terms are strictly increasing, sizes agree
    /// and every df is in [1, n_docs].
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df, std::size_t n_docs);

    std::size_t size() const { return terms_.size(); }
    std::size_t n_docs() const { return n_docs_; }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::vector<std::size_t>& df() const { return df_; }
    std::optional<std::uint32_t> column_of(std::string_view term) const;

    /// ln((1 + N) / (1 + df)) + 1
    double idf(std::uint32_t column) const { return idf_[column]; }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::vector<double> idf_;
    std::size_t n_docs_ = 0;
    std::unordered_map<std::string, std::uint32_t> columns_;
};

struct Document {
    std::string uri;
    std::string text;
};

/// Immutable TF-IDF model: raw term counts times smoothed idf, each row
/// L2-normalized (empty documents keep the zero row). Safe for concurrent reads.
class TfidfIndex {
public:
    /// Throws ValidationError for an empty input, duplicate uris, or when no
    /// document produces a single term.
    static TfidfIndex build(std::span<const Document> docs, const Tokenizer& tokenizer = {});

    /// Assembles an index from stored parts (used by load). Validates shapes.
    TfidfIndex(Vocabulary vocabulary, std::vector<SparseVector> rows, std::vector<std::string> uris,
               Tokenizer tokenizer = {});

    const Vocabulary& vocabulary() const { return vocabulary_; }
    const std::vector<SparseVector>& rows() const { return rows_; }
    const std::vector<std::string>& uris() const { return uris_; }
    std::size_t size() const { return rows_.size(); }
    const Tokenizer& tokenizer() const { return tokenizer_; }

    /// Same weighting as the rows; unseen terms are dropped. A query with no
    /// known term gives the zero vector.
    SparseVector vectorize(std::string_view text) const;

    /// Score per row (index = row). Zero query gives all zeros. Throws
    /// ValidationError when the query references a column outside the vocabulary.
    std::vector<double> cosine_scores(const SparseVector& query) const;

private:
    struct Posting {
        std::uint32_t row;
        double weight;
    };

    void build_postings();

    Vocabulary vocabulary_;
    std::vector<SparseVector> rows_;
    std::vector<std::string> uris_;
    Tokenizer tokenizer_;
    std::vector<std::vector<Posting>> postings_;
};

}  // namespace ragwb::tfidf
