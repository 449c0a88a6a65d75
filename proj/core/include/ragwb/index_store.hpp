#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ragwb/corpus.hpp"
#include "ragwb/tfidf.hpp"

namespace ragwb::index {

inline constexpr const char* kMatrixFile = "index.npy";
inline constexpr const char* kMetaFile = "index.meta.json";
/// Row-aligned document texts, used for retrieval excerpts.
inline constexpr const char* kDocumentsFile = "index.docs.json";

/// Indexable documents: every record with extracted text, in uri order. With
/// `include_metadata` the title and description are appended to the text.
std::vector<tfidf::Document> documents_from_corpus(const corpus::Corpus& corpus, bool include_metadata = false);

/// Writes the rows densified into index.npy (N x |V|, '<f8') and the
/// vocabulary/manifest sidecar `{terms, df, n_docs, uris}`. Both files are a
/// pure function of the index, so equal inputs give byte-identical artifacts.
void save_index(const tfidf::TfidfIndex& index, const std::filesystem::path& dir);

/// Throws NotFound when files are missing and ValidationError when the
/// sidecar disagrees with the matrix shape.
tfidf::TfidfIndex load_index(const std::filesystem::path& dir, const Tokenizer& tokenizer = {});

void save_documents(const std::vector<std::string>& texts, const std::filesystem::path& dir);
std::vector<std::string> load_documents(const std::filesystem::path& dir);

}  // namespace ragwb::index
