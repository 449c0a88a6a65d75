#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>

#include "ragwb/ledger.hpp"

namespace ragwb::corpus {

struct ThesisMetadata {
    std::string advisor;
    std::string author;
    std::string date;
    std::string description;
    std::string title;
    std::string program;
    std::string faculty;

    bool operator==(const ThesisMetadata&) const = default;
};

/// One corpus document. An empty `raw_content` means the text was never
/// extracted; such records still count toward the corpus total.
struct ThesisRecord {
    std::string uri;
    ThesisMetadata metadata;
    std::string raw_content;

    bool operator==(const ThesisRecord&) const = default;
};

/// Keyed and iterated by uri.
using Corpus = std::map<std::string, ThesisRecord, std::less<>>;

struct ParsedCorpus {
    Corpus records;
    /// Number of (record, field) pairs that were absent or null and defaulted to "".
    std::size_t missing_fields = 0;
};

/// Parses the corpus JSON: a top-level object keyed by uri whose values carry
/// advisor, author, date, description, title, program, faculty and raw_content.
/// Throws ParseError (with byte offset) on malformed JSON and ValidationError
/// on duplicate uris, empty uris or non-object entries.
ParsedCorpus parse_corpus(std::string_view json_text);
ParsedCorpus load_corpus(const std::filesystem::path& path);

/// Serializes with keys in uri order and two-space indentation.
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Adds a record and marks its ledger entry processed (enqueuing it first if
/// the ledger has never seen the uri). Rejects duplicates and invalid UTF-8.
void ingest_document(Corpus& corpus, ledger::Ledger& ledger, std::string_view uri,
                     const ThesisMetadata& metadata, std::string extracted_text);

/// Source of pre-extracted documents. Live fetching and PDF extraction live
/// outside this library; implementations only hand over text.
class DocumentFetcher {
public:
    virtual ~DocumentFetcher() = default;
    /// Throws on failure; the message becomes the ledger entry's last_error.
    virtual ThesisRecord fetch(std::string_view uri) = 0;
};

/// Serves documents from a staging file in the corpus JSON schema.
class StagedFetcher : public DocumentFetcher {
public:
    explicit StagedFetcher(Corpus staged) : staged_(std::move(staged)) {}
    ThesisRecord fetch(std::string_view uri) override;

private:
    Corpus staged_;
};

struct IngestSummary {
    std::size_t processed = 0;
    std::size_t failed = 0;
};

/// Drains every pending ledger entry through `fetcher` into `corpus`.
IngestSummary run_ingestion(Corpus& corpus, ledger::Ledger& ledger, DocumentFetcher& fetcher);

struct ModeCount {
    std::string name;
    std::size_t count = 0;

    bool operator==(const ModeCount&) const = default;
};

struct DatasetStats {
    std::size_t total_records = 0;
    std::size_t extracted_texts = 0;
    std::size_t unique_programs = 0;
    ModeCount most_frequent_program;
    std::size_t unique_advisors = 0;
    ModeCount most_frequent_advisor;
    std::size_t unique_authors = 0;
    ModeCount most_frequent_author;
    std::size_t unique_years = 0;
    ModeCount most_frequent_year;

    bool operator==(const DatasetStats&) const = default;
};

/// Year category of a free-form date: the first run of four ASCII digits,
/// otherwise the whole string.
std::string year_of(std::string_view date);

/// Empty field values are not a category and are skipped in the unique and
/// most-frequent counts. Ties go to the smallest name in code-point order.
DatasetStats compute_stats(const Corpus& corpus);

std::string stats_to_json(const DatasetStats& stats);
std::string stats_to_table(const DatasetStats& stats);

}  // namespace ragwb::corpus
