#include "ragwb/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ragwb/error.hpp"
#include "ragwb/io.hpp"
#include "ragwb/utf8.hpp"

namespace ragwb::corpus {
namespace {

using nlohmann::json;

std::string take_field(const json& obj, const char* name, const std::string& uri,
                       std::size_t& missing) {
    auto it = obj.find(name);
    if (it == obj.end() || it->is_null()) {
        ++missing;
        return {};
    }
    if (!it->is_string()) {
        throw ValidationError("record '" + uri + "': field '" + name + "' is not a string");
    }
    return it->get<std::string>();
}

ModeCount mode_of(const std::map<std::string, std::size_t>& counts) {
    ModeCount best;
    // std::map iterates in byte order, which for UTF-8 is code-point order, so
    // the first maximum seen is the lexicographically smallest.
    for (const auto& [name, count] : counts) {
        if (count > best.count) best = {name, count};
    }
    return best;
}

void tally(std::map<std::string, std::size_t>& counts, const std::string& key) {
    if (!key.empty()) ++counts[key];
}

}  // namespace

ParsedCorpus parse_corpus(std::string_view json_text) {
    std::set<std::string, std::less<>> seen;
    std::string duplicate;
    auto on_event = [&](int depth, json::parse_event_t event, json& parsed) {
        if (event == json::parse_event_t::key && depth == 1) {
            auto key = parsed.get<std::string>();
            if (!seen.insert(key).second && duplicate.empty()) duplicate = key;
        }
        return true;
    };

    json doc;
    try {
        doc = json::parse(json_text, on_event);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed corpus JSON: ") + e.what(), e.byte);
    }
    if (!duplicate.empty()) throw ValidationError("duplicate uri '" + duplicate + "'");
    if (!doc.is_object()) throw ParseError("corpus must be a JSON object keyed by uri", 0);

    ParsedCorpus out;
    for (const auto& [uri, value] : doc.items()) {
        if (uri.empty()) throw ValidationError("empty uri key in corpus");
        if (!value.is_object()) throw ValidationError("record '" + uri + "' is not an object");
        ThesisRecord r;
        r.uri = uri;
        r.metadata.advisor = take_field(value, "advisor", uri, out.missing_fields);
        r.metadata.author = take_field(value, "author", uri, out.missing_fields);
        r.metadata.date = take_field(value, "date", uri, out.missing_fields);
        r.metadata.description = take_field(value, "description", uri, out.missing_fields);
        r.metadata.title = take_field(value, "title", uri, out.missing_fields);
        r.metadata.program = take_field(value, "program", uri, out.missing_fields);
        r.metadata.faculty = take_field(value, "faculty", uri, out.missing_fields);
        r.raw_content = take_field(value, "raw_content", uri, out.missing_fields);
        out.records.emplace(uri, std::move(r));
    }
    return out;
}

ParsedCorpus load_corpus(const std::filesystem::path& path) {
    return parse_corpus(io::read_file(path));
}

std::string serialize_corpus(const Corpus& corpus) {
    // ordered_json keeps the field order of the published schema.
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& [uri, r] : corpus) {
        doc[uri] = {
            {"advisor", r.metadata.advisor},
            {"author", r.metadata.author},
            {"date", r.metadata.date},
            {"description", r.metadata.description},
            {"title", r.metadata.title},
            {"program", r.metadata.program},
            {"faculty", r.metadata.faculty},
            {"raw_content", r.raw_content},
        };
    }
    return doc.dump(2) + "\n";
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    io::write_file(path, serialize_corpus(corpus));
}

void ingest_document(Corpus& corpus, ledger::Ledger& ledger, std::string_view uri,
                     const ThesisMetadata& metadata, std::string extracted_text) {
    if (uri.empty()) throw ValidationError("cannot ingest a document with an empty uri");
    if (corpus.find(uri) != corpus.end()) {
        throw ValidationError("duplicate uri '" + std::string(uri) + "'");
    }
    if (!utf8::is_valid(extracted_text)) {
        throw ValidationError("extracted text for '" + std::string(uri) + "' is not valid UTF-8");
    }
    ledger.enqueue(uri);
    ledger.advance(uri, ledger::Outcome::Processed);
    corpus.emplace(std::string(uri),
                   ThesisRecord{std::string(uri), metadata, std::move(extracted_text)});
}

ThesisRecord StagedFetcher::fetch(std::string_view uri) {
    auto it = staged_.find(uri);
    if (it == staged_.end()) throw Error(ErrorKind::NotFound, "no staged document for '" + std::string(uri) + "'");
    return it->second;
}

IngestSummary run_ingestion(Corpus& corpus, ledger::Ledger& ledger, DocumentFetcher& fetcher) {
    IngestSummary summary;
    for (const auto& uri : ledger.uris_with(ledger::Status::Pending)) {
        try {
            if (corpus.find(uri) != corpus.end()) {
                // Already in the corpus from an earlier run whose ledger was not saved.
                ledger.advance(uri, ledger::Outcome::Processed);
                ++summary.processed;
                continue;
            }
            ThesisRecord doc = fetcher.fetch(uri);
            ingest_document(corpus, ledger, uri, doc.metadata, std::move(doc.raw_content));
            ++summary.processed;
        } catch (const std::exception& e) {
            if (ledger.entry(uri).status == ledger::Status::Pending) {
                ledger.advance(uri, ledger::Outcome::Failed, e.what());
            }
            ++summary.failed;
        }
    }
    return summary;
}

std::string year_of(std::string_view date) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < date.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(date[i]))) {
            if (++run == 4) return std::string(date.substr(i - 3, 4));
        } else {
            run = 0;
        }
    }
    return std::string(date);
}

DatasetStats compute_stats(const Corpus& corpus) {
    std::map<std::string, std::size_t> programs, advisors, authors, years;
    DatasetStats s;
    for (const auto& [uri, r] : corpus) {
        ++s.total_records;
        if (!r.raw_content.empty()) ++s.extracted_texts;
        tally(programs, r.metadata.program);
        tally(advisors, r.metadata.advisor);
        tally(authors, r.metadata.author);
        tally(years, year_of(r.metadata.date));
    }
    s.unique_programs = programs.size();
    s.most_frequent_program = mode_of(programs);
    s.unique_advisors = advisors.size();
    s.most_frequent_advisor = mode_of(advisors);
    s.unique_authors = authors.size();
    s.most_frequent_author = mode_of(authors);
    s.unique_years = years.size();
    s.most_frequent_year = mode_of(years);
    return s;
}

std::string stats_to_json(const DatasetStats& s) {
    auto mode = [](const ModeCount& m) { return nlohmann::ordered_json{{"name", m.name}, {"count", m.count}}; };
    nlohmann::ordered_json j{
        {"total_records", s.total_records},
        {"extracted_texts", s.extracted_texts},
        {"unique_programs", s.unique_programs},
        {"most_frequent_program", mode(s.most_frequent_program)},
        {"unique_advisors", s.unique_advisors},
        {"most_frequent_advisor", mode(s.most_frequent_advisor)},
        {"unique_authors", s.unique_authors},
        {"most_frequent_author", mode(s.most_frequent_author)},
        {"unique_years", s.unique_years},
        {"most_frequent_year", mode(s.most_frequent_year)},
    };
    return j.dump(2) + "\n";
}

std::string stats_to_table(const DatasetStats& s) {
    auto mode = [](const ModeCount& m) {
        return m.name + " (" + std::to_string(m.count) + " records)";
    };
    const std::pair<std::string, std::string> rows[] = {
        {"Total records", std::to_string(s.total_records)},
        {"Extracted texts", std::to_string(s.extracted_texts)},
        {"Unique programs", std::to_string(s.unique_programs)},
        {"Most frequent program", mode(s.most_frequent_program)},
        {"Unique advisors", std::to_string(s.unique_advisors)},
        {"Most frequent advisor", mode(s.most_frequent_advisor)},
        {"Unique authors", std::to_string(s.unique_authors)},
        {"Most frequent author", mode(s.most_frequent_author)},
        {"Unique years", std::to_string(s.unique_years)},
        {"Most frequent year", mode(s.most_frequent_year)},
    };
    std::ostringstream out;
    constexpr int width = 24;
    out << "Metric" << std::string(width - 6, ' ') << "Value\n";
    out << std::string(width + 5, '-') << '\n';
    for (const auto& [metric, value] : rows) {
        out << metric << std::string(width - metric.size(), ' ') << value << '\n';
    }
    return out.str();
}

}  // namespace ragwb::corpus
