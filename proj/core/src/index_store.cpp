#include "ragwb/index_store.hpp"

#include "json.hpp"
#include "ragwb/error.hpp"
#include "ragwb/io.hpp"
#include "ragwb/npy.hpp"

namespace ragwb::index {

std::vector<tfidf::Document> documents_from_corpus(const corpus::Corpus& corpus, bool include_metadata) {
    std::vector<tfidf::Document> docs;
    for (const auto& [uri, record] : corpus) {
        if (record.raw_content.empty()) continue;
        std::string text = record.raw_content;
        if (include_metadata) {
            text += "\n" + record.metadata.title + "\n" + record.metadata.description;
        }
        docs.push_back({uri, std::move(text)});
    }
    return docs;
}

void save_index(const tfidf::TfidfIndex& index, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const auto& vocab = index.vocabulary();
    npy::RowWriter writer(dir / kMatrixFile, index.size(), vocab.size());
    std::vector<double> dense(vocab.size(), 0.0);
    for (const auto& row : index.rows()) {
        for (const auto& e : row) dense[e.column] = e.weight;
        writer.write_row(dense);
        for (const auto& e : row) dense[e.column] = 0.0;
    }
    writer.close();

    nlohmann::ordered_json meta{
        {"terms", vocab.terms()},
        {"df", vocab.df()},
        {"n_docs", vocab.n_docs()},
        {"uris", index.uris()},
    };
    io::write_file(dir / kMetaFile, meta.dump() + "\n");
}

tfidf::TfidfIndex load_index(const std::filesystem::path& dir, const Tokenizer& tokenizer) {
    const auto matrix_path = dir / kMatrixFile;
    const auto meta_path = dir / kMetaFile;
    for (const auto& p : {matrix_path, meta_path}) {
        if (!std::filesystem::exists(p)) throw Error(ErrorKind::NotFound, "index file missing: " + p.string());
    }

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(io::read_file(meta_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed index sidecar: ") + e.what(), e.byte);
    }
    std::vector<std::string> terms;
    std::vector<std::size_t> df;
    std::size_t n_docs = 0;
    std::vector<std::string> uris;
    try {
        terms = meta.at("terms").get<std::vector<std::string>>();
        df = meta.at("df").get<std::vector<std::size_t>>();
        n_docs = meta.at("n_docs").get<std::size_t>();
        uris = meta.at("uris").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("index sidecar: ") + e.what());
    }

    npy::RowReader reader(matrix_path);
    const auto& h = reader.header();
    if (h.cols != terms.size() || h.rows != uris.size()) {
        throw ValidationError("index shape mismatch: matrix is " + std::to_string(h.rows) + "x" +
                              std::to_string(h.cols) + " but sidecar lists " + std::to_string(uris.size()) +
                              " uris and " + std::to_string(terms.size()) + " terms");
    }

    std::vector<tfidf::SparseVector> rows;
    rows.reserve(h.rows);
    std::vector<double> dense;
    while (reader.next_row(dense)) {
        tfidf::SparseVector row;
        for (std::size_t c = 0; c < dense.size(); ++c) {
            if (dense[c] != 0.0) row.push_back({static_cast<std::uint32_t>(c), dense[c]});
        }
        rows.push_back(std::move(row));
    }
    return tfidf::TfidfIndex(tfidf::Vocabulary(std::move(terms), std::move(df), n_docs), std::move(rows),
                             std::move(uris), tokenizer);
}

void save_documents(const std::vector<std::string>& texts, const std::filesystem::path& dir) {
    io::write_file(dir / kDocumentsFile, nlohmann::json(texts).dump() + "\n");
}

std::vector<std::string> load_documents(const std::filesystem::path& dir) {
    const auto path = dir / kDocumentsFile;
    if (!std::filesystem::exists(path)) throw Error(ErrorKind::NotFound, "index file missing: " + path.string());
    try {
        return nlohmann::json::parse(io::read_file(path)).get<std::vector<std::string>>();
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed documents file: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("documents file: ") + e.what());
    }
}

}  // namespace ragwb::index
