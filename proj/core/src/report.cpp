#include "ragwb/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "ragwb/io.hpp"

namespace ragwb::report {
namespace {

using ojson = nlohmann::ordered_json;

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string shortest(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

// RFC 4180 quoting when needed.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

nlohmann::json parse_or_throw(std::string_view text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed ") + what + ": " + e.what(), e.byte);
    }
}

}  // namespace

Format format_from_string(std::string_view text) {
    if (text == "json") return Format::Json;
    if (text == "csv") return Format::Csv;
    if (text == "table") return Format::Table;
    throw Error(ErrorKind::Usage, "unknown report format '" + std::string(text) + "' (json, csv, table)");
}

std::string_view extension(Format format) {
    switch (format) {
        case Format::Json: return "json";
        case Format::Csv: return "csv";
        case Format::Table: return "txt";
    }
    return "txt";
}

std::string leaderboard_to_json(const judge::Leaderboard& lb) {
    ojson rows = ojson::array();
    for (const auto& r : lb.rows) {
        rows.push_back({{"variant", r.variant},
                        {"average_position", r.average_position},
                        {"position_sum", r.position_sum},
                        {"first_places", r.first_places},
                        {"questions_counted", r.questions_counted}});
    }
    return ojson{{"questions_counted", lb.questions_counted}, {"rows", std::move(rows)}}.dump(2) + "\n";
}

judge::Leaderboard leaderboard_from_json(std::string_view json_text) {
    const auto doc = parse_or_throw(json_text, "leaderboard");
    judge::Leaderboard lb;
    try {
        lb.questions_counted = doc.at("questions_counted").get<std::size_t>();
        for (const auto& r : doc.at("rows")) {
            lb.rows.push_back({r.at("variant").get<std::string>(), r.at("average_position").get<double>(),
                               r.at("position_sum").get<std::size_t>(), r.at("first_places").get<std::size_t>(),
                               r.at("questions_counted").get<std::size_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("leaderboard: ") + e.what());
    }
    return lb;
}

std::string leaderboard_to_csv(const judge::Leaderboard& lb) {
    std::string out = "variant,avg_position,first_places,questions\n";
    for (const auto& r : lb.rows) {
        out += csv_field(r.variant) + "," + shortest(r.average_position) + "," + std::to_string(r.first_places) +
               "," + std::to_string(r.questions_counted) + "\n";
    }
    return out;
}

std::string leaderboard_to_table(const judge::Leaderboard& lb) {
    std::size_t name_width = 7;  // "Variant"
    for (const auto& r : lb.rows) name_width = std::max(name_width, r.variant.size());
    std::ostringstream out;
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    out << "Rank  " << pad("Variant", name_width) << "  Position  First places  Questions\n";
    out << std::string(6 + name_width + 2 + 8 + 2 + 12 + 2 + 9, '-') << '\n';
    for (std::size_t i = 0; i < lb.rows.size(); ++i) {
        const auto& r = lb.rows[i];
        const auto pos = fixed2(r.average_position);
        const auto firsts = std::to_string(r.first_places);
        const auto qs = std::to_string(r.questions_counted);
        out << pad(std::to_string(i + 1), 6) << pad(r.variant, name_width) << "  " << std::string(8 - std::min<std::size_t>(8, pos.size()), ' ')
            << pos << "  " << std::string(12 - std::min<std::size_t>(12, firsts.size()), ' ') << firsts << "  "
            << std::string(9 - std::min<std::size_t>(9, qs.size()), ' ') << qs << '\n';
    }
    return out.str();
}

std::string render(const judge::Leaderboard& lb, Format format) {
    switch (format) {
        case Format::Json: return leaderboard_to_json(lb);
        case Format::Csv: return leaderboard_to_csv(lb);
        case Format::Table: return leaderboard_to_table(lb);
    }
    return leaderboard_to_table(lb);
}

std::string average_position_series(const judge::Leaderboard& lb) {
    std::string out = "variant,avg_position\n";
    for (const auto& r : lb.rows) out += csv_field(r.variant) + "," + shortest(r.average_position) + "\n";
    return out;
}

std::string first_place_series(const judge::Leaderboard& lb) {
    std::string out = "variant,first_places\n";
    for (const auto& r : lb.rows) out += csv_field(r.variant) + "," + std::to_string(r.first_places) + "\n";
    return out;
}

std::string records_to_json(const std::vector<judge::RankingRecord>& records) {
    ojson out = ojson::array();
    for (const auto& r : records) {
        out.push_back({{"question_id", r.question_id},
                       {"presentation_order", r.presentation_order},
                       {"ranking", r.ranking},
                       {"judge_raw", r.judge_raw}});
    }
    return out.dump(2) + "\n";
}

std::vector<judge::RankingRecord> records_from_json(std::string_view json_text) {
    const auto doc = parse_or_throw(json_text, "records file");
    if (!doc.is_array()) throw ParseError("records file must be a JSON array", 0);
    std::vector<judge::RankingRecord> out;
    try {
        for (const auto& r : doc) {
            judge::RankingRecord rec;
            rec.question_id = r.at("question_id").get<std::string>();
            rec.presentation_order = r.at("presentation_order").get<std::vector<std::string>>();
            rec.ranking = r.at("ranking").get<std::vector<std::string>>();
            rec.judge_raw = r.at("judge_raw").get<std::string>();
            out.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("records file: ") + e.what());
    }
    return out;
}

std::string timings_to_json(const std::vector<judge::RankingRecord>& records) {
    ojson out = ojson::array();
    for (const auto& r : records) {
        ojson latencies = ojson::object();
        for (const auto& [name, ms] : r.answer_latency_ms) latencies[name] = ms;
        out.push_back({{"question_id", r.question_id}, {"answer_latency_ms", std::move(latencies)}});
    }
    return out.dump(2) + "\n";
}

std::string run_metadata_to_json(const RunMetadata& meta) {
    ojson excluded = ojson::array();
    for (const auto& ex : meta.excluded) excluded.push_back({{"question_id", ex.question_id}, {"reason", ex.reason}});
    return ojson{{"seed", meta.seed},
                 {"judge", meta.judge},
                 {"variants", meta.variants},
                 {"questions_total", meta.questions_total},
                 {"questions_counted", meta.questions_total - meta.excluded.size()},
                 {"excluded", std::move(excluded)},
                 {"retrieval",
                  {{"threshold", meta.retrieval.threshold},
                   {"limit", meta.retrieval.limit},
                   {"excerpt_chars", meta.retrieval.excerpt_chars}}}}
               .dump(2) +
           "\n";
}

RunMetadata run_metadata_from_json(std::string_view json_text) {
    const auto doc = parse_or_throw(json_text, "run metadata");
    RunMetadata meta;
    try {
        meta.seed = doc.at("seed").get<std::uint64_t>();
        meta.judge = doc.at("judge").get<std::string>();
        meta.variants = doc.at("variants").get<std::vector<std::string>>();
        meta.questions_total = doc.at("questions_total").get<std::size_t>();
        for (const auto& ex : doc.at("excluded")) {
            meta.excluded.push_back({ex.at("question_id").get<std::string>(), ex.at("reason").get<std::string>()});
        }
        const auto& r = doc.at("retrieval");
        meta.retrieval = {r.at("threshold").get<double>(), r.at("limit").get<std::size_t>(),
                          r.at("excerpt_chars").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("run metadata: ") + e.what());
    }
    return meta;
}

std::vector<std::filesystem::path> emit_report(const judge::Leaderboard& lb,
                                               const std::vector<judge::RankingRecord>& records, Format format,
                                               const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::filesystem::path& name, const std::string& contents) {
        io::write_file(dir / name, contents);
        written.push_back(dir / name);
    };
    put(std::string("leaderboard.") + std::string(extension(format)), render(lb, format));
    put(kAverageSeriesFile, average_position_series(lb));
    put(kFirstPlaceSeriesFile, first_place_series(lb));
    put(kRecordsFile, records_to_json(records));
    return written;
}

}  // namespace ragwb::report
