#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ragwb/judge.hpp"

namespace ragwb::report {

enum class Format { Json, Csv, Table };

Format format_from_string(std::string_view text);
std::string_view extension(Format format);

std::string leaderboard_to_json(const judge::Leaderboard& lb);
judge::Leaderboard leaderboard_from_json(std::string_view json_text);

/// Header `variant,avg_position,first_places,questions`.
std::string leaderboard_to_csv(const judge::Leaderboard& lb);
std::string leaderboard_to_table(const judge::Leaderboard& lb);
std::string render(const judge::Leaderboard& lb, Format format);

/// Per-variant series behind the average-position and first-place charts.
std::string average_position_series(const judge::Leaderboard& lb);
std::string first_place_series(const judge::Leaderboard& lb);

/// Records without latencies, so they are reproducible under scripted endpoints.
std::string records_to_json(const std::vector<judge::RankingRecord>& records);
std::vector<judge::RankingRecord> records_from_json(std::string_view json_text);

/// Per-question answer latencies; kept apart from the reproducible report.
std::string timings_to_json(const std::vector<judge::RankingRecord>& records);

struct RunMetadata {
    std::uint64_t seed = 0;
    std::string judge;
    std::vector<std::string> variants;
    std::size_t questions_total = 0;
    std::vector<judge::ExcludedQuestion> excluded;
    rag::RetrievalParams retrieval;
};

std::string run_metadata_to_json(const RunMetadata& meta);
RunMetadata run_metadata_from_json(std::string_view json_text);

inline constexpr const char* kRecordsFile = "records.json";
inline constexpr const char* kRunFile = "run.json";
inline constexpr const char* kTimingsFile = "timings.json";
inline constexpr const char* kAverageSeriesFile = "average_position.csv";
inline constexpr const char* kFirstPlaceSeriesFile = "first_places.csv";

/// Writes leaderboard.<ext> for `format`, both series and records.json into
/// `dir`. Returns the paths written.
std::vector<std::filesystem::path> emit_report(const judge::Leaderboard& lb,
                                               const std::vector<judge::RankingRecord>& records, Format format,
                                               const std::filesystem::path& dir);

}  // namespace ragwb::report
