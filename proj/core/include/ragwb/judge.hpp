#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragwb/llm_gateway.hpp"
#include "ragwb/rag.hpp"

namespace ragwb::judge {

struct BenchmarkQuestion {
    std::string id;
    std::string text;
    std::optional<std::string> reference;
};

/// UTF-8 JSON array of {id, text, reference?}. Ids must be unique, texts non-empty.
std::vector<BenchmarkQuestion> parse_questions(std::string_view json_text);
std::vector<BenchmarkQuestion> load_questions(const std::filesystem::path& path);

struct RankingRecord {
    std::string question_id;
    std::vector<std::string> presentation_order;
    /// Variant names, best first.
    std::vector<std::string> ranking;
    std::string judge_raw;
    std::map<std::string, double> answer_latency_ms;
};

/// "A".."Z" for positions 0..25.
std::string label_for(std::size_t position);

inline constexpr std::size_t kMaxContestants = 26;

/// Anonymized answers labelled A, B, ... in presentation order, the
/// evaluation criteria, an optional reference answer, and the required
/// `RANKING: <label>,<label>,...` output line.
std::string build_judge_prompt(std::string_view question, std::span<const std::string> answers,
                               const std::optional<std::string>& reference = std::nullopt);

enum class JudgeParseErrorCode {
    MissingRankingLine,
    DuplicateLabel,
    UnknownLabel,
    IncompletePermutation,
};

std::string_view to_string(JudgeParseErrorCode code);

class JudgeParseError : public Error {
public:
    JudgeParseError(JudgeParseErrorCode code, const std::string& detail)
        : Error(ErrorKind::Parse, "judge " + std::string(to_string(code)) + ": " + detail), code_(code) {}
    JudgeParseErrorCode code() const noexcept { return code_; }

private:
    JudgeParseErrorCode code_;
};

/// Reads the last line that starts with `RANKING:` and maps its labels back
/// through `presentation_order` to variant names.
std::vector<std::string> parse_judge_ranking(std::string_view judge_raw,
                                             std::span<const std::string> presentation_order);

/// A model under evaluation. `knowledge` is set for RAG variants.
struct Contestant {
    std::string name;
    std::shared_ptr<llm::ChatEndpoint> endpoint;
    std::shared_ptr<const rag::KnowledgeBase> knowledge;
};

struct BenchmarkParams {
    std::uint64_t seed = 7;
    std::size_t parallelism = 4;
    /// Extra judge calls after an unparseable ranking before the question is voided.
    int judge_reasks = 1;
    rag::RetrievalParams retrieval;
    std::string rag_template = std::string(rag::kDefaultTemplate);
    llm::ChatRequest answer_settings;
    llm::ChatRequest judge_settings;
};

struct ExcludedQuestion {
    std::string question_id;
    std::string reason;
};

struct BenchmarkRun {
    /// Sorted by question id.
    std::vector<RankingRecord> records;
    std::vector<ExcludedQuestion> excluded;
    /// Contestant names, sorted.
    std::vector<std::string> variants;
};

/// Presentation order for one question: the sorted names shuffled by a
/// generator seeded from (seed, question id). Independent of scheduling.
std::vector<std::string> presentation_order(std::span<const std::string> sorted_names, std::uint64_t seed,
                                            std::string_view question_id);

/// Asks every contestant every question, has the judge rank the anonymized
/// answers, and returns the per-question records. Questions where any
/// contestant or the judge fails are excluded and listed. Throws
/// ValidationError for fewer than two contestants and Error(Endpoint) when
/// every question failed.
BenchmarkRun run_benchmark(const std::vector<BenchmarkQuestion>& questions, const std::vector<Contestant>& contestants,
                           llm::ChatEndpoint& judge, const BenchmarkParams& params = {});

struct LeaderboardRow {
    std::string variant;
    double average_position = 0.0;
    /// Sum of 1-based positions; average_position = position_sum / questions_counted.
    std::size_t position_sum = 0;
    std::size_t first_places = 0;
    std::size_t questions_counted = 0;

    bool operator==(const LeaderboardRow&) const = default;
};

struct Leaderboard {
    /// Ascending by average position, ties by name.
    std::vector<LeaderboardRow> rows;
    std::size_t questions_counted = 0;

    bool operator==(const Leaderboard&) const = default;
};

/// Throws ValidationError when a record is not a permutation of `variants`
/// or when there are no records.
Leaderboard aggregate(std::span<const RankingRecord> records, std::span<const std::string> variants);

}  // namespace ragwb::judge
