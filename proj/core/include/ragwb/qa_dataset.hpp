#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ragwb/corpus.hpp"
#include "ragwb/llm_gateway.hpp"

namespace ragwb::qa {

inline constexpr std::size_t kMinFragmentChars = 200;
inline constexpr std::size_t kDefaultFragmentChars = 1500;
inline constexpr double kDefaultTrainRatio = 0.75;

/// A contiguous slice of a document. Fragments of one document tile its text:
/// concatenating them in ordinal order gives back raw_content byte for byte.
/// The separator a cut was made at stays at the end of the earlier fragment.
struct Fragment {
    std::string source_uri;
    std::size_t ordinal = 0;
    std::string text;

    bool operator==(const Fragment&) const = default;
};

struct QaPair {
    std::string prompt;
    std::string completion;
    std::string fragment;

    bool operator==(const QaPair&) const = default;
    auto operator<=>(const QaPair&) const = default;
};

struct SplitDataset {
    std::vector<QaPair> train;
    std::vector<QaPair> test;
    std::uint64_t seed = 0;
    double ratio = kDefaultTrainRatio;
};

/// Greedy split, lengths in code points. Each cut is the last paragraph break
/// (a newline, optional spaces/tabs, a newline) that fits the window; failing
/// that the last sentence end ('.', '?' or '!' followed by whitespace); failing
/// that a hard cut at the limit. Throws ValidationError for limits below 200.
std::vector<Fragment> fragment_document(const corpus::ThesisRecord& record,
                                        std::size_t max_fragment_chars = kDefaultFragmentChars);

/// Result of reading one generator reply.
struct ParsedPairs {
    std::vector<QaPair> pairs;
    std::size_t skipped = 0;
};

/// Generator replies carry one pair per line: `Q: <question><TAB>A: <answer>`.
/// Blank lines are ignored; any other line that does not match, or that has an
/// empty question or answer, is counted in `skipped`.
ParsedPairs parse_generator_output(std::string_view reply, std::string_view fragment_text);

inline constexpr std::string_view kDefaultInstructionTemplate =
    "Read the following fragment of an academic thesis and write self-contained "
    "question-answer pairs that can be understood without the fragment. Write one "
    "pair per line, exactly in the form:\n"
    "Q: <question>\tA: <answer>\n"
    "Do not number the pairs or add any other text.\n\n"
    "Fragment:\n{fragment}\n";

/// Renders the instruction, calls the generator and parses its reply.
/// Endpoint failures propagate as EndpointError (retryable per its kind).
/// Throws ValidationError when the template lacks `{fragment}`. `settings`
/// supplies sampling and timeout; its messages are replaced.
ParsedPairs generate_qa(const Fragment& fragment, llm::ChatEndpoint& generator,
                        std::string_view instruction_template = kDefaultInstructionTemplate,
                        llm::ChatRequest settings = {});

struct GenerationReport {
    std::vector<QaPair> pairs;
    std::size_t skipped_lines = 0;
    std::size_t failed_fragments = 0;
};

/// Runs generate_qa over every fragment with at most `parallelism` calls in
/// flight. Output order is (source_uri, ordinal) whatever the completion order.
GenerationReport generate_all(const std::vector<Fragment>& fragments, llm::ChatEndpoint& generator,
                              std::string_view instruction_template, std::size_t parallelism = 4,
                              const llm::ChatRequest& settings = {});

/// Shuffles a copy of `pairs` with Xoshiro256(seed) and takes the first
/// floor(ratio * N) as train. Throws ValidationError unless 0 < ratio < 1.
SplitDataset split_dataset(const std::vector<QaPair>& pairs, double ratio, std::uint64_t seed);

struct LengthAverages {
    std::size_t prompt_chars = 0;
    std::size_t completion_chars = 0;
};

/// Mean code-point lengths, rounded half up. Throws ValidationError when empty.
LengthAverages qa_stats(const std::vector<QaPair>& pairs);

std::string pairs_to_json(const std::vector<QaPair>& pairs);
std::vector<QaPair> pairs_from_json(std::string_view json_text);
std::vector<QaPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<QaPair>& pairs, const std::filesystem::path& path);

std::string fragments_to_json(const std::vector<Fragment>& fragments);
std::vector<Fragment> fragments_from_json(std::string_view json_text);

/// Writes train.json, test.json and split.json (seed, ratio, sizes) into `dir`.
void save_split(const SplitDataset& split, const std::filesystem::path& dir);

}  // namespace ragwb::qa
