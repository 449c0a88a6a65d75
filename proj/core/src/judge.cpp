#include "ragwb/judge.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "ragwb/io.hpp"
#include "ragwb/prng.hpp"
#include "spdlog/spdlog.h"

namespace ragwb::judge {
namespace {

std::string_view trim(std::string_view s, std::string_view junk = " \t\r") {
    const auto b = s.find_first_not_of(junk);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(junk);
    return s.substr(b, e - b + 1);
}

constexpr std::string_view kRankingPrefix = "RANKING:";

constexpr std::string_view kReaskMessage =
    "Your reply did not end with a valid ranking line. Reply with exactly one line of the form "
    "RANKING: <label>,<label>,... listing every answer label once, best first.";

}  // namespace

std::vector<BenchmarkQuestion> parse_questions(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed questions file: ") + e.what(), e.byte);
    }
    if (!doc.is_array()) throw ParseError("questions file must be a JSON array", 0);
    std::vector<BenchmarkQuestion> out;
    std::set<std::string> ids;
    for (const auto& item : doc) {
        BenchmarkQuestion q;
        try {
            q.id = item.at("id").is_number_integer() ? std::to_string(item.at("id").get<long long>())
                                                     : item.at("id").get<std::string>();
            q.text = item.at("text").get<std::string>();
            if (auto it = item.find("reference"); it != item.end() && !it->is_null()) {
                q.reference = it->get<std::string>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("question entry: ") + e.what());
        }
        if (q.id.empty()) throw ValidationError("question with empty id");
        if (q.text.empty()) throw ValidationError("question '" + q.id + "' has empty text");
        if (!ids.insert(q.id).second) throw ValidationError("duplicate question id '" + q.id + "'");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<BenchmarkQuestion> load_questions(const std::filesystem::path& path) {
    return parse_questions(io::read_file(path));
}

std::string label_for(std::size_t position) {
    if (position >= kMaxContestants) throw ValidationError("at most 26 answers can be labelled");
    return std::string(1, static_cast<char>('A' + position));
}

std::string build_judge_prompt(std::string_view question, std::span<const std::string> answers,
                               const std::optional<std::string>& reference) {
    if (answers.size() < 2) throw ValidationError("the judge needs at least two answers to rank");
    if (answers.size() > kMaxContestants) throw ValidationError("at most 26 answers can be labelled");

    std::ostringstream out;
    out << "You are an impartial judge comparing " << answers.size()
        << " anonymous assistants that answered the same question.\n"
           "Judge every answer on three criteria: coherence (is it well organized and internally "
           "consistent), relevance (does it address the question asked) and precision (is it "
           "factually correct and specific). Ignore answer length and the order in which answers "
           "are shown.\n\n";
    out << "## Question\n" << question << "\n\n";
    if (reference) out << "## Reference answer\n" << *reference << "\n\n";
    for (std::size_t i = 0; i < answers.size(); ++i) {
        out << "## Answer " << label_for(i) << "\n" << answers[i] << "\n\n";
    }
    out << "Rank all " << answers.size()
        << " answers from best to worst. You may explain your reasoning first, but the last line "
           "of your reply must have the form\n"
           "RANKING: <label>,<label>,...\n"
           "listing every label exactly once, best first.\n";
    return out.str();
}

std::string_view to_string(JudgeParseErrorCode code) {
    switch (code) {
        case JudgeParseErrorCode::MissingRankingLine: return "missing-ranking-line";
        case JudgeParseErrorCode::DuplicateLabel: return "duplicate-label";
        case JudgeParseErrorCode::UnknownLabel: return "unknown-label";
        case JudgeParseErrorCode::IncompletePermutation: return "incomplete-permutation";
    }
    return "unknown";
}

std::vector<std::string> parse_judge_ranking(std::string_view judge_raw,
                                             std::span<const std::string> presentation_order) {
    std::optional<std::string_view> line;
    std::size_t pos = 0;
    while (pos <= judge_raw.size()) {
        auto eol = judge_raw.find('\n', pos);
        if (eol == std::string_view::npos) eol = judge_raw.size();
        // Markdown emphasis around the keyword is common in judge output.
        const auto candidate = trim(judge_raw.substr(pos, eol - pos), " \t\r*#");
        if (candidate.starts_with(kRankingPrefix)) line = candidate.substr(kRankingPrefix.size());
        pos = eol + 1;
    }
    if (!line) throw JudgeParseError(JudgeParseErrorCode::MissingRankingLine, "no line starts with RANKING:");

    std::vector<bool> used(presentation_order.size(), false);
    std::vector<std::string> ranking;
    std::string_view rest = *line;
    for (;;) {
        const auto comma = rest.find(',');
        const auto token = trim(rest.substr(0, comma), " \t\r*[]().");
        if (!token.empty() || comma != std::string_view::npos) {
            if (token.size() != 1 || token[0] < 'A' ||
                static_cast<std::size_t>(token[0] - 'A') >= presentation_order.size()) {
                throw JudgeParseError(JudgeParseErrorCode::UnknownLabel, "label '" + std::string(token) + "'");
            }
            const auto idx = static_cast<std::size_t>(token[0] - 'A');
            if (used[idx]) throw JudgeParseError(JudgeParseErrorCode::DuplicateLabel, "label '" + std::string(token) + "'");
            used[idx] = true;
            ranking.push_back(presentation_order[idx]);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (ranking.size() != presentation_order.size()) {
        throw JudgeParseError(JudgeParseErrorCode::IncompletePermutation,
                              "ranked " + std::to_string(ranking.size()) + " of " +
                                  std::to_string(presentation_order.size()) + " answers");
    }
    return ranking;
}

std::vector<std::string> presentation_order(std::span<const std::string> sorted_names, std::uint64_t seed,
                                            std::string_view question_id) {
    std::vector<std::string> order(sorted_names.begin(), sorted_names.end());
    Xoshiro256 rng(SplitMix64(seed).next() ^ fnv1a64(question_id));
    shuffle(std::span<std::string>(order), rng);
    return order;
}

namespace {

struct QuestionOutcome {
    std::optional<RankingRecord> record;
    std::string failure;
};

QuestionOutcome judge_question(const BenchmarkQuestion& q, const std::vector<Contestant>& contestants,
                               const std::vector<std::string>& names, llm::ChatEndpoint& judge,
                               const BenchmarkParams& params) {
    QuestionOutcome outcome;
    RankingRecord record;
    record.question_id = q.id;

    std::map<std::string, std::string> answers;
    for (const auto& c : contestants) {
        try {
            llm::ChatResponse response;
            if (c.knowledge) {
                response = rag::rag_answer(q.text, *c.knowledge, *c.endpoint, params.retrieval, params.answer_settings,
                                           params.rag_template)
                               .response;
            } else {
                llm::ChatRequest request = params.answer_settings;
                request.messages = {{llm::Role::User, q.text}};
                response = c.endpoint->complete(request);
            }
            answers[c.name] = std::move(response.content);
            record.answer_latency_ms[c.name] = response.latency_ms;
        } catch (const Error& e) {
            outcome.failure = "variant " + c.name + ": " + e.what();
            return outcome;
        }
    }

    record.presentation_order = presentation_order(names, params.seed, q.id);
    std::vector<std::string> shown;
    for (const auto& name : record.presentation_order) shown.push_back(answers[name]);

    llm::ChatRequest request = params.judge_settings;
    request.messages = {{llm::Role::User, build_judge_prompt(q.text, shown, q.reference)}};
    for (int attempt = 0;; ++attempt) {
        llm::ChatResponse verdict;
        try {
            verdict = judge.complete(request);
        } catch (const Error& e) {
            outcome.failure = "judge: " + std::string(e.what());
            return outcome;
        }
        try {
            record.ranking = parse_judge_ranking(verdict.content, record.presentation_order);
            record.judge_raw = std::move(verdict.content);
            outcome.record = std::move(record);
            return outcome;
        } catch (const JudgeParseError& e) {
            if (attempt >= params.judge_reasks) {
                outcome.failure = "judge: " + std::string(e.what());
                return outcome;
            }
            spdlog::info("question {}: {}; re-asking the judge", q.id, e.what());
            request.messages.push_back({llm::Role::Assistant, verdict.content});
            request.messages.push_back({llm::Role::User, std::string(kReaskMessage)});
        }
    }
}

}  // namespace

BenchmarkRun run_benchmark(const std::vector<BenchmarkQuestion>& questions, const std::vector<Contestant>& contestants,
                           llm::ChatEndpoint& judge, const BenchmarkParams& params) {
    if (contestants.size() < 2) throw ValidationError("a benchmark needs at least two variants");
    if (contestants.size() > kMaxContestants) throw ValidationError("a benchmark supports at most 26 variants");

    std::vector<Contestant> sorted = contestants;
    std::sort(sorted.begin(), sorted.end(), [](const Contestant& a, const Contestant& b) { return a.name < b.name; });
    BenchmarkRun run;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (!sorted[i].endpoint) throw ValidationError("variant '" + sorted[i].name + "' has no endpoint");
        if (i > 0 && sorted[i - 1].name == sorted[i].name) {
            throw ValidationError("duplicate variant '" + sorted[i].name + "'");
        }
        run.variants.push_back(sorted[i].name);
    }

    std::vector<QuestionOutcome> outcomes(questions.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < questions.size(); i = next++) {
            outcomes[i] = judge_question(questions[i], sorted, run.variants, judge, params);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(params.parallelism, 1, std::max<std::size_t>(1, questions.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (outcomes[i].record) {
            run.records.push_back(std::move(*outcomes[i].record));
        } else {
            run.excluded.push_back({questions[i].id, std::move(outcomes[i].failure)});
        }
    }
    std::sort(run.records.begin(), run.records.end(),
              [](const RankingRecord& a, const RankingRecord& b) { return a.question_id < b.question_id; });
    std::sort(run.excluded.begin(), run.excluded.end(),
              [](const ExcludedQuestion& a, const ExcludedQuestion& b) { return a.question_id < b.question_id; });

    if (!questions.empty() && run.records.empty()) {
        throw Error(ErrorKind::Endpoint, "all " + std::to_string(questions.size()) +
                                             " questions failed; first failure: " + run.excluded.front().reason);
    }
    for (const auto& ex : run.excluded) spdlog::warn("question {} excluded: {}", ex.question_id, ex.reason);
    return run;
}

Leaderboard aggregate(std::span<const RankingRecord> records, std::span<const std::string> variants) {
    if (records.empty()) throw ValidationError("no ranking records to aggregate");
    std::map<std::string, LeaderboardRow> rows;
    for (const auto& v : variants) {
        if (!rows.emplace(v, LeaderboardRow{v, 0.0, 0, 0, 0}).second) {
            throw ValidationError("variant '" + v + "' listed twice");
        }
    }
    for (const auto& rec : records) {
        if (rec.ranking.size() != rows.size()) {
            throw ValidationError("record " + rec.question_id + " ranks " + std::to_string(rec.ranking.size()) +
                                  " variants, expected " + std::to_string(rows.size()));
        }
        std::set<std::string_view> seen;
        for (std::size_t pos = 0; pos < rec.ranking.size(); ++pos) {
            auto it = rows.find(rec.ranking[pos]);
            if (it == rows.end() || !seen.insert(rec.ranking[pos]).second) {
                throw ValidationError("record " + rec.question_id + " is not a permutation of the variant set");
            }
            it->second.position_sum += pos + 1;
            if (pos == 0) ++it->second.first_places;
        }
    }

    Leaderboard lb;
    lb.questions_counted = records.size();
    for (auto& [name, row] : rows) {
        row.questions_counted = records.size();
        row.average_position = static_cast<double>(row.position_sum) / static_cast<double>(records.size());
        lb.rows.push_back(std::move(row));
    }
    // Same denominator for every row, so comparing sums is exact.
    std::stable_sort(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        return a.position_sum < b.position_sum;
    });
    return lb;
}

}  // namespace ragwb::judge
