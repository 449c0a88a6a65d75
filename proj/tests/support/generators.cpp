#include "generators.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <set>

#include <unistd.h>

namespace ragwb::testkit {

std::filesystem::path data_dir() { return RAGWB_TEST_DATA_DIR; }

std::filesystem::path scratch_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("ragwb-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

namespace {

constexpr std::array<const char*, 20> kSyllables{"ka", "lo", "mi", "ne", "ru", "ta", "si", "do", "ña", "é",
                                                 "ü", "zo", "pe", "á", "qu", "x", "7", "42", "ção", "bi"};
constexpr std::array<const char*, 8> kSeparators{" ", "  ", ", ", ". ", "\n", " - ", "; ", "\t"};

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

std::string random_word(Rng& rng) {
    std::string w;
    const auto n = 1 + pick(rng, 4);
    for (std::size_t i = 0; i < n; ++i) w += kSyllables[pick(rng, kSyllables.size())];
    return w;
}

}  // namespace

std::vector<std::string> random_tokens(Rng& rng, const std::vector<std::string>& pool, std::size_t n_words) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n_words; ++i) out.push_back(pool[pick(rng, pool.size())]);
    return out;
}

std::string join_tokens(Rng& rng, const std::vector<std::string>& tokens) {
    std::string text;
    if (pick(rng, 3) == 0) text += "  ";
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) text += kSeparators[pick(rng, kSeparators.size())];
        std::string w = tokens[i];
        // Upper-case the first ASCII letter now and then; the tokenizer folds it back.
        if (!w.empty() && w[0] >= 'a' && w[0] <= 'z' && pick(rng, 4) == 0) w[0] = static_cast<char>(w[0] - 32);
        text += w;
    }
    if (pick(rng, 2) == 0) text += ".";
    return text;
}

RandomCorpus random_corpus(Rng& rng, std::size_t max_docs, std::size_t max_terms) {
    RandomCorpus c;
    const auto target_terms = 1 + pick(rng, max_terms);
    std::set<std::string> seen;
    for (std::size_t tries = 0; c.pool.size() < target_terms && tries < target_terms * 20; ++tries) {
        auto w = random_word(rng);
        if (seen.insert(w).second) c.pool.push_back(w);
    }
    const auto n_docs = 1 + pick(rng, max_docs);
    for (std::size_t i = 0; i < n_docs; ++i) {
        const std::size_t len = pick(rng, 10) == 0 ? 0 : 1 + pick(rng, 80);
        auto tokens = random_tokens(rng, c.pool, len);
        c.docs.push_back({"doc:" + std::to_string(i), join_tokens(rng, tokens)});
        c.tokens.push_back(std::move(tokens));
    }
    if (std::all_of(c.tokens.begin(), c.tokens.end(), [](const auto& t) { return t.empty(); })) {
        c.tokens[0] = {c.pool[0]};
        c.docs[0].text = c.pool[0];
    }
    return c;
}

std::string random_prose(Rng& rng, std::size_t approx_chars) {
    static constexpr std::array<const char*, 9> kEnds{". ", "? ", "! ", ".\n", "\n\n", "\n \t\n", ".\n\n", ", ", " "};
    std::string text;
    std::size_t chars = 0;
    while (chars < approx_chars) {
        if (pick(rng, 25) == 0) {
            const auto run = 50 + pick(rng, 400);
            for (std::size_t i = 0; i < run; ++i) text += (i % 7 == 3) ? "ñ" : "x";
            chars += run;
            continue;
        }
        const auto words = 3 + pick(rng, 15);
        for (std::size_t i = 0; i < words; ++i) {
            if (i > 0) {
                text += ' ';
                ++chars;
            }
            const auto w = random_word(rng);
            text += w;
            chars += w.size();
        }
        const std::string end = kEnds[pick(rng, kEnds.size())];
        text += end;
        chars += end.size();
    }
    return text;
}

RecordSet random_record_set(Rng& rng, std::size_t n_variants, std::size_t questions) {
    RecordSet s;
    for (std::size_t v = 0; v < n_variants; ++v) s.variants.push_back("variant-" + std::to_string(v));
    for (std::size_t q = 0; q < questions; ++q) {
        judge::RankingRecord r;
        r.question_id = "q" + std::to_string(q);
        r.ranking = s.variants;
        std::shuffle(r.ranking.begin(), r.ranking.end(), rng);
        r.presentation_order = s.variants;
        s.records.push_back(std::move(r));
    }
    return s;
}

std::vector<std::string> default_variants() {
    return {"LLM-q-ft-rag", "LLM-ft-rag", "LLM-q-ft", "LLM-ft", "LLM-q",
            "LLM-q-rag", "LLM", "LLM-rag", "LLM-ft-q-rag", "LLM-ft-q"};
}

RecordSet published_leaderboard_scenario() {
    const std::string best = "LLM-q-ft-rag";
    const std::string most_firsts = "LLM-q-ft";
    // Variants other than the two above, in the order used to fill free slots.
    const std::vector<std::string> rest{"LLM-ft-rag", "LLM-ft", "LLM-q", "LLM-q-rag",
                                        "LLM", "LLM-rag", "LLM-ft-q-rag", "LLM-ft-q"};
    // Winners of the questions neither of the two leading variants won.
    std::vector<std::string> other_winners;
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{
             {"LLM-ft-rag", 22}, {"LLM-ft", 18}, {"LLM-q", 4}, {"LLM-q-rag", 2}, {"LLM-rag", 1}}) {
        other_winners.insert(other_winners.end(), n, name);
    }

    RecordSet s;
    s.variants = default_variants();
    std::sort(s.variants.begin(), s.variants.end());

    // Each question fixes a few (position -> variant) slots; the rest rotate.
    auto make = [&](std::size_t q, std::map<std::size_t, std::string> fixed) {
        std::vector<std::string> free;
        std::set<std::string> used;
        for (const auto& [pos, name] : fixed) used.insert(name);
        for (const auto& name : rest) {
            if (!used.contains(name)) free.push_back(name);
        }
        std::rotate(free.begin(), free.begin() + static_cast<std::ptrdiff_t>(q % free.size()), free.end());
        judge::RankingRecord r;
        r.question_id = "q" + std::string(q < 10 ? "00" : q < 100 ? "0" : "") + std::to_string(q);
        auto it = free.begin();
        for (std::size_t pos = 1; pos <= s.variants.size(); ++pos) {
            if (auto f = fixed.find(pos); f != fixed.end()) {
                r.ranking.push_back(f->second);
            } else {
                r.ranking.push_back(*it++);
            }
        }
        r.presentation_order = s.variants;
        s.records.push_back(std::move(r));
    };

    std::size_t q = 0;
    // 26 questions: best first, most_firsts second.
    for (int i = 0; i < 26; ++i, ++q) make(q, {{1, best}, {2, most_firsts}});
    // 27 questions: most_firsts first, best third (fourth twice).
    for (int i = 0; i < 27; ++i, ++q) make(q, {{1, most_firsts}, {i < 25 ? 3u : 4u, best}});
    // 47 questions won by others: best third, most_firsts fourth 25 times and fifth 22 times.
    for (std::size_t i = 0; i < other_winners.size(); ++i, ++q) {
        make(q, {{1, other_winners[i]}, {3, best}, {i < 25 ? 4u : 5u, most_firsts}});
    }
    return s;
}

}  // namespace ragwb::testkit
