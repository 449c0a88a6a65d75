#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ragwb/judge.hpp"
#include "ragwb/npy.hpp"
#include "ragwb/rag.hpp"
#include "ragwb/tfidf.hpp"
#include "ragwb/tokenizer.hpp"

using namespace ragwb;

namespace {

std::vector<std::string> word_pool(std::mt19937_64& rng, std::size_t n) {
    static const char* syllables[] = {"ca", "de", "ni", "lo", "tu", "mé", "ra", "sión", "ga", "pe", "ño", "vi", "xa", "zu"};
    std::vector<std::string> pool;
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        const auto k = 2 + rng() % 3;
        for (std::size_t s = 0; s < k; ++s) w += syllables[rng() % std::size(syllables)];
        pool.push_back(w + std::to_string(i % 97));
    }
    return pool;
}

std::string sentence(std::mt19937_64& rng, const std::vector<std::string>& pool, std::size_t words) {
    std::string s;
    for (std::size_t i = 0; i < words; ++i) {
        if (i) s += (rng() % 9 == 0) ? ", " : " ";
        s += pool[rng() % pool.size()];
    }
    return s + ".";
}

struct Fixture {
    std::vector<std::string> pool;
    rag::KnowledgeBase kb = rag::KnowledgeBase::empty();
    std::vector<std::string> queries;
};

const Fixture& two_thousand_docs() {
    static const Fixture f = [] {
        std::mt19937_64 rng(1);
        Fixture out;
        out.pool = word_pool(rng, 20000);
        std::vector<tfidf::Document> docs;
        std::vector<std::string> texts;
        for (int i = 0; i < 2000; ++i) {
            docs.push_back({"doc" + std::to_string(i), sentence(rng, out.pool, 400 + rng() % 800)});
            texts.push_back(docs.back().text);
        }
        out.kb = rag::KnowledgeBase(tfidf::TfidfIndex::build(docs), std::move(texts));
        for (int q = 0; q < 64; ++q) out.queries.push_back(sentence(rng, out.pool, 4 + rng() % 10));
        return out;
    }();
    return f;
}

void BM_CosineScan2000(benchmark::State& state) {
    const auto& f = two_thousand_docs();
    std::size_t q = 0;
    for (auto _ : state) {
        const auto v = f.kb.index.vectorize(f.queries[q++ % f.queries.size()]);
        benchmark::DoNotOptimize(f.kb.index.cosine_scores(v));
    }
}
BENCHMARK(BM_CosineScan2000);

void BM_RetrieveAugment2000(benchmark::State& state) {
    const auto& f = two_thousand_docs();
    std::size_t q = 0;
    for (auto _ : state) {
        const auto& query = f.queries[q++ % f.queries.size()];
        const auto r = rag::retrieve(f.kb, query, {0.05, 3, 1200});
        benchmark::DoNotOptimize(rag::augment_prompt(query, r));
    }
}
BENCHMARK(BM_RetrieveAugment2000)->Unit(benchmark::kMicrosecond);

void BM_Tokenize(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const auto pool = word_pool(rng, 5000);
    const auto text = sentence(rng, pool, static_cast<std::size_t>(state.range(0)));
    const Tokenizer tok;
    for (auto _ : state) benchmark::DoNotOptimize(tok.tokenize(text));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Tokenize)->Arg(100)->Arg(10000);

void BM_NpyRoundTrip(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    npy::Matrix m(n, n);
    std::iota(m.data.begin(), m.data.end(), 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(npy::decode(npy::encode(m)));
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * static_cast<std::int64_t>(n * n * 8));
}
BENCHMARK(BM_NpyRoundTrip)->Arg(16)->Arg(512);

void BM_Aggregate(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::vector<std::string> variants;
    for (int i = 0; i < 10; ++i) variants.push_back("v" + std::to_string(i));
    std::vector<judge::RankingRecord> records(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].question_id = std::to_string(i);
        records[i].ranking = variants;
        std::shuffle(records[i].ranking.begin(), records[i].ranking.end(), rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(judge::aggregate(records, variants));
}
BENCHMARK(BM_Aggregate)->Arg(100)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
