#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "ragwb/tfidf.hpp"

using namespace ragwb;
using namespace ragwb::tfidf;

namespace {

double weight_of(const SparseVector& v, std::uint32_t col) {
    for (const auto& e : v) {
        if (e.column == col) return e.weight;
    }
    return 0.0;
}

const std::vector<Document> kTwoDocs{{"d1", "a b"}, {"d2", "b c"}};

}  // namespace

TEST(Tfidf, TwoDocumentHandValues) {
    const auto idx = TfidfIndex::build(kTwoDocs);
    const auto& v = idx.vocabulary();
    ASSERT_EQ(v.terms(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_EQ(v.df(), (std::vector<std::size_t>{1, 2, 1}));
    const double idf_a = std::log(1.5) + 1.0;
    EXPECT_NEAR(v.idf(0), idf_a, 1e-12);
    EXPECT_NEAR(v.idf(1), 1.0, 1e-12);
    EXPECT_NEAR(v.idf(2), idf_a, 1e-12);

    const double norm = std::sqrt(idf_a * idf_a + 1.0);
    EXPECT_NEAR(weight_of(idx.rows()[0], 0), idf_a / norm, 1e-12);
    EXPECT_NEAR(weight_of(idx.rows()[0], 1), 1.0 / norm, 1e-12);
    EXPECT_NEAR(weight_of(idx.rows()[1], 2), idf_a / norm, 1e-12);
}

TEST(Tfidf, MixedQueryMatchesHandComputation) {
    const auto idx = TfidfIndex::build(kTwoDocs);
    // "b b c z": tf(b)=2, tf(c)=1, z unseen.
    const auto q = idx.vectorize("b b c z");
    const double idf_c = std::log(1.5) + 1.0;
    const double norm = std::sqrt(4.0 + idf_c * idf_c);
    ASSERT_EQ(q.size(), 2u);
    EXPECT_NEAR(weight_of(q, 1), 2.0 / norm, 1e-12);
    EXPECT_NEAR(weight_of(q, 2), idf_c / norm, 1e-12);
    EXPECT_NEAR(l2_norm(q), 1.0, 1e-12);
}

TEST(Tfidf, SingleDocumentHasUnitNorm) {
    const std::vector<Document> docs{{"d", "uno dos dos tres"}};
    const auto idx = TfidfIndex::build(docs);
    EXPECT_NEAR(l2_norm(idx.rows()[0]), 1.0, 1e-12);
}

TEST(Tfidf, DuplicateDocumentsGiveIdenticalRows) {
    const std::vector<Document> docs{{"d1", "x y z"}, {"d2", "x y z"}, {"d3", "w"}};
    const auto idx = TfidfIndex::build(docs);
    EXPECT_EQ(idx.rows()[0], idx.rows()[1]);
}

TEST(Tfidf, QueryEqualToDocumentEqualsRow) {
    const std::vector<Document> docs{{"d1", "modelo de lenguaje cuantizado"}, {"d2", "modelo ajuste fino"}};
    const auto idx = TfidfIndex::build(docs);
    const auto q = idx.vectorize(docs[0].text);
    ASSERT_EQ(q.size(), idx.rows()[0].size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_EQ(q[i].column, idx.rows()[0][i].column);
        EXPECT_NEAR(q[i].weight, idx.rows()[0][i].weight, 1e-15);
    }
    const auto scores = idx.cosine_scores(q);
    EXPECT_NEAR(scores[0], 1.0, 1e-9);
}

TEST(Tfidf, UnseenQueryIsZero) {
    const auto idx = TfidfIndex::build(kTwoDocs);
    EXPECT_TRUE(idx.vectorize("zzz qqq").empty());
    EXPECT_TRUE(idx.vectorize("").empty());
    for (const auto s : idx.cosine_scores({})) EXPECT_EQ(s, 0.0);
}

TEST(Tfidf, OrthogonalVocabulariesScoreZero) {
    const std::vector<Document> docs{{"d1", "alfa beta"}, {"d2", "gamma delta"}};
    const auto idx = TfidfIndex::build(docs);
    EXPECT_EQ(idx.cosine_scores(idx.vectorize("alfa"))[1], 0.0);
}

TEST(Tfidf, EmptyDocumentKeepsZeroRow) {
    const std::vector<Document> docs{{"d1", "algo"}, {"d2", " ... "}};
    const auto idx = TfidfIndex::build(docs);
    EXPECT_TRUE(idx.rows()[1].empty());
    EXPECT_EQ(idx.vocabulary().n_docs(), 2u);
}

TEST(Tfidf, BuildErrors) {
    EXPECT_THROW(TfidfIndex::build(std::vector<Document>{}), ValidationError);
    EXPECT_THROW(TfidfIndex::build(std::vector<Document>{{"a", ""}, {"b", "!!"}}), ValidationError);
    EXPECT_THROW(TfidfIndex::build(std::vector<Document>{{"a", "x"}, {"a", "y"}}), ValidationError);
}

TEST(Tfidf, DimensionMismatchIsRejected) {
    const auto idx = TfidfIndex::build(kTwoDocs);
    EXPECT_THROW(idx.cosine_scores({{7, 1.0}}), ValidationError);
}

TEST(Tfidf, VocabularyValidation) {
    EXPECT_THROW(Vocabulary({"b", "a"}, {1, 1}, 2), ValidationError);
    EXPECT_THROW(Vocabulary({"a", "a"}, {1, 1}, 2), ValidationError);
    EXPECT_THROW(Vocabulary({"a"}, {3}, 2), ValidationError);
    EXPECT_THROW(Vocabulary({"a"}, {0}, 2), ValidationError);
    EXPECT_THROW(Vocabulary({"a"}, {1, 1}, 2), ValidationError);
    const Vocabulary v({"a", "é"}, {1, 2}, 2);
    EXPECT_EQ(v.column_of("é"), 1u);
    EXPECT_FALSE(v.column_of("z").has_value());
}

TEST(Tfidf, StopwordsNeverEnterTheVocabulary) {
    const std::vector<Document> docs{{"d1", "el modelo de lenguaje"}, {"d2", "el ajuste"}};
    const auto idx = TfidfIndex::build(docs, Tokenizer({"el", "de"}));
    EXPECT_FALSE(idx.vocabulary().column_of("el").has_value());
    EXPECT_TRUE(idx.vocabulary().column_of("modelo").has_value());
}

TEST(Tfidf, MatchesDenseOracleOnRandomCorpora) {
    testkit::Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = testkit::random_corpus(rng, 60, 300);
        const auto idx = TfidfIndex::build(c.docs);
        const testkit::DenseTfidfOracle oracle(c.tokens);
        ASSERT_EQ(idx.vocabulary().size(), oracle.vocabulary_size());
        for (int q = 0; q < 5; ++q) {
            const auto tokens = testkit::random_tokens(rng, c.pool, 1 + rng() % 8);
            const auto got = idx.cosine_scores(idx.vectorize(testkit::join_tokens(rng, tokens)));
            const auto want = oracle.scores(tokens);
            ASSERT_EQ(got.size(), want.size());
            for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
        }
    }
}

TEST(Tfidf, EachDistinctRowScoresHighestAgainstItself) {
    testkit::Rng rng(8);
    const auto c = testkit::random_corpus(rng, 40, 200);
    const auto idx = TfidfIndex::build(c.docs);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx.rows()[i].empty()) continue;
        const auto scores = idx.cosine_scores(idx.rows()[i]);
        EXPECT_NEAR(scores[i], 1.0, 1e-9);
        for (const auto s : scores) EXPECT_LE(s, scores[i] + 1e-12);
    }
}
