#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "ragwb/io.hpp"
#include "ragwb/report.hpp"

using namespace ragwb;
using namespace ragwb::report;

namespace {

judge::Leaderboard symmetric() {
    std::vector<judge::RankingRecord> records(2);
    records[0].question_id = "1";
    records[0].ranking = {"x", "y"};
    records[1].question_id = "2";
    records[1].ranking = {"y", "x"};
    const std::vector<std::string> vs{"x", "y"};
    return judge::aggregate(records, vs);
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Report, TableShowsEveryVariantWithTwoDecimals) {
    const auto t = lines(leaderboard_to_table(symmetric()));
    ASSERT_EQ(t.size(), 4u);
    EXPECT_NE(t[2].find("x"), std::string::npos);
    EXPECT_NE(t[2].find("1.50"), std::string::npos);
    EXPECT_NE(t[3].find("y"), std::string::npos);
    EXPECT_NE(t[3].find("1.50"), std::string::npos);
}

TEST(Report, Csv) {
    EXPECT_EQ(leaderboard_to_csv(symmetric()), "variant,avg_position,first_places,questions\nx,1.5,1,2\ny,1.5,1,2\n");
}

TEST(Report, JsonRoundTrip) {
    const auto s = testkit::published_leaderboard_scenario();
    const auto lb = judge::aggregate(s.records, s.variants);
    EXPECT_EQ(leaderboard_from_json(leaderboard_to_json(lb)), lb);
    EXPECT_EQ(render(lb, Format::Json), leaderboard_to_json(lb));
}

TEST(Report, SeriesFollowLeaderboardOrder) {
    EXPECT_EQ(average_position_series(symmetric()), "variant,avg_position\nx,1.5\ny,1.5\n");
    EXPECT_EQ(first_place_series(symmetric()), "variant,first_places\nx,1\ny,1\n");
}

TEST(Report, RecordsRoundTripWithoutLatencies) {
    testkit::Rng rng(3);
    auto set = testkit::random_record_set(rng, 4, 20);
    for (auto& r : set.records) {
        r.judge_raw = "RANKING: \"A\"\n¿ñ?";
        r.answer_latency_ms["x"] = 12.5;
    }
    const auto text = records_to_json(set.records);
    EXPECT_EQ(text.find("latency"), std::string::npos);
    const auto back = records_from_json(text);
    ASSERT_EQ(back.size(), set.records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].question_id, set.records[i].question_id);
        EXPECT_EQ(back[i].ranking, set.records[i].ranking);
        EXPECT_EQ(back[i].presentation_order, set.records[i].presentation_order);
        EXPECT_EQ(back[i].judge_raw, set.records[i].judge_raw);
    }
    EXPECT_NE(timings_to_json(set.records).find("12.5"), std::string::npos);
}

TEST(Report, RunMetadataRoundTrip) {
    RunMetadata m;
    m.seed = 0xfedcba9876543210ULL;
    m.judge = "gpt-4o";
    m.variants = {"a", "b"};
    m.questions_total = 5;
    m.excluded = {{"q3", "judge: no ranking"}};
    m.retrieval = {0.25, 7, 300};
    const auto back = run_metadata_from_json(run_metadata_to_json(m));
    EXPECT_EQ(back.seed, m.seed);
    EXPECT_EQ(back.judge, m.judge);
    EXPECT_EQ(back.variants, m.variants);
    EXPECT_EQ(back.questions_total, 5u);
    ASSERT_EQ(back.excluded.size(), 1u);
    EXPECT_EQ(back.excluded[0].reason, "judge: no ranking");
    EXPECT_EQ(back.retrieval.threshold, 0.25);
    EXPECT_EQ(back.retrieval.limit, 7u);
    EXPECT_EQ(back.retrieval.excerpt_chars, 300u);
}

TEST(Report, Formats) {
    EXPECT_EQ(format_from_string("json"), Format::Json);
    EXPECT_EQ(format_from_string("csv"), Format::Csv);
    EXPECT_EQ(format_from_string("table"), Format::Table);
    EXPECT_EQ(extension(Format::Table), "txt");
    try {
        format_from_string("xml");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Usage);
    }
}

TEST(Report, MalformedInputs) {
    EXPECT_THROW(records_from_json("{"), ParseError);
    EXPECT_THROW(records_from_json("{}"), ParseError);
    EXPECT_THROW(records_from_json("[{\"question_id\": 1}]"), ValidationError);
    EXPECT_THROW(leaderboard_from_json("{\"rows\": []}"), ValidationError);
}

TEST(Report, EmitWritesEveryFile) {
    const auto dir = testkit::scratch_dir("emit");
    const std::vector<judge::RankingRecord> records{{"1", {"x", "y"}, {"x", "y"}, "RANKING: A,B", {}},
                                                    {"2", {"x", "y"}, {"y", "x"}, "RANKING: B,A", {}}};
    const auto paths = emit_report(symmetric(), records, Format::Csv, dir);
    for (const char* f : {"leaderboard.csv", kAverageSeriesFile, kFirstPlaceSeriesFile, kRecordsFile}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    EXPECT_EQ(paths.size(), 4u);
    EXPECT_EQ(io::read_file(dir / "leaderboard.csv"), leaderboard_to_csv(symmetric()));
    EXPECT_EQ(records_from_json(io::read_file(dir / kRecordsFile)).size(), 2u);
}
