#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "ragwb/io.hpp"
#include "ragwb/qa_dataset.hpp"
#include "ragwb/utf8.hpp"
#include "scripted_endpoint.hpp"

using namespace ragwb;
using namespace ragwb::qa;

namespace {

corpus::ThesisRecord doc(std::string text, std::string uri = "u") {
    corpus::ThesisRecord r;
    r.uri = std::move(uri);
    r.raw_content = std::move(text);
    return r;
}

std::string rejoin(const std::vector<Fragment>& fs) {
    std::string s;
    for (const auto& f : fs) s += f.text;
    return s;
}

std::vector<QaPair> numbered_pairs(std::size_t n) {
    std::vector<QaPair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        pairs.push_back({"q" + std::to_string(i), "a" + std::to_string(i), "f"});
    }
    return pairs;
}

}  // namespace

TEST(Fragment, ShortTextIsOneFragment) {
    const std::string text(100, 'x');
    const auto fs = fragment_document(doc(text), 1500);
    ASSERT_EQ(fs.size(), 1u);
    EXPECT_EQ(fs[0].text, text);
    EXPECT_EQ(fs[0].ordinal, 0u);
    EXPECT_EQ(fs[0].source_uri, "u");
}

TEST(Fragment, TwoParagraphsSplitAtTheBlankLine) {
    const std::string p1 = std::string(898, 'a') + ".";
    const std::string p2 = std::string(899, 'b') + ".";
    const auto fs = fragment_document(doc(p1 + "\n\n" + p2), 1500);
    ASSERT_EQ(fs.size(), 2u);
    EXPECT_EQ(fs[0].text, p1 + "\n\n");
    EXPECT_EQ(fs[1].text, p2);
}

TEST(Fragment, ParagraphBeatsALaterSentenceEnd) {
    const std::string text = std::string(300, 'a') + "\n \t\n" + std::string(500, 'b') + ". " + std::string(600, 'c');
    const auto fs = fragment_document(doc(text), 1000);
    ASSERT_GE(fs.size(), 2u);
    EXPECT_EQ(fs[0].text, std::string(300, 'a') + "\n \t\n");
    EXPECT_EQ(rejoin(fs), text);
}

TEST(Fragment, SentenceFallback) {
    const std::string s1 = std::string(700, 'a') + "? ";
    const std::string text = s1 + std::string(700, 'b');
    const auto fs = fragment_document(doc(text), 1000);
    ASSERT_EQ(fs.size(), 2u);
    EXPECT_EQ(fs[0].text, s1);
}

TEST(Fragment, LongSentenceHardCuts) {
    const std::string text(4000, 'z');
    const auto fs = fragment_document(doc(text), 1500);
    ASSERT_EQ(fs.size(), 3u);
    EXPECT_EQ(fs[0].text.size(), 1500u);
    EXPECT_EQ(fs[1].text.size(), 1500u);
    EXPECT_EQ(fs[2].text.size(), 1000u);
    EXPECT_EQ(rejoin(fs), text);
}

TEST(Fragment, LimitCountsCodePointsNotBytes) {
    std::string text;
    for (int i = 0; i < 450; ++i) text += "ñ";
    const auto fs = fragment_document(doc(text), 200);
    ASSERT_EQ(fs.size(), 3u);
    for (const auto& f : fs) EXPECT_LE(utf8::length(f.text), 200u);
    EXPECT_EQ(rejoin(fs), text);
}

TEST(Fragment, EmptyTextAndLowLimit) {
    EXPECT_TRUE(fragment_document(doc(""), 1500).empty());
    EXPECT_THROW(fragment_document(doc("abc"), 199), ValidationError);
}

TEST(Fragment, RandomDocumentsRejoinExactly) {
    testkit::Rng rng(11);
    for (int i = 0; i < 30; ++i) {
        const auto text = testkit::random_prose(rng, 200 + static_cast<std::size_t>(rng() % 5000));
        for (const std::size_t limit : {200u, 800u, 1500u}) {
            const auto fs = fragment_document(doc(text), limit);
            EXPECT_EQ(rejoin(fs), text);
            for (std::size_t k = 0; k < fs.size(); ++k) {
                EXPECT_EQ(fs[k].ordinal, k);
                EXPECT_GT(utf8::length(fs[k].text), 0u);
                EXPECT_LE(utf8::length(fs[k].text), limit);
            }
        }
    }
}

TEST(GeneratorOutput, OneWellFormedPair) {
    const auto parsed = parse_generator_output("Q: ¿Qué es LoRA?\tA: Un método de ajuste fino.", "frag");
    ASSERT_EQ(parsed.pairs.size(), 1u);
    EXPECT_EQ(parsed.pairs[0], (QaPair{"¿Qué es LoRA?", "Un método de ajuste fino.", "frag"}));
    EXPECT_EQ(parsed.skipped, 0u);
}

TEST(GeneratorOutput, MalformedLinesAreCounted) {
    const auto parsed = parse_generator_output(
        "Q: one?\tA: 1\n\nQ: two?\tA: 2\nthis line is chatter\nQ: three?\tA: 3\n", "frag");
    EXPECT_EQ(parsed.pairs.size(), 3u);
    EXPECT_EQ(parsed.skipped, 1u);
}

TEST(GeneratorOutput, EmptyHalvesAreSkipped) {
    const auto parsed = parse_generator_output("Q: \tA: x\nQ: y\tA:   \nQ: no tab A: z\n", "f");
    EXPECT_TRUE(parsed.pairs.empty());
    EXPECT_EQ(parsed.skipped, 3u);
}

TEST(GenerateQa, MockHappyPathAttachesTheFragment) {
    testkit::ScriptedEndpoint gen("gen", testkit::constant_reply("Q: q?\tA: a."));
    const Fragment f{"u", 0, "El fragmento."};
    const auto parsed = generate_qa(f, gen);
    ASSERT_EQ(parsed.pairs.size(), 1u);
    EXPECT_EQ(parsed.pairs[0].fragment, "El fragmento.");
    ASSERT_EQ(gen.prompts().size(), 1u);
    EXPECT_NE(gen.prompts()[0].find("El fragmento."), std::string::npos);
}

TEST(GenerateQa, TemplateNeedsPlaceholder) {
    testkit::ScriptedEndpoint gen("gen", testkit::constant_reply(""));
    EXPECT_THROW(generate_qa({"u", 0, "x"}, gen, "no placeholder"), ValidationError);
    EXPECT_EQ(gen.calls(), 0);
}

TEST(GenerateQa, FragmentTextIsNotReinterpreted) {
    testkit::ScriptedEndpoint gen("gen", testkit::constant_reply("Q: a\tA: b"));
    generate_qa({"u", 0, "literal {fragment} inside"}, gen, "<<{fragment}>>");
    EXPECT_EQ(gen.prompts()[0], "<<literal {fragment} inside>>");
}

TEST(GenerateAll, OutputOrderIgnoresCompletionOrder) {
    std::vector<Fragment> fragments;
    for (int d = 2; d >= 0; --d) {
        for (int k = 0; k < 3; ++k) fragments.push_back({"doc" + std::to_string(d), std::size_t(k), "t"});
    }
    testkit::ScriptedEndpoint gen("gen", [](const llm::ChatRequest& r, int call) {
        // Later calls finish first.
        std::this_thread::sleep_for(std::chrono::milliseconds(call % 3));
        const auto& p = r.messages.back().content;
        return "Q: " + p.substr(p.size() - 1) + "\tA: x";
    });
    for (auto& f : fragments) f.text = f.source_uri + std::to_string(f.ordinal);
    const auto report = generate_all(fragments, gen, "{fragment}", 4);
    ASSERT_EQ(report.pairs.size(), 9u);
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        EXPECT_EQ(report.pairs[i].fragment, "doc" + std::to_string(i / 3) + std::to_string(i % 3));
    }
}

TEST(GenerateAll, FailedFragmentsAreCountedNotDropped) {
    std::vector<Fragment> fragments{{"a", 0, "ok"}, {"a", 1, "fail"}, {"b", 0, "ok"}};
    testkit::ScriptedEndpoint gen("gen", [](const llm::ChatRequest& r, int) -> std::string {
        if (r.messages.back().content == "fail") {
            throw llm::EndpointError(llm::EndpointErrorKind::HttpStatus, "gen", "boom", 500);
        }
        return "Q: q\tA: a\ngarbage";
    });
    const auto report = generate_all(fragments, gen, "{fragment}", 2);
    EXPECT_EQ(report.pairs.size(), 2u);
    EXPECT_EQ(report.failed_fragments, 1u);
    EXPECT_EQ(report.skipped_lines, 2u);
}

TEST(Split, FourPairs) {
    const auto s = split_dataset(numbered_pairs(4), 0.75, 42);
    EXPECT_EQ(s.train.size(), 3u);
    EXPECT_EQ(s.test.size(), 1u);
    for (const auto& p : s.test) EXPECT_EQ(std::count(s.train.begin(), s.train.end(), p), 0);
}

TEST(Split, HundredPairs) {
    const auto s = split_dataset(numbered_pairs(100), 0.75, 42);
    EXPECT_EQ(s.train.size(), 75u);
    EXPECT_EQ(s.test.size(), 25u);
}

TEST(Split, DisjointUnionComplete) {
    const auto pairs = numbered_pairs(37);
    for (const double ratio : {0.1, 0.5, 0.75, 0.9}) {
        const auto s = split_dataset(pairs, ratio, 9);
        std::multiset<QaPair> all(s.train.begin(), s.train.end());
        all.insert(s.test.begin(), s.test.end());
        EXPECT_EQ(all, std::multiset<QaPair>(pairs.begin(), pairs.end()));
    }
}

TEST(Split, SameSeedSameFiles) {
    const auto pairs = numbered_pairs(50);
    const auto d1 = testkit::scratch_dir("split-a");
    const auto d2 = testkit::scratch_dir("split-b");
    save_split(split_dataset(pairs, 0.75, 42), d1);
    save_split(split_dataset(pairs, 0.75, 42), d2);
    for (const auto* f : {"train.json", "test.json", "split.json"}) {
        EXPECT_EQ(io::read_file(d1 / f), io::read_file(d2 / f)) << f;
    }
    EXPECT_NE(split_dataset(pairs, 0.75, 42).train, split_dataset(pairs, 0.75, 43).train);
}

TEST(Split, EmptyInputAndBadRatio) {
    const auto s = split_dataset({}, 0.75, 1);
    EXPECT_TRUE(s.train.empty());
    EXPECT_TRUE(s.test.empty());
    EXPECT_THROW(split_dataset(numbered_pairs(3), 0.0, 1), ValidationError);
    EXPECT_THROW(split_dataset(numbered_pairs(3), 1.0, 1), ValidationError);
}

TEST(QaStats, Examples) {
    const auto one = qa_stats({{"ab", "abcd", "f"}});
    EXPECT_EQ(one.prompt_chars, 2u);
    EXPECT_EQ(one.completion_chars, 4u);
    const auto sym = qa_stats({{"a", "abc", "f"}, {"abc", "a", "f"}});
    EXPECT_EQ(sym.prompt_chars, 2u);
    EXPECT_EQ(sym.completion_chars, 2u);
    // 1.5 rounds up; lengths are code points.
    const auto half = qa_stats({{"ñ", "x", "f"}, {"ññ", "xx", "f"}});
    EXPECT_EQ(half.prompt_chars, 2u);
    EXPECT_THROW(qa_stats({}), ValidationError);
}

TEST(QaJson, PairsRoundTripWithPromptCompletionFields) {
    const std::vector<QaPair> pairs{{"¿Qué?", "Esto.", "frag\n\"x\""}};
    const auto text = pairs_to_json(pairs);
    EXPECT_NE(text.find("\"prompt\""), std::string::npos);
    EXPECT_NE(text.find("\"completion\""), std::string::npos);
    EXPECT_NE(text.find("\"fragment\""), std::string::npos);
    EXPECT_EQ(pairs_from_json(text), pairs);
    EXPECT_THROW(pairs_from_json("[{\"prompt\": \"a\"}]"), Error);
}

TEST(QaJson, FragmentsRoundTrip) {
    const std::vector<Fragment> fs{{"u1", 0, "a"}, {"u1", 1, "b"}};
    EXPECT_EQ(fragments_from_json(fragments_to_json(fs)), fs);
}
