#include <gtest/gtest.h>

#include <sstream>

#include "ragwb/error.hpp"
#include "ragwb/ledger.hpp"

using namespace ragwb;
using ledger::Ledger;
using ledger::Outcome;
using ledger::Status;

TEST(Ledger, PendingToProcessed) {
    Ledger l;
    ASSERT_TRUE(l.enqueue("u1"));
    l.advance("u1", Outcome::Processed);
    EXPECT_EQ(l.entry("u1").status, Status::Processed);
    EXPECT_EQ(l.entry("u1").attempts, 1u);
}

TEST(Ledger, FailRetryProcess) {
    Ledger l;
    l.enqueue("u1");
    l.advance("u1", Outcome::Failed, "timeout");
    EXPECT_EQ(l.entry("u1").status, Status::Failed);
    EXPECT_EQ(l.entry("u1").last_error, "timeout");
    l.retry("u1");
    EXPECT_EQ(l.entry("u1").status, Status::Pending);
    l.advance("u1", Outcome::Processed);
    EXPECT_EQ(l.entry("u1").attempts, 2u);
    EXPECT_EQ(l.entry("u1").status, Status::Processed);
}

TEST(Ledger, ProcessingEveryEntryLeavesNothingPending) {
    Ledger l;
    for (const auto* u : {"a", "b", "c"}) l.enqueue(u);
    l.advance("a", Outcome::Processed);
    l.advance("b", Outcome::Failed, "x");
    l.advance("c", Outcome::Processed);
    EXPECT_EQ(l.retry_all_failed(), 1u);
    for (const auto& u : l.uris_with(Status::Pending)) l.advance(u, Outcome::Processed);
    const auto c = l.counts();
    EXPECT_EQ(c.pending, 0u);
    EXPECT_EQ(c.processed, 3u);
    EXPECT_EQ(c.total(), 3u);
}

TEST(Ledger, IllegalTransitionsAreRejected) {
    Ledger l;
    l.enqueue("u");
    l.advance("u", Outcome::Processed);
    EXPECT_THROW(l.advance("u", Outcome::Failed), ValidationError);
    EXPECT_THROW(l.advance("u", Outcome::Processed), ValidationError);
    EXPECT_THROW(l.retry("u"), ValidationError);
    EXPECT_THROW(l.advance("missing", Outcome::Processed), ValidationError);
    l.enqueue("v");
    EXPECT_THROW(l.retry("v"), ValidationError);
}

TEST(Ledger, EnqueueIsIdempotent) {
    Ledger l;
    EXPECT_TRUE(l.enqueue("u"));
    l.advance("u", Outcome::Processed);
    EXPECT_FALSE(l.enqueue("u"));
    EXPECT_EQ(l.entry("u").status, Status::Processed);
}

TEST(Ledger, AttemptsNeverDecrease) {
    Ledger l;
    l.enqueue("u");
    std::size_t last = 0;
    for (int i = 0; i < 5; ++i) {
        l.advance("u", Outcome::Failed);
        EXPECT_GE(l.entry("u").attempts, last);
        last = l.entry("u").attempts;
        l.retry("u");
        EXPECT_EQ(l.entry("u").attempts, last);
    }
    EXPECT_EQ(last, 5u);
}

TEST(Ledger, TsvRoundTrip) {
    Ledger l;
    l.enqueue("https://x/1");
    l.enqueue("https://x/2");
    l.enqueue("https://x/3");
    l.advance("https://x/1", Outcome::Processed);
    l.advance("https://x/2", Outcome::Failed, "boom");
    std::stringstream ss;
    l.write(ss);
    EXPECT_EQ(ss.str(), "https://x/1\tprocessed\t1\nhttps://x/2\tfailed\t1\nhttps://x/3\tpending\t0\n");
    const auto back = Ledger::read(ss);
    EXPECT_EQ(back.size(), 3u);
    EXPECT_EQ(back.entry("https://x/2").status, Status::Failed);
    EXPECT_EQ(back.entry("https://x/1").attempts, 1u);
}

TEST(Ledger, ReadRejectsMalformedLines) {
    std::stringstream bad_status("u\tdone\t1\n");
    EXPECT_THROW(Ledger::read(bad_status), Error);
    std::stringstream bad_count("u\tpending\tmany\n");
    EXPECT_THROW(Ledger::read(bad_count), Error);
    std::stringstream missing("u\tpending\n");
    EXPECT_THROW(Ledger::read(missing), Error);
}
