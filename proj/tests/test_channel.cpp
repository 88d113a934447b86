#include <gtest/gtest.h>

#include "l2ai/channel.hpp"
#include "l2ai/error.hpp"

namespace l2ai {
namespace {

struct Inbox {
  std::vector<Envelope> got;
  Channel::Handler handler() {
    return [this](const Envelope& e) { got.push_back(e); };
  }
};

class ChannelTest : public ::testing::Test {
 protected:
  ChannelTest() : clock(make_clock()), channel(clock) {
    channel.attach("a", a.handler());
    channel.attach("b", b.handler());
  }

  ClockHandle clock;
  Channel channel;
  Inbox a, b;
};

TEST_F(ChannelTest, EmptyQueueLeavesClockAlone) {
  clock->advance(7);
  EXPECT_TRUE(channel.step().empty());
  EXPECT_EQ(clock->now(), ms(7));
}

TEST_F(ChannelTest, DeliversIntactAfterBaseDelay) {
  const Bytes payload = {1, 2, 3};
  const auto seq = channel.send("a", "b", "x", payload);
  EXPECT_EQ(seq, 1u);
  channel.step();
  ASSERT_EQ(b.got.size(), 1u);
  EXPECT_EQ(b.got[0].payload, payload);
  EXPECT_EQ(b.got[0].deliver_time, ms(50));
  EXPECT_EQ(clock->now(), ms(50));
  EXPECT_TRUE(channel.knowledge().empty());
}

TEST_F(ChannelTest, EqualTimesProcessInSeqOrder) {
  channel.send("a", "b", "first", {});
  channel.send("a", "b", "second", {});
  channel.send("b", "a", "third", {});
  channel.step();
  ASSERT_EQ(b.got.size(), 2u);
  EXPECT_EQ(b.got[0].kind, "first");
  EXPECT_EQ(b.got[1].kind, "second");
  const auto& ev = channel.log().events();
  std::vector<std::uint64_t> delivered;
  for (const auto& e : ev)
    if (e.type == EventType::Deliver) delivered.push_back(e.seq);
  EXPECT_EQ(delivered, (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST_F(ChannelTest, DropCancelsDelivery) {
  channel.add_action({Match{std::string("a"), std::nullopt, std::nullopt}, Drop{}});
  channel.send("a", "b", "x", {9});
  channel.send("b", "a", "y", {8});
  channel.step();
  EXPECT_TRUE(b.got.empty());
  EXPECT_EQ(a.got.size(), 1u);
}

TEST_F(ChannelTest, DelayAddsExtraTime) {
  channel.add_action({Match{std::nullopt, std::nullopt, 1}, Delay{300}});
  channel.send("a", "b", "x", {});
  channel.send("a", "b", "y", {});
  channel.step();
  ASSERT_EQ(b.got.size(), 2u);
  EXPECT_EQ(b.got[0].kind, "y");
  EXPECT_EQ(b.got[1].deliver_time, ms(350));
}

TEST_F(ChannelTest, ModifyFlipsExactlyTheMaskedBits) {
  Bytes msg(68, 0);
  channel.add_action({Match{std::nullopt, std::nullopt, 1}, Modify{8, 0x01}});
  channel.send("a", "b", "msg1", msg);
  channel.step();
  ASSERT_EQ(b.got.size(), 1u);
  Bytes expected = msg;
  expected[8] = 0x01;
  EXPECT_EQ(b.got[0].payload, expected);
  // Offsets past the end are a no-op.
  channel.add_action({Match{std::nullopt, std::nullopt, 2}, Modify{500, 0xFF}});
  channel.send("a", "b", "msg1", msg);
  channel.step();
  EXPECT_EQ(b.got[1].payload, msg);
}

TEST_F(ChannelTest, KnowledgeHoldsExactlyTheEavesdroppedPayloads) {
  channel.add_action({Match{std::nullopt, std::string("b"), std::nullopt}, Eavesdrop{}});
  channel.send("a", "b", "x", {1});
  channel.send("b", "a", "y", {2});
  channel.send("a", "b", "z", {3});
  channel.step();
  ASSERT_EQ(channel.knowledge().size(), 2u);
  EXPECT_EQ(channel.knowledge().at(1).payload, Bytes{1});
  EXPECT_EQ(channel.knowledge().at(3).payload, Bytes{3});
}

TEST_F(ChannelTest, SetupChannelIsOutOfReach) {
  channel.add_action({Match{}, Eavesdrop{}});
  channel.add_action({Match{}, Drop{}});
  channel.send("a", "b", "reg", {1}, {}, true);
  channel.step();
  EXPECT_EQ(b.got.size(), 1u);
  EXPECT_TRUE(channel.knowledge().empty());
}

TEST_F(ChannelTest, ReplayDeliversByteIdenticalCopy) {
  channel.add_action({Match{}, Eavesdrop{}});
  channel.send("a", "b", "x", {4, 5, 6});
  channel.step();
  channel.replay(1, ms(1000));
  channel.step();
  ASSERT_EQ(b.got.size(), 2u);
  EXPECT_EQ(b.got[1].payload, b.got[0].payload);
  EXPECT_TRUE(b.got[1].replayed);
  EXPECT_EQ(b.got[1].deliver_time, ms(1000));
  EXPECT_EQ(clock->now(), ms(1000));
}

TEST_F(ChannelTest, ReplayOfUnseenSeqIsUnknownSeq) {
  channel.send("a", "b", "x", {1});
  try {
    channel.replay(1, ms(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSeq);
  }
  EXPECT_THROW(channel.replay(99, ms(10)), Error);
}

TEST_F(ChannelTest, ArmedReplayFiresWhenSeqIsSeen) {
  channel.add_action({Match{}, Replay{2, ms(100), true}});
  channel.add_action({Match{}, Eavesdrop{}});
  EXPECT_EQ(channel.pending_replays(), 1u);
  channel.send("a", "b", "x", {1});
  clock->advance(10);
  channel.send("a", "b", "y", {2});
  EXPECT_EQ(channel.pending_replays(), 0u);
  channel.step();
  ASSERT_EQ(b.got.size(), 3u);
  EXPECT_EQ(b.got[2].kind, "y");
  EXPECT_EQ(b.got[2].deliver_time, ms(110));
}

TEST_F(ChannelTest, ReplayInThePastIsDeliveredNow) {
  channel.add_action({Match{}, Eavesdrop{}});
  channel.send("a", "b", "x", {1});
  channel.step();
  clock->advance(500);
  channel.replay(1, ms(5));
  channel.step();
  EXPECT_EQ(b.got.back().deliver_time, ms(550));
}

TEST_F(ChannelTest, HandlersMaySendDuringDelivery) {
  Channel::Handler echo = [this](const Envelope& e) {
    if (e.kind == "ping") channel.send("b", e.from, "pong", e.payload);
  };
  channel.attach("b", echo);
  channel.send("a", "b", "ping", {7});
  channel.step();
  ASSERT_EQ(a.got.size(), 1u);
  EXPECT_EQ(a.got[0].kind, "pong");
  EXPECT_EQ(a.got[0].deliver_time, ms(100));
}

TEST_F(ChannelTest, CausalityAndDeterminism) {
  auto run = [] {
    auto clk = make_clock();
    Channel ch(clk, ms(30));
    Inbox sink;
    ch.attach("s", sink.handler());
    ch.add_action({Match{}, Eavesdrop{}});
    ch.add_action({Match{std::nullopt, std::nullopt, 3}, Delay{77}});
    ch.add_action({Match{std::nullopt, std::nullopt, 4}, Modify{0, 0xAA}});
    for (int i = 0; i < 6; ++i) {
      ch.send("x", "s", "k", Bytes{static_cast<std::uint8_t>(i)});
      clk->advance(5);
    }
    ch.replay(2, ms(400));
    ch.step();
    for (const auto& e : sink.got) EXPECT_GE(e.deliver_time, e.send_time);
    return ch.log().lines();
  };
  const auto first = run();
  EXPECT_EQ(first, run());
  std::uint64_t last = 0;
  for (const auto& line : first) {
    const auto t = std::stoull(line.substr(0, line.find(' ')));
    if (line.find(" deliver ") != std::string::npos) {
      EXPECT_GE(t, last);
      last = t;
    }
  }
}

TEST(EventLog, LineFormat) {
  Event e{ms(12), EventType::Reject, 3, "hms", "authenticate", "Stale"};
  EXPECT_EQ(e.to_line(), "12 reject 3 hms authenticate Stale");
  Event blank{ms(0), EventType::Note, 0, "", "", ""};
  EXPECT_EQ(blank.to_line(), "0 note 0 - -");
}

}  // namespace
}  // namespace l2ai
