#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "forumnet/error.hpp"
#include "forumnet/forum.hpp"
#include "forumnet/synth.hpp"

using namespace forumnet;
using namespace std::chrono;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

std::vector<PostRecord> synthetic_posts(std::uint64_t seed) {
  RegimeScript s;
  s.start = parse_date("2021-01-01");
  s.unit = CalendarStep::parse("1m");
  s.seed = seed;
  RegimeSegment seg;
  seg.users = 60;
  seg.threads_per_day = 3;
  seg.posts_per_day = 20;
  seg.duration = 3;
  s.segments = {seg};
  return generate_forum(s);
}

}  // namespace

TEST(Sentiment, TokensAndDeleted) {
  EXPECT_EQ(parse_sentiment("pos"), Sentiment::positive);
  EXPECT_EQ(parse_sentiment("negative"), Sentiment::negative);
  EXPECT_EQ(parse_sentiment("deleted"), Sentiment::neutral);
  EXPECT_EQ(parse_sentiment(""), std::nullopt);
  EXPECT_THROW(parse_sentiment("angry"), ValidationError);
}

TEST(Timestamp, FormatsAndRejections) {
  const auto t = parse_timestamp("2020-11-15T08:30:05Z");
  EXPECT_EQ(format_timestamp(t), "2020-11-15T08:30:05Z");
  EXPECT_EQ(parse_timestamp("2020-11-15 08:30:05"), t);
  EXPECT_EQ(parse_timestamp("2020-11-15T08:30:05+00:00"), t);
  EXPECT_EQ(format_timestamp(parse_timestamp("2020-11-15")), "2020-11-15T00:00:00Z");
  EXPECT_THROW(parse_timestamp("2020-11-15T08:30:05+02:00"), ValidationError);
  EXPECT_THROW(parse_timestamp("2020-02-30"), ValidationError);
  EXPECT_THROW(parse_timestamp("15/11/2020"), ValidationError);
}

TEST(ParsePosts, CsvSortedWithQuotedCells) {
  std::stringstream in(
      "thread_id,post_id,user_id,timestamp,is_original,sentiment\n"
      "t1,p2,\"user, b\",2021-01-02T00:00:00Z,false,neg\n"
      "t1,p1,a,2021-01-01T00:00:00Z,true,pos\n"
      "t1,p0,a,2021-01-02T00:00:00Z,false,\n");
  const auto posts = parse_posts(in, PostFormat::csv);
  ASSERT_EQ(posts.size(), 3u);
  EXPECT_EQ(posts[0].post_id, "p1");
  EXPECT_EQ(posts[1].post_id, "p0");
  EXPECT_EQ(posts[2].user_id, "user, b");
  EXPECT_FALSE(posts[1].sentiment.has_value());
  EXPECT_TRUE(posts[0].is_original);
}

TEST(ParsePosts, ErrorsNameTheLine) {
  std::stringstream missing("post_id,thread_id,user_id,timestamp,is_original,sentiment\np1,t1,,2021-01-01,true,pos\n");
  EXPECT_NE(message_of([&] { parse_posts(missing, PostFormat::csv); }).find("line 2"), std::string::npos);
  std::stringstream bad_time(
      "post_id,thread_id,user_id,timestamp,is_original,sentiment\np1,t1,a,2021-01-01,true,pos\np2,t1,a,soon,false,pos\n");
  const auto msg = message_of([&] { parse_posts(bad_time, PostFormat::csv); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  std::stringstream no_column("post_id,thread_id,user_id,timestamp\n");
  EXPECT_THROW(parse_posts(no_column, PostFormat::csv), ValidationError);
  std::stringstream json("{\"post_id\":\"p1\",\"thread_id\":\"t\",\"user_id\":\"u\",\"timestamp\":\"2021-01-01\",\"is_original\":true}\n{oops\n");
  const auto jmsg = message_of([&] { parse_posts(json, PostFormat::jsonl); });
  EXPECT_NE(jmsg.find("line 2"), std::string::npos) << jmsg;
}

TEST(ParsePosts, CsvAndJsonlRoundTrip) {
  const auto posts = synthetic_posts(3);
  for (auto format : {PostFormat::csv, PostFormat::jsonl}) {
    std::stringstream buf;
    write_posts(buf, posts, format);
    EXPECT_EQ(parse_posts(buf, format), posts);
  }
}

TEST(Threads, DerivedFromOriginalPost) {
  std::stringstream in(
      "post_id,thread_id,user_id,timestamp,is_original,sentiment\n"
      "p1,t1,a,2021-01-01,true,neg\np2,t1,b,2021-01-02,false,pos\np3,t1,a,2021-01-03,false,pos\n");
  const auto threads = derive_threads(parse_posts(in, PostFormat::csv));
  const auto& t = threads.at("t1");
  EXPECT_EQ(t.posts, 3u);
  EXPECT_EQ(t.users, 2u);
  EXPECT_EQ(t.sentiment, Sentiment::negative);

  std::stringstream orphan("post_id,thread_id,user_id,timestamp,is_original,sentiment\np1,t1,a,2021-01-01,false,\n");
  EXPECT_THROW(derive_threads(parse_posts(orphan, PostFormat::csv)), ValidationError);
  std::stringstream twice(
      "post_id,thread_id,user_id,timestamp,is_original,sentiment\np1,t1,a,2021-01-01,true,\np2,t1,a,2021-01-01,true,\n");
  EXPECT_THROW(derive_threads(parse_posts(twice, PostFormat::csv)), ValidationError);
}

TEST(CalendarStepTest, ParseAndAdvance) {
  EXPECT_EQ(CalendarStep::parse("4m").to_string(), "4m");
  EXPECT_EQ(CalendarStep::parse("halfmonth").unit, CalendarStep::Unit::half_month);
  EXPECT_THROW(CalendarStep::parse("0m"), ValidationError);
  EXPECT_THROW(CalendarStep::parse("3y"), ValidationError);
  EXPECT_EQ(format_date(CalendarStep::parse("1m").advance(parse_date("2021-01-31"))), "2021-02-28");
  EXPECT_EQ(format_date(CalendarStep::parse("2w").advance(parse_date("2021-12-25"))), "2022-01-08");
}

TEST(Windows, VaccineAnchors) {
  const WindowSpec spec{parse_date("2009-07-01"), parse_date("2019-07-01"), CalendarStep::parse("4m"),
                        CalendarStep::parse("2m")};
  const auto bounds = window_bounds(spec);
  ASSERT_EQ(bounds.size(), 59u);
  EXPECT_EQ(format_date(bounds[0].first), "2009-07-01");
  EXPECT_EQ(format_date(bounds[0].second), "2009-11-01");
  EXPECT_EQ(format_date(bounds.back().second), "2019-07-01");
}

TEST(Windows, CovidHalfMonthStarts) {
  const WindowSpec spec{parse_date("2020-11-01"), parse_date("2021-03-01"), CalendarStep::parse("1m"),
                        CalendarStep::parse("halfmonth")};
  const auto bounds = window_bounds(spec);
  ASSERT_GE(bounds.size(), 4u);
  EXPECT_EQ(format_date(bounds[0].first), "2020-11-01");
  EXPECT_EQ(format_date(bounds[1].first), "2020-11-15");
  EXPECT_EQ(format_date(bounds[1].second), "2020-12-15");
  EXPECT_EQ(format_date(bounds[2].first), "2020-12-01");
  EXPECT_EQ(format_date(bounds[3].first), "2020-12-15");
}

TEST(Windows, JumpLongerThanSpanRejected) {
  const WindowSpec spec{parse_date("2020-01-01"), parse_date("2021-01-01"), CalendarStep::parse("1m"),
                        CalendarStep::parse("2m")};
  EXPECT_THROW(window_bounds(spec), ValidationError);
  const WindowSpec weeks{parse_date("2020-01-01"), parse_date("2021-01-01"), CalendarStep::parse("2w"),
                         CalendarStep::parse("1m")};
  EXPECT_THROW(weeks.validate(), ValidationError);
}

TEST(Windows, HalfOpenBoundaryAndOverlapMultiplicity) {
  std::stringstream in(
      "post_id,thread_id,user_id,timestamp,is_original,sentiment\n"
      "p1,t1,a,2021-02-01T00:00:00Z,true,pos\n"
      "p2,t1,b,2021-01-31T23:59:59Z,false,neg\n");
  const auto posts = parse_posts(in, PostFormat::csv);
  const WindowSpec spec{parse_date("2021-01-01"), parse_date("2021-03-01"), CalendarStep::parse("1m"),
                        CalendarStep::parse("1m")};
  const auto w = make_windows(posts, spec);
  ASSERT_EQ(w.size(), 2u);
  ASSERT_EQ(w[0].posts.size(), 1u);
  EXPECT_EQ(w[0].posts[0].post_id, "p2");
  EXPECT_EQ(w[1].posts[0].post_id, "p1");
  EXPECT_EQ(w[0].threads.at("t1").sentiment, Sentiment::positive);

  const auto many = synthetic_posts(5);
  const WindowSpec overlap{parse_date("2021-01-01"), parse_date("2021-04-01"), CalendarStep::parse("2m"),
                           CalendarStep::parse("1m")};
  std::map<std::string, int> seen;
  for (const auto& slice : make_windows(many, overlap))
    for (const auto& p : slice.posts) ++seen[p.post_id];
  for (const auto& p : many) {
    const bool interior = p.timestamp >= Timestamp{parse_date("2021-02-01")} &&
                          p.timestamp < Timestamp{parse_date("2021-03-01")};
    EXPECT_EQ(seen[p.post_id], interior ? 2 : 1) << p.post_id;
  }
}

TEST(Windows, CountsMatchPerEventTally) {
  const auto posts = synthetic_posts(9);
  const WindowSpec spec{parse_date("2021-01-01"), parse_date("2021-04-01"), CalendarStep::parse("1m"),
                        CalendarStep::parse("halfmonth")};
  for (const auto& w : make_windows(posts, spec)) {
    std::map<std::string, std::size_t> thread_posts;
    std::map<std::string, std::set<std::string>> thread_users;
    std::set<std::string> users;
    std::size_t count = 0;
    for (const auto& p : posts) {
      if (p.timestamp < w.start || p.timestamp >= w.end) continue;
      ++count;
      ++thread_posts[p.thread_id];
      thread_users[p.thread_id].insert(p.user_id);
      users.insert(p.user_id);
    }
    const auto stats = window_stats(w);
    EXPECT_EQ(stats.posts, count);
    EXPECT_EQ(stats.threads, thread_posts.size());
    EXPECT_EQ(stats.users, users.size());
    for (const auto& [id, t] : w.threads) {
      EXPECT_EQ(t.posts, thread_posts[id]);
      EXPECT_EQ(t.users, thread_users[id].size());
    }
  }
}
