#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "bellcert/report.hpp"

using namespace bellcert;

TEST(CheckRecord, ObserveAndMerge) {
  CheckRecord a;
  a.name = "x";
  a.observe(0.5, false, Json{{"i", 0}});
  a.observe(-0.1, true, Json{{"i", 1}});
  a.skip();
  EXPECT_EQ(a.count, 3);
  EXPECT_EQ(a.failures, 1);
  EXPECT_EQ(a.skipped, 1);
  EXPECT_DOUBLE_EQ(*a.worst_margin, -0.1);
  EXPECT_EQ(a.argmax_location["i"], 1);
  EXPECT_FALSE(a.ok());

  CheckRecord b;
  b.name = "x";
  b.observe(-0.3, true, Json{{"i", 2}});
  a.merge(b);
  EXPECT_EQ(a.count, 4);
  EXPECT_EQ(a.failures, 2);
  EXPECT_DOUBLE_EQ(*a.worst_margin, -0.3);
  EXPECT_LE(a.failures + a.skipped, a.count);

  a.informational = true;
  EXPECT_TRUE(a.ok());
}

TEST(Report, JsonRoundTrip) {
  VerificationReport r;
  r.config_echo = Json{{"subcommand", "a2"}};
  CheckRecord c;
  c.name = "q2_at_least_one";
  c.observe(1.5, false, Json{{"x", 0.0}});
  r.checks.push_back(c);
  CheckRecord empty;
  empty.name = "empty";
  r.checks.push_back(empty);
  r.results = Json{{"value", 2.5}};
  r.timestamp = utc_timestamp();

  const Json j = r;
  const VerificationReport back = j.get<VerificationReport>();
  EXPECT_EQ(Json(back), j);
  EXPECT_EQ(back.tool_version, BELLCERT_VERSION);
  ASSERT_NE(back.find("empty"), nullptr);
  EXPECT_FALSE(back.find("empty")->worst_margin.has_value());
  EXPECT_EQ(back.find("missing"), nullptr);
  EXPECT_TRUE(back.passed());
}

TEST(Report, TimestampShape) {
  const std::string ts = utc_timestamp();
  ASSERT_EQ(ts.size(), 20u);
  EXPECT_EQ(ts[4], '-');
  EXPECT_EQ(ts[10], 'T');
  EXPECT_EQ(ts.back(), 'Z');
}

TEST(Report, NonFiniteIsNull) {
  EXPECT_TRUE(finite_or_null(std::numeric_limits<double>::infinity()).is_null());
  EXPECT_TRUE(finite_or_null(std::nan("")).is_null());
  EXPECT_EQ(finite_or_null(2.0), 2.0);
}
