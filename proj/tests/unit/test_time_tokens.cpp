// Copyright 2026 The iTrash Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "itrash/error.hpp"
#include "itrash/random.hpp"
#include "itrash/time.hpp"
#include "itrash/tokens.hpp"

using namespace itrash;
using namespace std::chrono_literals;

TEST(Time, FormatsWholeSecondsAndMillis)
{
  auto t = parse_iso8601("2024-03-04T13:05:09.250Z");
  EXPECT_EQ(format_iso8601(t), "2024-03-04T13:05:09Z");
  EXPECT_EQ(format_iso8601_ms(t), "2024-03-04T13:05:09.250Z");
  EXPECT_EQ(floor_seconds(t), parse_iso8601("2024-03-04T13:05:09Z"));
}

TEST(Time, RoundTripsAcrossYearsAndLeapDay)
{
  for (const char* text : { "1970-01-01T00:00:00.000Z", "2024-02-29T23:59:59.999Z", "2099-12-31T12:00:00.001Z" }) {
    EXPECT_EQ(format_iso8601_ms(parse_iso8601(text)), text);
  }
}

TEST(Time, RejectsMalformedTimestamps)
{
  for (const char* bad : { "", "2024-03-04", "2024-13-01T00:00:00Z", "2024-03-04T25:00:00Z", "yesterday",
                           "2024-03-04T10:00:00", "2024-02-30T00:00:00Z" }) {
    EXPECT_THROW(parse_iso8601(bad), Error) << bad;
  }
}

TEST(Time, ParsesDurations)
{
  EXPECT_EQ(parse_duration("100ms"), 100ms);
  EXPECT_EQ(parse_duration("10s"), 10s);
  EXPECT_EQ(parse_duration("30m"), 30min);
  EXPECT_EQ(parse_duration("1h"), 1h);
  EXPECT_EQ(parse_duration("250"), 250ms);
  EXPECT_THROW(parse_duration("ten seconds"), Error);
  EXPECT_THROW(parse_duration(""), Error);
}

TEST(Tokens, FixedPointArithmeticHasNoDrift)
{
  auto balance = TokenAmount::whole(100);
  const auto reward = TokenAmount::parse("0.01");
  for (int i = 0; i < 55; ++i) {
    balance -= reward;
  }
  EXPECT_EQ(balance, TokenAmount::parse("99.45"));
  EXPECT_EQ(balance.to_string(), "99.450000");
  EXPECT_EQ(balance.micro(), 100'000'000 - 55 * 10'000);
}

TEST(Tokens, ParsesAndRejects)
{
  EXPECT_EQ(TokenAmount::parse("0.000001").micro(), 1);
  EXPECT_EQ(TokenAmount::parse("12").micro(), 12'000'000);
  EXPECT_EQ(TokenAmount::parse("-0.5").micro(), -500'000);
  EXPECT_THROW(TokenAmount::parse("0.0000001"), Error);
  EXPECT_THROW(TokenAmount::parse("abc"), Error);
  EXPECT_THROW(TokenAmount::parse(""), Error);
}

TEST(Random, DrawsAreReproducibleAndInRange)
{
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    auto x = draw_below(a, 7);
    EXPECT_EQ(x, draw_below(b, 7));
    EXPECT_LT(x, 7u);
    auto u = draw_unit(a);
    EXPECT_EQ(u, draw_unit(b));
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Random, ShuffleIsAPermutation)
{
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  Rng rng(7);
  auto w = v;
  portable_shuffle(w.begin(), w.end(), rng);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}
