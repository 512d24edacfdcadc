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

#include "itrash/time.hpp"

#include <charconv>
#include <cstdio>

#include "itrash/error.hpp"

namespace itrash {

namespace {

struct Fields
{
  int year;
  unsigned month, day;
  long long hour, minute, second, millis;
};

Fields split(Timestamp t)
{
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{ day_point };
  auto rest = t - day_point;
  auto h = duration_cast<hours>(rest);
  rest -= h;
  auto m = duration_cast<minutes>(rest);
  rest -= m;
  auto s = duration_cast<seconds>(rest);
  rest -= s;
  return { static_cast<int>(ymd.year()),
           static_cast<unsigned>(ymd.month()),
           static_cast<unsigned>(ymd.day()),
           h.count(),
           m.count(),
           s.count(),
           rest.count() };
}

int read_int(std::string_view text, std::size_t pos, std::size_t len)
{
  if (pos + len > text.size()) {
    throw Error(ErrorCode::parse_error,
                "timestamp too short: '" + std::string(text) + "'");
  }
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw Error(ErrorCode::parse_error,
                "bad timestamp digits: '" + std::string(text) + "'");
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c)
{
  if (pos >= text.size() || text[pos] != c) {
    throw Error(ErrorCode::parse_error,
                "malformed timestamp: '" + std::string(text) + "'");
  }
}

}  // namespace

std::string format_iso8601(Timestamp t)
{
  auto f = split(t);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", f.year,
                f.month, f.day, f.hour, f.minute, f.second);
  return buf;
}

std::string format_iso8601_ms(Timestamp t)
{
  auto f = split(t);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                f.year, f.month, f.day, f.hour, f.minute, f.second, f.millis);
  return buf;
}

Timestamp parse_iso8601(std::string_view text)
{
  using namespace std::chrono;
  int y = read_int(text, 0, 4);
  expect_char(text, 4, '-');
  int mo = read_int(text, 5, 2);
  expect_char(text, 7, '-');
  int d = read_int(text, 8, 2);
  expect_char(text, 10, 'T');
  int h = read_int(text, 11, 2);
  expect_char(text, 13, ':');
  int mi = read_int(text, 14, 2);
  expect_char(text, 16, ':');
  int s = read_int(text, 17, 2);
  int ms = 0;
  std::size_t pos = 19;
  if (pos < text.size() && text[pos] == '.') {
    ms = read_int(text, 20, 3);
    pos = 23;
  }
  expect_char(text, pos, 'Z');
  if (pos + 1 != text.size()) {
    throw Error(ErrorCode::parse_error,
                "trailing characters in timestamp: '" + std::string(text) + "'");
  }
  year_month_day ymd{ year{ y }, month{ static_cast<unsigned>(mo) },
                      day{ static_cast<unsigned>(d) } };
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::parse_error,
                "timestamp out of range: '" + std::string(text) + "'");
  }
  return sys_days{ ymd } + hours{ h } + minutes{ mi } + seconds{ s } +
         milliseconds{ ms };
}

Duration parse_duration(std::string_view text)
{
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || value < 0) {
    throw Error(ErrorCode::parse_error,
                "bad duration: '" + std::string(text) + "'");
  }
  std::string_view unit(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
  if (unit.empty() || unit == "ms") {
    return Duration{ value };
  }
  if (unit == "s") {
    return std::chrono::seconds{ value };
  }
  if (unit == "m" || unit == "min") {
    return std::chrono::minutes{ value };
  }
  if (unit == "h") {
    return std::chrono::hours{ value };
  }
  throw Error(ErrorCode::parse_error,
              "unknown duration unit in '" + std::string(text) + "'");
}

}  // namespace itrash
