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

#include "itrash/tokens.hpp"

#include <cstdio>
#include <cstdlib>

#include "itrash/error.hpp"

namespace itrash {

TokenAmount TokenAmount::parse(std::string_view text)
{
  auto fail = [&] {
    throw Error(ErrorCode::parse_error,
                "bad token amount: '" + std::string(text) + "'");
  };
  if (text.empty()) {
    fail();
  }
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-') {
    negative = true;
    i = 1;
  }
  std::int64_t whole = 0;
  std::size_t digits = 0;
  for (; i < text.size() && text[i] != '.'; ++i, ++digits) {
    if (text[i] < '0' || text[i] > '9' || digits > 12) {
      fail();
    }
    whole = whole * 10 + (text[i] - '0');
  }
  std::int64_t frac = 0;
  std::size_t frac_digits = 0;
  if (i < text.size()) {
    ++i;  // '.'
    for (; i < text.size(); ++i, ++frac_digits) {
      if (text[i] < '0' || text[i] > '9' || frac_digits >= 6) {
        fail();
      }
      frac = frac * 10 + (text[i] - '0');
    }
  }
  if (digits == 0 && frac_digits == 0) {
    fail();
  }
  for (; frac_digits < 6; ++frac_digits) {
    frac *= 10;
  }
  auto micro = whole * units_per_token + frac;
  return from_micro(negative ? -micro : micro);
}

std::string TokenAmount::to_string() const
{
  auto magnitude = micro_ < 0 ? -micro_ : micro_;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", micro_ < 0 ? "-" : "",
                static_cast<long long>(magnitude / units_per_token),
                static_cast<long long>(magnitude % units_per_token));
  return buf;
}

}  // namespace itrash
