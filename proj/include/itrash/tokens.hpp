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

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace itrash {

/// Fixed-point token quantity with six decimal places (one unit = 10^-6,
/// the XRP "drop").
class TokenAmount
{
public:
  static constexpr std::int64_t units_per_token = 1'000'000;

  constexpr TokenAmount() = default;

  static constexpr TokenAmount from_micro(std::int64_t micro)
  {
    TokenAmount a;
    a.micro_ = micro;
    return a;
  }

  static constexpr TokenAmount whole(std::int64_t tokens)
  {
    return from_micro(tokens * units_per_token);
  }

  /// Parses decimal text such as "100", "0.01", "99.450000". More than six
  /// fractional digits is a parse error.
  static TokenAmount parse(std::string_view text);

  [[nodiscard]] constexpr std::int64_t micro() const
  {
    return micro_;
  }

  /// Always six fractional digits: "0.010000".
  [[nodiscard]] std::string to_string() const;

  constexpr TokenAmount& operator+=(TokenAmount o)
  {
    micro_ += o.micro_;
    return *this;
  }
  constexpr TokenAmount& operator-=(TokenAmount o)
  {
    micro_ -= o.micro_;
    return *this;
  }
  friend constexpr TokenAmount operator+(TokenAmount a, TokenAmount b)
  {
    return a += b;
  }
  friend constexpr TokenAmount operator-(TokenAmount a, TokenAmount b)
  {
    return a -= b;
  }
  friend constexpr TokenAmount operator*(TokenAmount a, std::int64_t n)
  {
    return from_micro(a.micro_ * n);
  }
  friend constexpr auto operator<=>(TokenAmount, TokenAmount) = default;

private:
  std::int64_t micro_ = 0;
};

}  // namespace itrash
