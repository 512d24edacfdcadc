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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "itrash/error.hpp"
#include "itrash/time.hpp"

namespace itrash {

/// Municipal sorting category. Blue is paper and cardboard, yellow is
/// plastic, brown is organic.
enum class BinColor : std::uint8_t
{
  blue,
  yellow,
  brown,
};

inline constexpr std::array<BinColor, 3> all_colors{ BinColor::blue,
                                                     BinColor::yellow,
                                                     BinColor::brown };

constexpr std::size_t index_of(BinColor c)
{
  return static_cast<std::size_t>(c);
}

constexpr std::string_view to_string(BinColor c)
{
  switch (c) {
    case BinColor::blue: return "blue";
    case BinColor::yellow: return "yellow";
    case BinColor::brown: return "brown";
  }
  return "blue";
}

/// Case-insensitive; returns nullopt for anything but the three names.
std::optional<BinColor> parse_color(std::string_view text);

/// Throwing variant of parse_color.
BinColor color_from_string(std::string_view text);

class ClassificationOutcome
{
public:
  static constexpr ClassificationOutcome valid(BinColor c)
  {
    return ClassificationOutcome{ c };
  }
  static constexpr ClassificationOutcome invalid()
  {
    return ClassificationOutcome{};
  }

  [[nodiscard]] constexpr bool is_valid() const
  {
    return color_.has_value();
  }
  [[nodiscard]] constexpr std::optional<BinColor> color() const
  {
    return color_;
  }

  friend constexpr bool operator==(const ClassificationOutcome&,
                                   const ClassificationOutcome&) = default;

private:
  constexpr ClassificationOutcome() = default;
  constexpr explicit ClassificationOutcome(BinColor c)
    : color_(c)
  {
  }

  std::optional<BinColor> color_;
};

std::string to_string(const ClassificationOutcome& outcome);

struct SessionOutcome
{
  enum class Kind : std::uint8_t
  {
    correct_rewarded,
    correct_unclaimed,
    correct_donated,
    incorrect_bin,
    timeout,
  };

  Kind kind = Kind::timeout;
  /// 1..4, meaningful for correct_donated only.
  int ngo_id = 0;

  static constexpr SessionOutcome rewarded()
  {
    return { Kind::correct_rewarded, 0 };
  }
  static constexpr SessionOutcome unclaimed()
  {
    return { Kind::correct_unclaimed, 0 };
  }
  static constexpr SessionOutcome donated(int ngo)
  {
    return { Kind::correct_donated, ngo };
  }
  static constexpr SessionOutcome incorrect_bin()
  {
    return { Kind::incorrect_bin, 0 };
  }
  static constexpr SessionOutcome timed_out()
  {
    return { Kind::timeout, 0 };
  }

  /// True for the three outcomes that require bin_thrown = bin_predicted.
  [[nodiscard]] constexpr bool is_correct_disposal() const
  {
    return kind == Kind::correct_rewarded || kind == Kind::correct_unclaimed ||
           kind == Kind::correct_donated;
  }

  friend constexpr bool operator==(const SessionOutcome&,
                                   const SessionOutcome&) = default;
};

/// "correct_rewarded", "correct_unclaimed", "correct_donated:<ngo>",
/// "incorrect_bin", "timeout".
std::string to_string(const SessionOutcome& outcome);
SessionOutcome parse_outcome(std::string_view text);

/// One finished interaction. The constructor enforces the record invariants,
/// so a DisposalRecord value is always well formed.
class DisposalRecord
{
public:
  DisposalRecord(std::string record_id,
                 std::string image_b64,
                 Timestamp time,
                 std::optional<BinColor> bin_predicted,
                 std::optional<BinColor> bin_thrown,
                 std::optional<BinColor> bin_real,
                 SessionOutcome outcome);

  [[nodiscard]] const std::string& record_id() const
  {
    return record_id_;
  }
  [[nodiscard]] const std::string& image_b64() const
  {
    return image_b64_;
  }
  [[nodiscard]] std::string image_bytes() const;
  [[nodiscard]] Timestamp time() const
  {
    return time_;
  }
  [[nodiscard]] std::optional<BinColor> bin_predicted() const
  {
    return bin_predicted_;
  }
  [[nodiscard]] std::optional<BinColor> bin_thrown() const
  {
    return bin_thrown_;
  }
  [[nodiscard]] std::optional<BinColor> bin_real() const
  {
    return bin_real_;
  }
  [[nodiscard]] SessionOutcome outcome() const
  {
    return outcome_;
  }
  [[nodiscard]] bool disposed() const
  {
    return bin_thrown_.has_value();
  }

  [[nodiscard]] DisposalRecord with_bin_real(BinColor real) const;

  friend bool operator==(const DisposalRecord&,
                         const DisposalRecord&) = default;

private:
  std::string record_id_;
  std::string image_b64_;
  Timestamp time_;
  std::optional<BinColor> bin_predicted_;
  std::optional<BinColor> bin_thrown_;
  std::optional<BinColor> bin_real_;
  SessionOutcome outcome_;
};

/// bin_predicted = bin_real. Throws missing_field if either is absent.
bool is_correct_prediction(const DisposalRecord& r);

/// bin_thrown = bin_predicted. Throws missing_field if either is absent.
bool is_followed_instruction(const DisposalRecord& r);

nlohmann::json to_json(const DisposalRecord& r);
DisposalRecord record_from_json(const nlohmann::json& j);

/// One compact JSON object, no trailing newline.
std::string encode_record(const DisposalRecord& r);
DisposalRecord decode_record(std::string_view line);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);
bool is_base64(std::string_view text);

/// Formats 128 bits as a version-4 UUID string.
std::string format_uuid(std::uint64_t hi, std::uint64_t lo);
bool is_uuid(std::string_view text);

}  // namespace itrash
