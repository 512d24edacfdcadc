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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "itrash/domain.hpp"

namespace itrash {

/// Label carried inside simulated camera frames. Real frames have no tag;
/// simulated ones encode the ground truth (standing in for manual review)
/// and, in scripted replays, the prediction the classifier must return.
///
/// Text form: "itrash-item;seq=12;real=blue;pred=yellow". `pred=invalid`
/// scripts an unreadable image.
struct ItemTag
{
  std::uint64_t seq = 0;
  std::optional<BinColor> real;
  std::optional<ClassificationOutcome> predicted;

  [[nodiscard]] std::string encode() const;

  /// nullopt when the bytes are not a tag at all.
  static std::optional<ItemTag> decode(std::string_view bytes);

  friend bool operator==(const ItemTag&, const ItemTag&) = default;
};

}  // namespace itrash
