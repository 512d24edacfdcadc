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

#include "itrash/item_tag.hpp"

#include <charconv>

namespace itrash {

namespace {
constexpr std::string_view magic = "itrash-item";
}

std::string ItemTag::encode() const
{
  std::string out(magic);
  out += ";seq=" + std::to_string(seq);
  if (real) {
    out += ";real=" + std::string(to_string(*real));
  }
  if (predicted) {
    out += ";pred=" + to_string(*predicted);
  }
  return out;
}

std::optional<ItemTag> ItemTag::decode(std::string_view bytes)
{
  if (bytes.substr(0, magic.size()) != magic) {
    return std::nullopt;
  }
  ItemTag tag;
  auto rest = bytes.substr(magic.size());
  while (!rest.empty()) {
    if (rest.front() != ';') {
      return std::nullopt;
    }
    rest.remove_prefix(1);
    auto end = rest.find(';');
    auto field = rest.substr(0, end);
    rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
    auto eq = field.find('=');
    if (eq == std::string_view::npos) {
      return std::nullopt;
    }
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "seq") {
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), tag.seq);
      if (ec != std::errc{} || ptr != value.data() + value.size()) {
        return std::nullopt;
      }
    } else if (key == "real") {
      tag.real = parse_color(value);
      if (!tag.real) {
        return std::nullopt;
      }
    } else if (key == "pred") {
      if (value == "invalid") {
        tag.predicted = ClassificationOutcome::invalid();
      } else if (auto c = parse_color(value)) {
        tag.predicted = ClassificationOutcome::valid(*c);
      } else {
        return std::nullopt;
      }
    }
  }
  return tag;
}

}  // namespace itrash
