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

#include <chrono>
#include <string>
#include <string_view>

namespace itrash {

using Duration = std::chrono::milliseconds;
using Timestamp = std::chrono::sys_time<Duration>;

/// "YYYY-MM-DDTHH:MM:SSZ"; sub-second digits are dropped.
std::string format_iso8601(Timestamp t);

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_iso8601_ms(Timestamp t);

/// Accepts both forms above (the trailing Z is required).
Timestamp parse_iso8601(std::string_view text);

/// Parses "100ms", "10s", "1h", "30m"; a bare integer is milliseconds.
Duration parse_duration(std::string_view text);

constexpr Timestamp floor_seconds(Timestamp t)
{
  return std::chrono::floor<std::chrono::seconds>(t);
}

}  // namespace itrash
