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

#include <cstddef>
#include <cstdint>
#include <string>

namespace itrash::property {

struct Report
{
  std::size_t sequences = 0;
  std::size_t steps = 0;
  std::size_t violations = 0;
  std::string first_violation;

  [[nodiscard]] bool ok() const
  {
    return violations == 0;
  }
};

/// Random event sequences through the transition function, checking
/// totality, determinism, single persistence per session, rewards only after
/// a color-matched disposal, and return to Idle under advancing ticks.
Report check_controller(std::size_t sequences, std::uint64_t seed);

/// Random wallet and transfer sequences, checking conservation of supply,
/// non-negative balances, rejected operations leaving state untouched,
/// one reward per memo, and that replaying the log reproduces balances.
Report check_ledger(std::size_t sequences, std::uint64_t seed);

}  // namespace itrash::property
