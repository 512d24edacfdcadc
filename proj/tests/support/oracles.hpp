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
#include <span>
#include <string>
#include <vector>

#include "itrash/analytics.hpp"
#include "itrash/domain.hpp"
#include "reference_figures.hpp"

namespace itrash::oracle {

/// Sorts a full copy and interpolates between the two closest ranks.
double sorted_percentile(std::vector<double> data, double p);

struct Box
{
  double q1 = 0, median = 0, q3 = 0, iqr = 0;
  double whisker_low = 0, whisker_high = 0;
  std::vector<double> outliers;
  double mean = 0;
};

Box box(const std::vector<double>& data);

/// Counts per slot, per bin, per day, computed by a plain loop over records.
/// result[slot][bin][day].
std::vector<std::array<std::vector<double>, 3>> slot_counts(std::span<const DisposalRecord> records,
                                                             int slot_minutes,
                                                             int days);

/// Builds one record per matrix cell entry with the given field layout.
/// Records are spaced one minute apart from `start`.
std::vector<DisposalRecord> records_from_cells(
  const std::vector<std::tuple<std::optional<BinColor>, std::optional<BinColor>, std::optional<BinColor>,
                               std::size_t>>& cells,
  Timestamp start);

/// The 79 iTrash records and 89 control records rebuilt from the reference
/// counts, independent of the replay harness.
std::vector<DisposalRecord> reference_itrash_records();
std::vector<DisposalRecord> reference_control_records();

/// Matrix of (row, column) counts by direct enumeration.
reference::Matrix count_pairs(std::span<const DisposalRecord> records,
                              std::optional<BinColor> (DisposalRecord::*row)() const,
                              std::optional<BinColor> (DisposalRecord::*column)() const,
                              bool only_correct_predictions = false);

}  // namespace itrash::oracle
