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
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "itrash/domain.hpp"
#include "itrash/time.hpp"

namespace itrash {

/// Exact ratio of integer counts.
struct Ratio
{
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  [[nodiscard]] double value() const
  {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  [[nodiscard]] double percent() const
  {
    return 100.0 * value();
  }

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

enum class AccuracyMode
{
  /// bin_predicted vs bin_real.
  prediction,
  /// bin_thrown vs bin_real.
  disposal,
};

/// Correct / all over disposed records. Undisposed records never count.
/// Throws empty_input if nothing qualifies, missing_annotation (listing the
/// record ids) if a disposed record lacks a field the mode needs.
Ratio accuracy(std::span<const DisposalRecord> records, AccuracyMode mode);

enum class Pairing
{
  thrown_vs_real,               // A: rows bin_real, columns bin_thrown
  predicted_vs_real,            // B: rows bin_real, columns bin_predicted
  correct_predicted_vs_thrown,  // C: rows bin_predicted (= bin_real), columns bin_thrown
};

std::string_view to_string(Pairing p);
/// Accepts "A"/"B"/"C" or the long names.
Pairing parse_pairing(std::string_view text);

struct FlowMatrix
{
  Pairing pairing = Pairing::thrown_vs_real;
  /// counts[row][column], indexed by index_of(BinColor).
  std::array<std::array<std::size_t, 3>, 3> counts{};

  [[nodiscard]] std::size_t at(BinColor row, BinColor column) const
  {
    return counts[index_of(row)][index_of(column)];
  }
  [[nodiscard]] std::size_t total() const;
  [[nodiscard]] std::size_t diagonal() const;
  [[nodiscard]] std::size_t row_total(BinColor row) const;

  friend bool operator==(const FlowMatrix&, const FlowMatrix&) = default;
};

nlohmann::json to_json(const FlowMatrix& m);

/// Exact 3x3 counts over disposed records. Errors as accuracy().
FlowMatrix flow_matrix(std::span<const DisposalRecord> records, Pairing pairing);

/// Among disposed, correctly predicted records: fraction thrown where
/// indicated. Throws empty_input when no record qualifies.
Ratio follow_rate(std::span<const DisposalRecord> records);

/// follow_rate() restricted to items whose correct prediction was `color`.
Ratio follow_rate(std::span<const DisposalRecord> records, BinColor color);

/// Box-plot statistics of one series.
struct BoxStats
{
  double median = 0;
  double q1 = 0;
  double q3 = 0;
  double iqr = 0;
  double whisker_low = 0;
  double whisker_high = 0;
  std::vector<double> outliers;
  double mean = 0;
};

/// Linear interpolation between closest ranks on sorted data (position
/// p * (n - 1)). Requires non-empty data and 0 <= p <= 1.
double percentile(std::span<const double> data, double p);

/// Quartiles by percentile(), whiskers at the most extreme data within
/// 1.5 IQR of the box, outliers beyond. Empty input gives all zeros.
BoxStats box_stats(std::span<const double> data);

struct TemporalStats
{
  /// Slot start as an offset from midnight UTC.
  Duration slot_start{};
  Duration slot_width{};
  /// Disposed items per day for this slot, per bin color.
  std::array<std::vector<double>, 3> per_day;
  std::array<BoxStats, 3> stats;

  [[nodiscard]] const BoxStats& of(BinColor c) const
  {
    return stats[index_of(c)];
  }
  /// Mean items per day over all three bins.
  [[nodiscard]] double mean_total() const;
};

nlohmann::json to_json(const TemporalStats& s);

/// Per-slot, per-bin daily counts of disposed items (by bin_thrown) over
/// `days` days starting at the UTC date of the earliest disposed record.
/// Throws invalid_argument unless slot_width > 0 divides 24 h.
std::vector<TemporalStats> temporal_stats(std::span<const DisposalRecord> records,
                                          Duration slot_width,
                                          int days);

/// Mean daily total over the slots that start in [from_hour, to_hour).
double mean_over_hours(std::span<const TemporalStats> stats, int from_hour, int to_hour);

/// Sankey nodes and links: 6 nodes (row colors then column colors) and one
/// link per non-zero cell.
nlohmann::json sankey_json(const FlowMatrix& m);
void export_sankey(const FlowMatrix& m, const std::filesystem::path& path);

/// Headline figures for a store: counts, both accuracies where computable,
/// follow rates and reward claims.
nlohmann::json summarize(std::span<const DisposalRecord> records);

}  // namespace itrash
