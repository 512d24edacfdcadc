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

#include "itrash/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "itrash/error.hpp"

namespace itrash {

namespace {

using Field = std::optional<BinColor> (DisposalRecord::*)() const;

void require(const std::vector<const DisposalRecord*>& rows,
             std::initializer_list<std::pair<Field, const char*>> fields)
{
  std::string missing;
  for (const auto* r : rows) {
    for (const auto& [field, name] : fields) {
      if (!((*r).*field)()) {
        missing += (missing.empty() ? "" : ", ") + r->record_id() + " (" + name + ")";
      }
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::missing_annotation, "records lack fields: " + missing);
  }
}

/// Disposed records only; an item shown to the camera but never thrown is
/// excluded from every metric.
std::vector<const DisposalRecord*> disposed(std::span<const DisposalRecord> records)
{
  std::vector<const DisposalRecord*> out;
  for (const auto& r : records) {
    if (r.disposed()) {
      out.push_back(&r);
    }
  }
  return out;
}

}  // namespace

Ratio accuracy(std::span<const DisposalRecord> records, AccuracyMode mode)
{
  auto rows = disposed(records);
  if (mode == AccuracyMode::prediction) {
    // Invalid classifications never produced a prediction to score.
    std::erase_if(rows, [](const DisposalRecord* r) { return !r->bin_predicted(); });
  }
  if (rows.empty()) {
    throw Error(ErrorCode::empty_input, "no disposed records to score");
  }
  require(rows, { { &DisposalRecord::bin_real, "bin_real" } });
  Ratio out{ 0, rows.size() };
  for (const auto* r : rows) {
    auto guess = mode == AccuracyMode::prediction ? r->bin_predicted() : r->bin_thrown();
    if (*guess == *r->bin_real()) {
      ++out.numerator;
    }
  }
  return out;
}

std::string_view to_string(Pairing p)
{
  switch (p) {
    case Pairing::thrown_vs_real: return "thrown_vs_real";
    case Pairing::predicted_vs_real: return "predicted_vs_real";
    case Pairing::correct_predicted_vs_thrown: return "correct_predicted_vs_thrown";
  }
  return "thrown_vs_real";
}

Pairing parse_pairing(std::string_view text)
{
  if (text == "A" || text == "a" || text == "thrown_vs_real") {
    return Pairing::thrown_vs_real;
  }
  if (text == "B" || text == "b" || text == "predicted_vs_real") {
    return Pairing::predicted_vs_real;
  }
  if (text == "C" || text == "c" || text == "correct_predicted_vs_thrown") {
    return Pairing::correct_predicted_vs_thrown;
  }
  throw Error(ErrorCode::invalid_argument, "unknown pairing '" + std::string(text) + "'");
}

std::size_t FlowMatrix::total() const
{
  std::size_t sum = 0;
  for (const auto& row : counts) {
    sum += std::accumulate(row.begin(), row.end(), std::size_t{ 0 });
  }
  return sum;
}

std::size_t FlowMatrix::diagonal() const
{
  return counts[0][0] + counts[1][1] + counts[2][2];
}

std::size_t FlowMatrix::row_total(BinColor row) const
{
  const auto& r = counts[index_of(row)];
  return r[0] + r[1] + r[2];
}

nlohmann::json to_json(const FlowMatrix& m)
{
  nlohmann::json rows = nlohmann::json::object();
  for (auto a : all_colors) {
    nlohmann::json row = nlohmann::json::object();
    for (auto b : all_colors) {
      row[std::string(to_string(b))] = m.at(a, b);
    }
    rows[std::string(to_string(a))] = row;
  }
  return { { "pairing", to_string(m.pairing) }, { "rows", rows }, { "total", m.total() } };
}

FlowMatrix flow_matrix(std::span<const DisposalRecord> records, Pairing pairing)
{
  auto rows = disposed(records);
  FlowMatrix m;
  m.pairing = pairing;
  switch (pairing) {
    case Pairing::thrown_vs_real:
      require(rows, { { &DisposalRecord::bin_real, "bin_real" } });
      for (const auto* r : rows) {
        ++m.counts[index_of(*r->bin_real())][index_of(*r->bin_thrown())];
      }
      break;
    case Pairing::predicted_vs_real:
      require(rows, { { &DisposalRecord::bin_real, "bin_real" },
                      { &DisposalRecord::bin_predicted, "bin_predicted" } });
      for (const auto* r : rows) {
        ++m.counts[index_of(*r->bin_real())][index_of(*r->bin_predicted())];
      }
      break;
    case Pairing::correct_predicted_vs_thrown:
      require(rows, { { &DisposalRecord::bin_real, "bin_real" },
                      { &DisposalRecord::bin_predicted, "bin_predicted" } });
      for (const auto* r : rows) {
        if (*r->bin_predicted() == *r->bin_real()) {
          ++m.counts[index_of(*r->bin_predicted())][index_of(*r->bin_thrown())];
        }
      }
      break;
  }
  return m;
}

Ratio follow_rate(std::span<const DisposalRecord> records)
{
  auto m = flow_matrix(records, Pairing::correct_predicted_vs_thrown);
  if (m.total() == 0) {
    throw Error(ErrorCode::empty_input, "no correctly predicted, disposed records");
  }
  return { m.diagonal(), m.total() };
}

Ratio follow_rate(std::span<const DisposalRecord> records, BinColor color)
{
  auto m = flow_matrix(records, Pairing::correct_predicted_vs_thrown);
  if (m.row_total(color) == 0) {
    throw Error(ErrorCode::empty_input,
                "no correctly predicted " + std::string(to_string(color)) + " records");
  }
  return { m.at(color, color), m.row_total(color) };
}

double percentile(std::span<const double> data, double p)
{
  if (data.empty()) {
    throw Error(ErrorCode::empty_input, "percentile of an empty series");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "percentile rank outside [0, 1]");
  }
  std::vector<double> work(data.begin(), data.end());
  auto pos = p * static_cast<double>(work.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto frac = pos - static_cast<double>(lo);
  std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(lo), work.end());
  auto lo_value = work[lo];
  if (frac == 0.0 || lo + 1 >= work.size()) {
    return lo_value;
  }
  auto hi_value = *std::min_element(work.begin() + static_cast<std::ptrdiff_t>(lo) + 1, work.end());
  return lo_value + frac * (hi_value - lo_value);
}

BoxStats box_stats(std::span<const double> data)
{
  BoxStats s;
  if (data.empty()) {
    return s;
  }
  s.q1 = percentile(data, 0.25);
  s.median = percentile(data, 0.5);
  s.q3 = percentile(data, 0.75);
  s.iqr = s.q3 - s.q1;
  const double low_fence = s.q1 - 1.5 * s.iqr;
  const double high_fence = s.q3 + 1.5 * s.iqr;
  s.whisker_low = s.q1;
  s.whisker_high = s.q3;
  bool have_inlier = false;
  for (double v : data) {
    if (v < low_fence || v > high_fence) {
      s.outliers.push_back(v);
      continue;
    }
    if (!have_inlier) {
      s.whisker_low = s.whisker_high = v;
      have_inlier = true;
    } else {
      s.whisker_low = std::min(s.whisker_low, v);
      s.whisker_high = std::max(s.whisker_high, v);
    }
  }
  std::sort(s.outliers.begin(), s.outliers.end());
  s.mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
  return s;
}

double TemporalStats::mean_total() const
{
  return stats[0].mean + stats[1].mean + stats[2].mean;
}

nlohmann::json to_json(const TemporalStats& s)
{
  using std::chrono::duration_cast;
  using std::chrono::minutes;
  nlohmann::json bins = nlohmann::json::object();
  for (auto c : all_colors) {
    const auto& b = s.of(c);
    bins[std::string(to_string(c))] = { { "per_day", s.per_day[index_of(c)] },
                                        { "median", b.median },
                                        { "q1", b.q1 },
                                        { "q3", b.q3 },
                                        { "iqr", b.iqr },
                                        { "whisker_low", b.whisker_low },
                                        { "whisker_high", b.whisker_high },
                                        { "outliers", b.outliers },
                                        { "mean", b.mean } };
  }
  return { { "slot_start_min", duration_cast<minutes>(s.slot_start).count() },
           { "slot_width_min", duration_cast<minutes>(s.slot_width).count() },
           { "mean_total", s.mean_total() },
           { "bins", bins } };
}

std::vector<TemporalStats> temporal_stats(std::span<const DisposalRecord> records,
                                          Duration slot_width,
                                          int days)
{
  using namespace std::chrono;
  constexpr Duration day_length = hours{ 24 };
  if (slot_width <= Duration::zero() || day_length % slot_width != Duration::zero()) {
    throw Error(ErrorCode::invalid_argument, "slot width must divide 24 h");
  }
  if (days < 0) {
    throw Error(ErrorCode::invalid_argument, "days must be >= 0");
  }
  const auto n_slots = static_cast<std::size_t>(day_length / slot_width);
  std::vector<TemporalStats> out(n_slots);
  for (std::size_t i = 0; i < n_slots; ++i) {
    out[i].slot_start = slot_width * static_cast<Duration::rep>(i);
    out[i].slot_width = slot_width;
    for (auto& series : out[i].per_day) {
      series.assign(static_cast<std::size_t>(days), 0.0);
    }
  }
  auto rows = disposed(records);
  if (!rows.empty()) {
    auto first_day = floor<std::chrono::days>(
      (*std::min_element(rows.begin(), rows.end(), [](auto* a, auto* b) {
        return a->time() < b->time();
      }))->time());
    for (const auto* r : rows) {
      auto day_start = floor<std::chrono::days>(r->time());
      auto day = (day_start - first_day).count();
      if (day >= days) {
        continue;
      }
      auto slot = static_cast<std::size_t>((r->time() - day_start) / slot_width);
      out[slot].per_day[index_of(*r->bin_thrown())][static_cast<std::size_t>(day)] += 1.0;
    }
  }
  for (auto& s : out) {
    for (auto c : all_colors) {
      s.stats[index_of(c)] = box_stats(s.per_day[index_of(c)]);
    }
  }
  return out;
}

double mean_over_hours(std::span<const TemporalStats> stats, int from_hour, int to_hour)
{
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : stats) {
    auto h = std::chrono::duration_cast<std::chrono::hours>(s.slot_start).count();
    if (h >= from_hour && h < to_hour) {
      sum += s.mean_total();
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

nlohmann::json sankey_json(const FlowMatrix& m)
{
  const char* row_axis = m.pairing == Pairing::correct_predicted_vs_thrown ? "predicted" : "real";
  const char* col_axis = m.pairing == Pairing::predicted_vs_real ? "predicted" : "thrown";
  nlohmann::json nodes = nlohmann::json::array();
  for (auto c : all_colors) {
    nodes.push_back({ { "id", nodes.size() },
                      { "name", std::string(row_axis) + ":" + std::string(to_string(c)) } });
  }
  for (auto c : all_colors) {
    nodes.push_back({ { "id", nodes.size() },
                      { "name", std::string(col_axis) + ":" + std::string(to_string(c)) } });
  }
  nlohmann::json links = nlohmann::json::array();
  for (auto a : all_colors) {
    for (auto b : all_colors) {
      if (auto v = m.at(a, b); v > 0) {
        links.push_back({ { "source", index_of(a) }, { "target", 3 + index_of(b) }, { "value", v } });
      }
    }
  }
  return { { "pairing", to_string(m.pairing) }, { "nodes", nodes }, { "links", links } };
}

void export_sankey(const FlowMatrix& m, const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io, "cannot write " + path.string());
  }
  out << sankey_json(m).dump(2) << '\n';
  if (!out) {
    throw Error(ErrorCode::io, "write to " + path.string() + " failed");
  }
}

nlohmann::json summarize(std::span<const DisposalRecord> records)
{
  nlohmann::json j;
  std::size_t disposed_count = 0;
  std::size_t rewarded = 0;
  std::size_t donated = 0;
  for (const auto& r : records) {
    disposed_count += r.disposed() ? 1 : 0;
    rewarded += r.outcome().kind == SessionOutcome::Kind::correct_rewarded ? 1 : 0;
    donated += r.outcome().kind == SessionOutcome::Kind::correct_donated ? 1 : 0;
  }
  j["presented"] = records.size();
  j["disposed"] = disposed_count;
  j["undisposed"] = records.size() - disposed_count;
  j["rewards_claimed_by_user"] = rewarded;
  j["rewards_donated_to_ngo"] = donated;
  auto ratio_json = [](const Ratio& r) {
    return nlohmann::json{ { "correct", r.numerator },
                           { "total", r.denominator },
                           { "value", r.value() } };
  };
  for (auto [mode, key] : { std::pair{ AccuracyMode::prediction, "accuracy_prediction" },
                            std::pair{ AccuracyMode::disposal, "accuracy_disposal" } }) {
    try {
      j[key] = ratio_json(accuracy(records, mode));
    } catch (const Error& e) {
      j[key] = { { "error", e.what() } };
    }
  }
  try {
    j["follow_rate"] = ratio_json(follow_rate(records));
  } catch (const Error& e) {
    j["follow_rate"] = { { "error", e.what() } };
  }
  return j;
}

}  // namespace itrash
