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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "itrash/analytics.hpp"
#include "itrash/classifier.hpp"
#include "itrash/ledger.hpp"
#include "itrash/random.hpp"
#include "itrash/replay.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace itrash;

namespace {

// Tolerances are fixed here and nowhere else.
constexpr double delta_tolerance_points = 0.05;
constexpr double runtime_limit_seconds = 5.0;
constexpr double monte_carlo_tolerance = 0.01;
constexpr std::size_t monte_carlo_items = 100'000;
constexpr double oracle_tolerance = 1e-9;
constexpr std::size_t random_traces = 100;
constexpr double midday_ratio_target = 2.0;
constexpr double midday_ratio_tolerance = 0.25;  // relative
constexpr std::size_t property_sequences = 10'000;
constexpr std::uint64_t replay_seed = 7;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct Replays
{
  std::vector<DisposalRecord> control;
  std::vector<DisposalRecord> itrash;
  std::size_t presented = 0;
  std::size_t disposed_in_store = 0;
  double seconds = 0;
};

const Replays& canonical_replays()
{
  static const Replays r = [] {
    Replays out;
    auto started = std::chrono::steady_clock::now();
    auto control = replay(generate_trace(canonical_control_scenario(), replay_seed));
    auto itrash = replay(generate_trace(canonical_itrash_scenario(), replay_seed));
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out.control = control.store->query();
    out.itrash = itrash.store->query();
    out.presented = itrash.presented;
    out.disposed_in_store = itrash.store->query({ .disposed_only = true }).size();
    return out;
  }();
  return r;
}

Outcome accuracy_reproduction()
{
  const auto& r = canonical_replays();
  auto control = accuracy(r.control, AccuracyMode::disposal);
  auto itrash = accuracy(r.itrash, AccuracyMode::prediction);
  auto delta = itrash.percent() - control.percent();
  bool pass = control == Ratio{ reference::control_correct, reference::control_total } &&
              itrash == Ratio{ reference::itrash_correct_predictions, reference::itrash_disposed } &&
              std::fabs(delta - reference::accuracy_delta_points) <= delta_tolerance_points &&
              std::fabs(control.percent() - reference::control_accuracy_percent) < 0.005 &&
              std::fabs(itrash.percent() - reference::itrash_accuracy_percent) < 0.005 &&
              r.seconds < runtime_limit_seconds;
  return { pass,
           fmt("control %zu/%zu = %.2f%%, iTrash %zu/%zu = %.2f%%, delta %.2f pts, runtime %.2f s",
               control.numerator, control.denominator, control.percent(), itrash.numerator,
               itrash.denominator, itrash.percent(), delta, r.seconds) };
}

Outcome flow_fidelity()
{
  const auto& r = canonical_replays();
  struct Check
  {
    FlowMatrix got;
    const reference::Matrix& want;
  };
  std::vector<Check> checks{ { flow_matrix(r.control, Pairing::thrown_vs_real), reference::control_thrown_vs_real },
                             { flow_matrix(r.itrash, Pairing::predicted_vs_real), reference::itrash_predicted_vs_real },
                             { flow_matrix(r.itrash, Pairing::correct_predicted_vs_thrown),
                               reference::itrash_correct_vs_thrown } };
  std::size_t matched = 0;
  std::string mismatches;
  for (const auto& c : checks) {
    for (auto a : all_colors) {
      for (auto b : all_colors) {
        if (c.got.at(a, b) == c.want[index_of(a)][index_of(b)]) {
          ++matched;
        } else {
          mismatches += fmt(" %s[%s][%s]=%zu", std::string(to_string(c.got.pairing)).c_str(),
                            std::string(to_string(a)).c_str(), std::string(to_string(b)).c_str(),
                            c.got.at(a, b));
        }
      }
    }
  }
  const auto& b = checks[1].got;
  auto brown = b.at(BinColor::brown, BinColor::brown);
  bool brown_ok = brown == 14 && brown + b.at(BinColor::blue, BinColor::blue) +
                                     b.at(BinColor::yellow, BinColor::yellow) ==
                                   reference::itrash_correct_predictions;
  return { matched == 27 && brown_ok,
           fmt("%zu/27 cells match, brown diagonal %zu (55 = %zu + %zu + %zu)%s", matched, brown, brown,
               b.at(BinColor::blue, BinColor::blue), b.at(BinColor::yellow, BinColor::yellow),
               mismatches.c_str()) };
}

Outcome follow_rates()
{
  const auto& r = canonical_replays();
  auto overall = follow_rate(r.itrash);
  auto blue = follow_rate(r.itrash, BinColor::blue);
  auto yellow = follow_rate(r.itrash, BinColor::yellow);
  auto yellow_override = Ratio{ yellow.denominator - yellow.numerator, yellow.denominator };
  bool pass = overall == Ratio{ 38, 55 } && blue == Ratio{ 9, 11 } && yellow_override == Ratio{ 10, 30 } &&
              overall.percent() > 65.0 && overall.percent() < 70.0 && blue.percent() > 80.0 &&
              std::fabs(yellow_override.value() - 1.0 / 3.0) < 0.01;
  return { pass, fmt("follow %zu/%zu = %.2f%%, blue %zu/%zu = %.1f%%, yellow override %zu/%zu = %.1f%%",
                     overall.numerator, overall.denominator, overall.percent(), blue.numerator, blue.denominator,
                     blue.percent(), yellow_override.numerator, yellow_override.denominator,
                     yellow_override.percent()) };
}

Outcome exclusion_rule()
{
  const auto& r = canonical_replays();
  std::size_t undisposed = 0;
  for (const auto& rec : r.itrash) {
    undisposed += rec.disposed() ? 0 : 1;
  }
  auto scored = accuracy(r.itrash, AccuracyMode::prediction).denominator;
  bool pass = r.presented == reference::itrash_presented && r.itrash.size() == reference::itrash_presented &&
              undisposed == reference::itrash_undisposed && r.disposed_in_store == reference::itrash_disposed &&
              scored == reference::itrash_disposed;
  return { pass, fmt("presented %zu, stored %zu, undisposed %zu, disposed %zu, scored %zu", r.presented,
                     r.itrash.size(), undisposed, r.disposed_in_store, scored) };
}

Outcome fsm_properties()
{
  auto report = property::check_controller(property_sequences, 0xC0FFEE);
  return { report.ok() && report.sequences >= property_sequences,
           fmt("%zu sequences, %zu steps, %zu violations%s%s", report.sequences, report.steps, report.violations,
               report.ok() ? "" : "; first: ", report.first_violation.c_str()) };
}

Outcome ledger_properties()
{
  auto report = property::check_ledger(property_sequences, 0xBADC0DE);
  Ledger ledger;
  auto accounts = bootstrap_reward_wallets(ledger);
  ledger.register_wallet("rAcceptanceUser", "user");
  auto when = parse_iso8601("2024-03-04T12:00:00Z");
  for (int i = 0; i < 55; ++i) {
    ledger.transfer(accounts.itrash, "rAcceptanceUser", TokenAmount::parse("0.01"), "s" + std::to_string(i), when);
  }
  auto left = ledger.balance(accounts.itrash);
  bool arithmetic = left == TokenAmount::parse("99.45");
  return { report.ok() && report.sequences >= property_sequences && arithmetic,
           fmt("%zu sequences, %zu violations%s%s; balance after 55 rewards %s", report.sequences,
               report.violations, report.ok() ? "" : " first: ", report.first_violation.c_str(),
               left.to_string().c_str()) };
}

Outcome classifier_statistics()
{
  auto table = ConfusionTable::field_trial_fit();
  // Real-class mix of the disposed items.
  std::array<double, 3> weight{};
  double n = 0;
  for (auto c : all_colors) {
    for (auto p : all_colors) {
      weight[index_of(c)] += static_cast<double>(reference::itrash_predicted_vs_real[index_of(c)][index_of(p)]);
    }
    n += weight[index_of(c)];
  }
  double analytic = 0;
  for (auto c : all_colors) {
    weight[index_of(c)] /= n;
    analytic += weight[index_of(c)] * table.rows[index_of(c)][index_of(c)];
  }
  Rng labels(424242);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < monte_carlo_items; ++i) {
    auto u = draw_unit(labels);
    auto real = u < weight[0] ? BinColor::blue : (u < weight[0] + weight[1] ? BinColor::yellow : BinColor::brown);
    if (classify_simulated(real, table, splitmix64(i + 1)).color() == real) {
      ++correct;
    }
  }
  double observed = static_cast<double>(correct) / static_cast<double>(monte_carlo_items);
  bool pass = std::fabs(observed - 0.8209) <= monte_carlo_tolerance &&
              std::fabs(observed - analytic) <= monte_carlo_tolerance;
  return { pass, fmt("observed %.4f over %zu items, analytic mixture %.4f, target 0.8209 +/- %.2f", observed,
                     monte_carlo_items, analytic, monte_carlo_tolerance) };
}

Outcome temporal_analytics()
{
  Rng rng(8080);
  const auto day0 = parse_iso8601("2024-03-04T00:00:00Z");
  double worst = 0;
  std::size_t series = 0;
  for (std::size_t round = 0; round < random_traces; ++round) {
    int days = 1 + static_cast<int>(draw_below(rng, 7));
    int slot_minutes = std::array{ 30, 60, 120, 240 }[draw_below(rng, 4)];
    std::vector<Timestamp> times;
    for (auto k = 1 + draw_below(rng, 500); k > 0; --k) {
      times.push_back(day0 + std::chrono::minutes{ draw_below(rng, static_cast<std::uint64_t>(days) * 1440) });
    }
    std::sort(times.begin(), times.end());
    std::vector<DisposalRecord> records;
    for (std::size_t i = 0; i < times.size(); ++i) {
      auto c = all_colors[draw_below(rng, 3)];
      records.emplace_back(format_uuid(round, i), "", times[i], c, c, c, SessionOutcome::unclaimed());
    }
    int span = days - static_cast<int>((std::chrono::floor<std::chrono::days>(times.front()) - day0) /
                                       std::chrono::days{ 1 });
    auto stats = temporal_stats(records, std::chrono::minutes{ slot_minutes }, span);
    auto counts = oracle::slot_counts(records, slot_minutes, span);
    for (std::size_t slot = 0; slot < stats.size(); ++slot) {
      for (auto c : all_colors) {
        const auto& got = stats[slot].of(c);
        auto want = oracle::box(counts[slot][index_of(c)]);
        ++series;
        for (auto [a, b] : { std::pair{ got.q1, want.q1 }, std::pair{ got.median, want.median },
                             std::pair{ got.q3, want.q3 }, std::pair{ got.iqr, want.iqr },
                             std::pair{ got.whisker_low, want.whisker_low },
                             std::pair{ got.whisker_high, want.whisker_high } }) {
          worst = std::max(worst, std::fabs(a - b));
        }
        if (got.outliers != want.outliers) {
          worst = std::max(worst, 1.0);
        }
      }
    }
  }

  const auto& r = canonical_replays();
  auto spec = canonical_itrash_scenario();
  auto hourly = temporal_stats(r.itrash, std::chrono::hours{ 1 }, spec.days);
  double midday = mean_over_hours(hourly, 11, 14);
  double off_peak = (3.0 * mean_over_hours(hourly, 8, 11) + 6.0 * mean_over_hours(hourly, 14, 20)) / 9.0;
  double ratio = off_peak > 0 ? midday / off_peak : 0.0;
  bool ratio_ok = std::fabs(ratio - midday_ratio_target) <= midday_ratio_tolerance * midday_ratio_target;
  return { worst <= oracle_tolerance && ratio_ok,
           fmt("%zu series from %zu traces, max oracle deviation %.3g; midday %.3f vs off-peak %.3f per hour-day, "
               "ratio %.2f (target 2 +/- 25%%)",
               series, random_traces, worst, midday, off_peak, ratio) };
}

}  // namespace

int main()
{
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
    { "accuracy-reproduction", accuracy_reproduction },
    { "flow-matrix-fidelity", flow_fidelity },
    { "follow-rate", follow_rates },
    { "exclusion-rule", exclusion_rule },
    { "fsm-properties", fsm_properties },
    { "ledger-properties", ledger_properties },
    { "classifier-statistics", classifier_statistics },
    { "temporal-analytics", temporal_analytics },
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = { false, std::string("threw: ") + e.what() };
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
