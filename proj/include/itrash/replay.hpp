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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "itrash/controller.hpp"
#include "itrash/devices.hpp"
#include "itrash/event_store.hpp"
#include "itrash/ledger.hpp"

namespace itrash {

enum class TrashcanKind
{
  /// Camera, classifier, LEDs and rewards.
  itrash,
  /// Plain bins: only the bin sensors exist and nothing is predicted.
  control,
};

/// A group of identical items. For itrash scenarios `predicted` is required
/// and `thrown` absent means the item was shown but never disposed. For
/// control scenarios `predicted` is absent and `thrown` required.
struct ItemCell
{
  std::optional<BinColor> real;
  std::optional<BinColor> predicted;
  std::optional<BinColor> thrown;
  std::size_t count = 0;
};

struct ScenarioSpec
{
  std::string name;
  TrashcanKind kind = TrashcanKind::itrash;
  int days = 5;
  int day_start_hour = 8;
  int day_length_hours = 12;
  /// First experiment day, "YYYY-MM-DD" (UTC).
  std::string start_date = "2024-03-04";
  std::vector<ItemCell> cells;
  std::size_t declared_total = 0;
  /// Relative weight per hour of the day window (day_length_hours entries);
  /// empty means uniform.
  std::vector<double> hour_weights;
  /// Followed sessions that donate to an NGO / scan a wallet QR code.
  std::size_t ngo_donations = 0;
  std::size_t qr_claims = 0;

  /// Throws inconsistent_spec.
  void validate() const;
  [[nodiscard]] std::size_t total() const;
};

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
ScenarioSpec load_scenario(const std::filesystem::path& path);

/// 67 disposed items matching the published flows plus 12 shown but not
/// disposed.
ScenarioSpec canonical_itrash_scenario();
/// 89 items thrown into plain bins.
ScenarioSpec canonical_control_scenario();
/// Uniform weights with the 11:00-14:00 hours doubled.
std::vector<double> midday_peak_weights(int day_start_hour, int day_length_hours);

struct TraceMeta
{
  std::string name;
  TrashcanKind kind = TrashcanKind::itrash;
  int days = 5;
  int day_start_hour = 8;
  int day_length_hours = 12;
  std::string start_date;
  std::uint64_t seed = 0;
};

struct EventTrace
{
  TraceMeta meta;
  std::vector<Stimulus> stimuli;

  [[nodiscard]] std::size_t sessions() const;
};

/// First line {"meta": {...}}, then one stimulus per line.
void write_trace(const EventTrace& trace, std::ostream& out);
EventTrace read_trace(std::istream& in);

/// One session per item, timestamps drawn deterministically from the hour
/// weights. Equal (spec, seed) give identical traces.
EventTrace generate_trace(const ScenarioSpec& spec, std::uint64_t seed);

struct ReplayResult
{
  std::unique_ptr<EventStore> store;
  std::unique_ptr<Ledger> ledger;
  RewardAccounts accounts;
  std::vector<TimedEffect> effects;
  std::size_t presented = 0;
  std::vector<std::string> failures;
};

struct ReplayOptions
{
  ControllerConfig config;
  Duration tick_interval = std::chrono::milliseconds{ 100 };
  TokenAmount itrash_balance = TokenAmount::whole(100);
  /// Backing file for the store; in memory when absent.
  std::optional<std::filesystem::path> store_path;
};

/// Runs the trace through the controller under a virtual clock, then applies
/// the ground-truth labels carried by the item tags as bin_real.
ReplayResult replay(const EventTrace& trace, const ReplayOptions& options = {});

}  // namespace itrash
