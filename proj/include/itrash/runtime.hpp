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
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "itrash/classifier.hpp"
#include "itrash/controller.hpp"
#include "itrash/devices.hpp"
#include "itrash/event_store.hpp"
#include "itrash/ledger.hpp"

namespace itrash {

/// What a kiosk display needs after every visible change.
struct StateUpdate
{
  std::string state;
  LedPattern led = LedPattern::ready;
  LcdScreen lcd = LcdScreen::instructions;
  Timestamp time;
  std::optional<Timestamp> deadline;
  std::optional<BinColor> predicted;
};

nlohmann::json to_json(const StateUpdate& u);

/// Runs the transition function against real ports: executes effects on the
/// devices, classifier, ledger and store, and feeds resulting events back.
///
/// Events from any thread go through one queue; whichever caller holds the
/// lock drains it, so transitions are applied one at a time in order.
class ControllerRuntime
{
public:
  struct Wiring
  {
    ControllerConfig config;
    ClassifierPort& classifier;
    LedgerPort& ledger;
    RewardAccounts accounts;
    EventStore& store;
    DevicePort& devices;
    std::uint64_t id_salt = 0;
  };

  explicit ControllerRuntime(Wiring wiring);

  void submit(TimedEvent e);
  void feed(std::span<const EmittedEvent> events);

  /// Selects an NGO for the session waiting in DonateMenu and returns the
  /// confirmation text. Throws invalid_ngo or no_active_session.
  std::string donate(int ngo_id, Timestamp now);

  using Observer = std::function<void(const StateUpdate&)>;
  /// Observers run on the draining thread, in transition order.
  std::size_t subscribe(Observer observer);
  void unsubscribe(std::size_t id);

  [[nodiscard]] ControllerState state() const;
  [[nodiscard]] StateUpdate snapshot() const;
  [[nodiscard]] std::vector<TimedEffect> effect_log() const;
  /// Effects that could not be carried out (ledger refusals, store errors).
  [[nodiscard]] std::vector<std::string> failures() const;
  [[nodiscard]] const ControllerConfig& config() const
  {
    return wiring_.config;
  }

private:
  void drain_locked();
  void apply_locked(const SideEffect& e, Timestamp at);
  StateUpdate snapshot_locked() const;

  Wiring wiring_;
  mutable std::recursive_mutex mutex_;
  ControllerState state_;
  Timestamp last_time_{};
  std::deque<TimedEvent> queue_;
  std::vector<TimedEffect> log_;
  std::vector<std::string> failures_;
  std::vector<std::pair<std::size_t, Observer>> observers_;
  std::size_t next_observer_ = 0;
};

}  // namespace itrash
