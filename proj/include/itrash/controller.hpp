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
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "itrash/domain.hpp"
#include "itrash/time.hpp"
#include "itrash/tokens.hpp"

namespace itrash {

enum class LedPattern : std::uint8_t
{
  ready,
  processing,
  error,
  solid_blue,
  solid_yellow,
  solid_brown,
};

constexpr LedPattern solid(BinColor c)
{
  switch (c) {
    case BinColor::blue: return LedPattern::solid_blue;
    case BinColor::yellow: return LedPattern::solid_yellow;
    case BinColor::brown: return LedPattern::solid_brown;
  }
  return LedPattern::error;
}

std::string_view to_string(LedPattern p);

enum class LcdScreen : std::uint8_t
{
  instructions,
  try_again,
  show_qr_prompt,
  ngo_menu,
  reward_sent,
};

std::string_view to_string(LcdScreen s);

struct ControllerConfig
{
  Duration disposal_timeout = std::chrono::seconds{ 10 };
  Duration reward_timeout = std::chrono::seconds{ 10 };
  Duration donate_timeout = std::chrono::seconds{ 30 };
  /// How long the error pattern stays up after an unreadable image.
  Duration retry_linger = std::chrono::seconds{ 3 };
  /// Bound on Capturing + Classifying; expiry is treated like an unreadable
  /// image.
  Duration capture_timeout = std::chrono::seconds{ 5 };
  TokenAmount reward_amount = TokenAmount::from_micro(10'000);

  /// Throws invalid_argument unless every duration and the reward are > 0.
  void validate() const;
};

namespace state {
struct Idle
{
  friend bool operator==(const Idle&, const Idle&) = default;
};
struct Capturing
{
  Timestamp deadline;
  friend bool operator==(const Capturing&, const Capturing&) = default;
};
struct Classifying
{
  Timestamp deadline;
  friend bool operator==(const Classifying&, const Classifying&) = default;
};
struct PromptRetry
{
  Timestamp until;
  friend bool operator==(const PromptRetry&, const PromptRetry&) = default;
};
struct AwaitDisposal
{
  BinColor predicted;
  Timestamp deadline;
  friend bool operator==(const AwaitDisposal&, const AwaitDisposal&) = default;
};
struct RewardPrompt
{
  Timestamp deadline;
  friend bool operator==(const RewardPrompt&, const RewardPrompt&) = default;
};
struct DonateMenu
{
  Timestamp deadline;
  friend bool operator==(const DonateMenu&, const DonateMenu&) = default;
};
struct Finalizing
{
  SessionOutcome outcome;
  friend bool operator==(const Finalizing&, const Finalizing&) = default;
};
}  // namespace state

using Phase = std::variant<state::Idle,
                           state::Capturing,
                           state::Classifying,
                           state::PromptRetry,
                           state::AwaitDisposal,
                           state::RewardPrompt,
                           state::DonateMenu,
                           state::Finalizing>;

/// What the controller remembers about the interaction in progress.
struct SessionData
{
  std::string record_id;
  std::string image;
  Timestamp started{};
  std::optional<BinColor> predicted;
  std::optional<BinColor> thrown;

  friend bool operator==(const SessionData&, const SessionData&) = default;
};

struct ControllerState
{
  Phase phase = state::Idle{};
  SessionData session;
  /// Sessions started so far; feeds record id generation.
  std::uint64_t session_counter = 0;
  /// Per-installation salt for record ids.
  std::uint64_t id_salt = 0;

  [[nodiscard]] bool idle() const
  {
    return std::holds_alternative<state::Idle>(phase);
  }

  friend bool operator==(const ControllerState&, const ControllerState&) = default;
};

/// "Idle", "Capturing", ..., matching the state vocabulary.
std::string_view state_name(const Phase& phase);
std::optional<Timestamp> state_deadline(const Phase& phase);

namespace event {
struct MainProximityTriggered
{
  friend bool operator==(const MainProximityTriggered&,
                         const MainProximityTriggered&) = default;
};
struct ImageCaptured
{
  std::string image;
  friend bool operator==(const ImageCaptured&, const ImageCaptured&) = default;
};
struct Classified
{
  ClassificationOutcome outcome;
  friend bool operator==(const Classified&, const Classified&) = default;
};
struct BinSensorTriggered
{
  BinColor bin;
  friend bool operator==(const BinSensorTriggered&,
                         const BinSensorTriggered&) = default;
};
struct QrScanned
{
  std::string payload;
  friend bool operator==(const QrScanned&, const QrScanned&) = default;
};
struct NgoSelected
{
  int ngo_id;
  friend bool operator==(const NgoSelected&, const NgoSelected&) = default;
};
struct Tick
{
  Timestamp now;
  friend bool operator==(const Tick&, const Tick&) = default;
};
}  // namespace event

using ControllerEvent = std::variant<event::MainProximityTriggered,
                                     event::ImageCaptured,
                                     event::Classified,
                                     event::BinSensorTriggered,
                                     event::QrScanned,
                                     event::NgoSelected,
                                     event::Tick>;

std::string_view event_name(const ControllerEvent& e);

struct RewardDestination
{
  enum class Kind : std::uint8_t
  {
    user_wallet,
    ngo,
  };
  Kind kind = Kind::ngo;
  std::string address;  // user_wallet only
  int ngo_id = 0;       // ngo only

  friend bool operator==(const RewardDestination&, const RewardDestination&) = default;
};

namespace effect {
struct CaptureImage
{
  friend bool operator==(const CaptureImage&, const CaptureImage&) = default;
};
struct RunClassifier
{
  std::string image;
  friend bool operator==(const RunClassifier&, const RunClassifier&) = default;
};
struct SetLed
{
  LedPattern pattern;
  friend bool operator==(const SetLed&, const SetLed&) = default;
};
struct ShowLcd
{
  LcdScreen screen;
  friend bool operator==(const ShowLcd&, const ShowLcd&) = default;
};
struct PersistRecord
{
  DisposalRecord record;
  friend bool operator==(const PersistRecord&, const PersistRecord&) = default;
};
struct IssueReward
{
  RewardDestination destination;
  TokenAmount amount;
  /// The session's record id; the ledger pays at most once per memo.
  std::string memo;
  friend bool operator==(const IssueReward&, const IssueReward&) = default;
};
}  // namespace effect

using SideEffect = std::variant<effect::CaptureImage,
                                effect::RunClassifier,
                                effect::SetLed,
                                effect::ShowLcd,
                                effect::PersistRecord,
                                effect::IssueReward>;

struct StepResult
{
  ControllerState state;
  std::vector<SideEffect> effects;
};

/// The transition function. Total and pure: unlisted (state, event) pairs
/// return the state unchanged with no effects.
StepResult step(const ControllerState& current,
                const ControllerEvent& event,
                const ControllerConfig& config,
                Timestamp now);

struct TimedEvent
{
  Timestamp at;
  ControllerEvent event;
};

struct TimedEffect
{
  Timestamp at;
  SideEffect effect;
};

struct SessionRun
{
  /// The first persisted record, if any.
  std::optional<DisposalRecord> record;
  std::vector<TimedEffect> effects;
  ControllerState final_state;
};

/// Drives step() over a bounded, time-ordered event list. Throws out_of_order
/// if timestamps regress.
SessionRun run_session(std::span<const TimedEvent> events,
                       const ControllerConfig& config,
                       ControllerState initial = {});

nlohmann::json to_json(const SideEffect& e);
nlohmann::json to_json(const ControllerEvent& e);

/// One JSON object per line: {"at": ..., "effect": ..., ...}.
std::string effect_log_jsonl(std::span<const TimedEffect> effects);

}  // namespace itrash
