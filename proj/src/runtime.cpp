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

#include "itrash/runtime.hpp"

#include <iostream>

#include "itrash/error.hpp"

namespace itrash {

nlohmann::json to_json(const StateUpdate& u)
{
  nlohmann::json j{ { "state", u.state },
                    { "led", to_string(u.led) },
                    { "lcd", to_string(u.lcd) },
                    { "time", format_iso8601_ms(u.time) } };
  j["deadline"] = u.deadline ? nlohmann::json(format_iso8601_ms(*u.deadline)) : nlohmann::json(nullptr);
  j["predicted"] =
    u.predicted ? nlohmann::json(std::string(to_string(*u.predicted))) : nlohmann::json(nullptr);
  return j;
}

ControllerRuntime::ControllerRuntime(Wiring wiring)
  : wiring_(std::move(wiring))
{
  wiring_.config.validate();
  state_.id_salt = wiring_.id_salt;
}

void ControllerRuntime::submit(TimedEvent e)
{
  std::lock_guard lock(mutex_);
  queue_.push_back(std::move(e));
  drain_locked();
}

void ControllerRuntime::feed(std::span<const EmittedEvent> events)
{
  std::lock_guard lock(mutex_);
  for (const auto& e : events) {
    wiring_.devices.note(e);
    queue_.push_back({ e.at, e.event });
    drain_locked();
  }
}

void ControllerRuntime::drain_locked()
{
  while (!queue_.empty()) {
    auto te = std::move(queue_.front());
    queue_.pop_front();
    // Late producers are clamped so the machine never sees time regress.
    auto now = std::max(te.at, last_time_);
    last_time_ = now;
    if (auto* tick = std::get_if<event::Tick>(&te.event)) {
      tick->now = now;
    }
    auto before = state_name(state_.phase);
    auto result = step(state_, te.event, wiring_.config, now);
    state_ = std::move(result.state);
    bool visible = state_name(state_.phase) != before;
    for (const auto& e : result.effects) {
      log_.push_back({ now, e });
      apply_locked(e, now);
      visible = visible || std::holds_alternative<effect::SetLed>(e) ||
                std::holds_alternative<effect::ShowLcd>(e);
    }
    if (visible && !observers_.empty()) {
      auto update = snapshot_locked();
      for (const auto& [id, observer] : observers_) {
        observer(update);
      }
    }
  }
}

void ControllerRuntime::apply_locked(const SideEffect& e, Timestamp at)
{
  auto& dev = wiring_.devices;
  if (std::holds_alternative<effect::CaptureImage>(e)) {
    if (auto frame = dev.camera.request_capture(at)) {
      queue_.push_back({ at, event::ImageCaptured{ std::move(*frame) } });
    }
  } else if (auto* run = std::get_if<effect::RunClassifier>(&e)) {
    ClassificationOutcome outcome = ClassificationOutcome::invalid();
    try {
      outcome = wiring_.classifier.classify(run->image);
    } catch (const std::exception& ex) {
      failures_.push_back(std::string("classifier: ") + ex.what());
      std::clog << "warning: classifier failed: " << ex.what() << '\n';
    }
    queue_.push_back({ at, event::Classified{ outcome } });
  } else if (auto* led = std::get_if<effect::SetLed>(&e)) {
    dev.led.set(led->pattern, at);
  } else if (auto* lcd = std::get_if<effect::ShowLcd>(&e)) {
    dev.lcd.set(lcd->screen, at);
  } else if (auto* persist = std::get_if<effect::PersistRecord>(&e)) {
    try {
      wiring_.store.append(persist->record);
    } catch (const Error& ex) {
      failures_.push_back(std::string("store: ") + ex.what());
      std::clog << "error: could not persist " << persist->record.record_id() << ": "
                << ex.what() << '\n';
    }
  } else if (auto* reward = std::get_if<effect::IssueReward>(&e)) {
    try {
      const auto& dest = reward->destination.kind == RewardDestination::Kind::ngo
                           ? wiring_.accounts.ngo(reward->destination.ngo_id)
                           : reward->destination.address;
      wiring_.ledger.transfer(wiring_.accounts.itrash, dest, reward->amount, reward->memo, at);
    } catch (const Error& ex) {
      failures_.push_back(std::string("ledger: ") + ex.what());
      std::clog << "error: reward for " << reward->memo << " failed: " << ex.what() << '\n';
    }
  }
}

std::string ControllerRuntime::donate(int ngo_id, Timestamp now)
{
  check_ngo_id(ngo_id);
  std::lock_guard lock(mutex_);
  if (!std::holds_alternative<state::DonateMenu>(state_.phase)) {
    throw Error(ErrorCode::no_active_session, "no session is waiting for a donation choice");
  }
  auto failures_before = failures_.size();
  queue_.push_back({ now, event::NgoSelected{ ngo_id } });
  drain_locked();
  if (failures_.size() != failures_before) {
    throw Error(ErrorCode::transport, failures_.back());
  }
  return std::string(reward_sent_message);
}

std::size_t ControllerRuntime::subscribe(Observer observer)
{
  std::lock_guard lock(mutex_);
  auto id = next_observer_++;
  observers_.emplace_back(id, std::move(observer));
  return id;
}

void ControllerRuntime::unsubscribe(std::size_t id)
{
  std::lock_guard lock(mutex_);
  std::erase_if(observers_, [id](const auto& entry) { return entry.first == id; });
}

ControllerState ControllerRuntime::state() const
{
  std::lock_guard lock(mutex_);
  return state_;
}

StateUpdate ControllerRuntime::snapshot_locked() const
{
  StateUpdate u;
  u.state = std::string(state_name(state_.phase));
  u.led = wiring_.devices.led.current();
  u.lcd = wiring_.devices.lcd.current();
  u.time = last_time_;
  u.deadline = state_deadline(state_.phase);
  if (auto* await = std::get_if<state::AwaitDisposal>(&state_.phase)) {
    u.predicted = await->predicted;
  }
  return u;
}

StateUpdate ControllerRuntime::snapshot() const
{
  std::lock_guard lock(mutex_);
  return snapshot_locked();
}

std::vector<TimedEffect> ControllerRuntime::effect_log() const
{
  std::lock_guard lock(mutex_);
  return log_;
}

std::vector<std::string> ControllerRuntime::failures() const
{
  std::lock_guard lock(mutex_);
  return failures_;
}

}  // namespace itrash
