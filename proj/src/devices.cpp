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

#include "itrash/devices.hpp"

#include <charconv>

#include "itrash/error.hpp"

namespace itrash {

void VirtualClock::advance(Duration d)
{
  if (d < Duration::zero()) {
    throw Error(ErrorCode::invalid_argument, "cannot advance the clock backwards");
  }
  now_ += d;
}

void VirtualClock::advance_to(Timestamp t)
{
  if (t < now_) {
    throw Error(ErrorCode::out_of_order,
                format_iso8601_ms(t) + " is before " + format_iso8601_ms(now_));
  }
  now_ = t;
}

std::string to_string(const Channel& c)
{
  switch (c.kind) {
    case Channel::Kind::main_proximity: return "main_proximity";
    case Channel::Kind::bin_proximity:
      return "bin_proximity[" + std::string(to_string(c.bin)) + "]";
    case Channel::Kind::camera: return "camera";
    case Channel::Kind::qr: return "qr";
    case Channel::Kind::ngo: return "ngo";
  }
  return "camera";
}

Channel parse_channel(std::string_view text)
{
  if (text == "main_proximity") {
    return Channel::main();
  }
  if (text == "camera") {
    return Channel::camera();
  }
  if (text == "qr") {
    return Channel::qr();
  }
  if (text == "ngo") {
    return Channel::ngo();
  }
  constexpr std::string_view bin_prefix = "bin_proximity[";
  if (text.size() > bin_prefix.size() + 1 && text.substr(0, bin_prefix.size()) == bin_prefix &&
      text.back() == ']') {
    auto name = text.substr(bin_prefix.size(), text.size() - bin_prefix.size() - 1);
    if (auto c = parse_color(name)) {
      return Channel::bin_sensor(*c);
    }
  }
  throw Error(ErrorCode::unknown_channel, "unknown channel '" + std::string(text) + "'");
}

nlohmann::json to_json(const Stimulus& s)
{
  nlohmann::json j{ { "at", format_iso8601_ms(s.at) }, { "channel", to_string(s.channel) } };
  if (s.channel.kind == Channel::Kind::camera) {
    j["payload"] = base64_encode(s.payload);
  } else {
    j["payload"] = s.payload;
  }
  return j;
}

Stimulus stimulus_from_json(const nlohmann::json& j)
{
  if (!j.is_object() || !j.contains("at") || !j.contains("channel")) {
    throw Error(ErrorCode::parse_error, "stimulus needs 'at' and 'channel'");
  }
  Stimulus s{ parse_iso8601(j.at("at").get<std::string>()),
              parse_channel(j.at("channel").get<std::string>()),
              {} };
  if (auto it = j.find("payload"); it != j.end() && !it->is_null()) {
    auto text = it->get<std::string>();
    s.payload = s.channel.kind == Channel::Kind::camera ? base64_decode(text) : text;
  }
  return s;
}

ControllerEvent to_event(const Stimulus& s)
{
  switch (s.channel.kind) {
    case Channel::Kind::main_proximity: return event::MainProximityTriggered{};
    case Channel::Kind::bin_proximity: return event::BinSensorTriggered{ s.channel.bin };
    case Channel::Kind::camera: return event::ImageCaptured{ s.payload };
    case Channel::Kind::qr: return event::QrScanned{ s.payload };
    case Channel::Kind::ngo: {
      int id = 0;
      auto [ptr, ec] = std::from_chars(s.payload.data(), s.payload.data() + s.payload.size(), id);
      if (ec != std::errc{} || ptr != s.payload.data() + s.payload.size()) {
        throw Error(ErrorCode::parse_error, "ngo payload '" + s.payload + "' is not a number");
      }
      return event::NgoSelected{ id };
    }
  }
  return event::MainProximityTriggered{};
}

StimulusScheduler::StimulusScheduler(VirtualClock& clock, Duration tick_interval)
  : clock_(clock)
  , tick_interval_(tick_interval)
  , next_tick_(clock.now() + tick_interval)
{
  if (tick_interval <= Duration::zero()) {
    throw Error(ErrorCode::invalid_argument, "tick interval must be > 0");
  }
}

std::uint64_t StimulusScheduler::inject(Stimulus s)
{
  // Validate the payload now rather than when it comes due.
  (void)to_event(s);
  std::lock_guard lock(intake_);
  if (s.at < clock_.now()) {
    throw Error(ErrorCode::invalid_argument,
                "stimulus at " + format_iso8601_ms(s.at) + " is in the past");
  }
  auto seq = next_seq_++;
  queue_.emplace(std::pair{ s.at, seq }, std::move(s));
  return seq;
}

std::vector<EmittedEvent> StimulusScheduler::advance(Duration d)
{
  if (d < Duration::zero()) {
    throw Error(ErrorCode::invalid_argument, "cannot advance by a negative duration");
  }
  const auto target = clock_.now() + d;
  std::vector<EmittedEvent> out;
  while (true) {
    std::optional<Stimulus> next;
    {
      std::lock_guard lock(intake_);
      if (!queue_.empty() && queue_.begin()->first.first <= target &&
          queue_.begin()->first.first <= next_tick_) {
        next = std::move(queue_.begin()->second);
        queue_.erase(queue_.begin());
      }
    }
    if (next) {
      clock_.advance_to(std::max(clock_.now(), next->at));
      auto ev = to_event(*next);
      out.push_back({ next->at, std::move(ev), std::move(next->payload), next->channel });
      continue;
    }
    if (next_tick_ <= target) {
      clock_.advance_to(next_tick_);
      out.push_back({ next_tick_, event::Tick{ next_tick_ }, {}, std::nullopt });
      next_tick_ += tick_interval_;
      continue;
    }
    break;
  }
  clock_.advance_to(target);
  return out;
}

void StimulusScheduler::fast_forward(Timestamp t)
{
  std::lock_guard lock(intake_);
  if (!queue_.empty() && queue_.begin()->first.first < t) {
    throw Error(ErrorCode::out_of_order, "a stimulus is due before " + format_iso8601_ms(t));
  }
  clock_.advance_to(t);
  next_tick_ = t + tick_interval_;
}

std::optional<Timestamp> StimulusScheduler::next_due() const
{
  std::lock_guard lock(intake_);
  if (queue_.empty()) {
    return std::nullopt;
  }
  return queue_.begin()->first.first;
}

std::size_t StimulusScheduler::pending() const
{
  std::lock_guard lock(intake_);
  return queue_.size();
}

std::optional<std::string> Camera::request_capture(Timestamp at)
{
  requests_.push_back(at);
  return std::exchange(staged_, std::nullopt);
}

void DevicePort::note(const EmittedEvent& e)
{
  if (!e.channel) {
    return;
  }
  if (e.channel->kind == Channel::Kind::main_proximity) {
    main_proximity.trigger(e.at);
  } else if (e.channel->kind == Channel::Kind::bin_proximity) {
    bin_proximity[e.channel->bin].trigger(e.at);
  }
}

}  // namespace itrash
