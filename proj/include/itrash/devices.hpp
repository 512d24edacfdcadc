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
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "itrash/controller.hpp"
#include "itrash/domain.hpp"
#include "itrash/time.hpp"

namespace itrash {

/// Injectable time source. Only moves forward.
class VirtualClock
{
public:
  explicit VirtualClock(Timestamp start = Timestamp{})
    : now_(start)
  {
  }

  [[nodiscard]] Timestamp now() const
  {
    return now_;
  }

  /// Throws invalid_argument for negative durations; advance(0) is a no-op.
  void advance(Duration d);
  /// Throws out_of_order if t is in the past.
  void advance_to(Timestamp t);

private:
  Timestamp now_;
};

/// One of the four proximity inputs, the camera, or the two reward inputs
/// (QR scan, NGO choice) that reach the controller.
struct Channel
{
  enum class Kind : std::uint8_t
  {
    main_proximity,
    bin_proximity,
    camera,
    qr,
    ngo,
  };
  Kind kind = Kind::main_proximity;
  BinColor bin = BinColor::blue;  // bin_proximity only

  static constexpr Channel main() { return { Kind::main_proximity, BinColor::blue }; }
  static constexpr Channel bin_sensor(BinColor c) { return { Kind::bin_proximity, c }; }
  static constexpr Channel camera() { return { Kind::camera, BinColor::blue }; }
  static constexpr Channel qr() { return { Kind::qr, BinColor::blue }; }
  static constexpr Channel ngo() { return { Kind::ngo, BinColor::blue }; }

  friend bool operator==(const Channel& a, const Channel& b)
  {
    return a.kind == b.kind && (a.kind != Kind::bin_proximity || a.bin == b.bin);
  }
};

/// "main_proximity", "bin_proximity[yellow]", "camera", "qr", "ngo".
std::string to_string(const Channel& c);
/// Throws unknown_channel.
Channel parse_channel(std::string_view text);

/// A scripted input: at time `at`, `channel` fires carrying `payload`
/// (image bytes for the camera, QR text, NGO id digits).
struct Stimulus
{
  Timestamp at;
  Channel channel;
  std::string payload;

  friend bool operator==(const Stimulus&, const Stimulus&) = default;
};

/// {"at": ISO-8601 ms, "channel": ..., "payload": text}. Camera payloads are
/// base64 in JSON so arbitrary image bytes survive.
nlohmann::json to_json(const Stimulus& s);
Stimulus stimulus_from_json(const nlohmann::json& j);

/// Translates a stimulus into the controller event it produces. Throws
/// parse_error for an NGO payload that is not a number.
ControllerEvent to_event(const Stimulus& s);

struct EmittedEvent
{
  Timestamp at;
  ControllerEvent event;
  /// Source stimulus payload; empty for ticks.
  std::string payload;
  std::optional<Channel> channel;
};

/// Turns scripted stimuli into a time-ordered controller event stream,
/// interleaving periodic ticks. Stimuli may be injected from any thread;
/// advancing is single-consumer.
class StimulusScheduler
{
public:
  explicit StimulusScheduler(VirtualClock& clock,
                             Duration tick_interval = std::chrono::milliseconds{ 100 });

  /// Returns the injection sequence number. Throws invalid_argument if
  /// s.at < clock.now().
  std::uint64_t inject(Stimulus s);

  /// Moves the clock forward by d and returns the due stimuli and ticks in
  /// timestamp order. At equal timestamps stimuli come first, in injection
  /// order, then the tick.
  std::vector<EmittedEvent> advance(Duration d);

  /// Jumps the clock to t without emitting ticks, for skipping quiet
  /// periods. Throws out_of_order if a pending stimulus is due before t.
  void fast_forward(Timestamp t);

  [[nodiscard]] std::optional<Timestamp> next_due() const;
  [[nodiscard]] std::size_t pending() const;
  [[nodiscard]] Duration tick_interval() const
  {
    return tick_interval_;
  }
  [[nodiscard]] const VirtualClock& clock() const
  {
    return clock_;
  }

private:
  VirtualClock& clock_;
  Duration tick_interval_;
  Timestamp next_tick_;
  std::uint64_t next_seq_ = 0;
  mutable std::mutex intake_;
  std::map<std::pair<Timestamp, std::uint64_t>, Stimulus> queue_;
};

/// Binary proximity input; keeps the times it fired.
class ProximitySensor
{
public:
  void trigger(Timestamp at)
  {
    triggers_.push_back(at);
  }
  [[nodiscard]] const std::vector<Timestamp>& history() const
  {
    return triggers_;
  }

private:
  std::vector<Timestamp> triggers_;
};

/// Simulated camera. A staged frame, if any, is delivered as soon as a
/// capture is requested; otherwise the frame arrives as a camera stimulus.
class Camera
{
public:
  void stage(std::string frame)
  {
    staged_ = std::move(frame);
  }
  std::optional<std::string> request_capture(Timestamp at);
  [[nodiscard]] const std::vector<Timestamp>& requests() const
  {
    return requests_;
  }

private:
  std::optional<std::string> staged_;
  std::vector<Timestamp> requests_;
};

template<typename T>
class RecordingSink
{
public:
  explicit RecordingSink(T initial)
    : current_(initial)
  {
  }

  void set(T value, Timestamp at)
  {
    current_ = value;
    history_.emplace_back(at, value);
  }
  [[nodiscard]] T current() const
  {
    return current_;
  }
  [[nodiscard]] const std::vector<std::pair<Timestamp, T>>& history() const
  {
    return history_;
  }

private:
  T current_;
  std::vector<std::pair<Timestamp, T>> history_;
};

using LedStrip = RecordingSink<LedPattern>;
using LcdDisplay = RecordingSink<LcdScreen>;

/// Proximity sensor I sits by the camera; II-IV sit over the bins.
struct DevicePort
{
  ProximitySensor main_proximity;
  std::map<BinColor, ProximitySensor> bin_proximity{ { BinColor::blue, {} },
                                                     { BinColor::yellow, {} },
                                                     { BinColor::brown, {} } };
  Camera camera;
  LedStrip led{ LedPattern::ready };
  LcdDisplay lcd{ LcdScreen::instructions };

  /// Records the trigger on the matching proximity sensor, if any.
  void note(const EmittedEvent& e);
};

}  // namespace itrash
