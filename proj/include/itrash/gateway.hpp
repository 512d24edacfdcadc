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

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "itrash/devices.hpp"
#include "itrash/error.hpp"
#include "itrash/event_store.hpp"
#include "itrash/ledger.hpp"
#include "itrash/runtime.hpp"

namespace httplib {
class Server;
}

namespace itrash {

struct GatewayOptions
{
  std::string host = "127.0.0.1";
  /// 0 picks a free port.
  int port = 0;
  /// Enables POST /stimulus and POST /clock/advance.
  bool simulation = true;
  /// When set, a background thread advances the virtual clock by the
  /// scheduler's tick interval at this wall-clock period.
  std::optional<Duration> realtime_period;
  Duration heartbeat = std::chrono::seconds{ 10 };
};

/// HTTP status used for an error code.
int http_status(ErrorCode code);

/// HTTP front end over a running controller. Every write goes through the
/// scheduler or the runtime queue; reads take snapshots.
class Gateway
{
public:
  struct Handles
  {
    ControllerRuntime& runtime;
    StimulusScheduler& scheduler;
    VirtualClock& clock;
    LedgerPort& ledger;
    EventStore& store;
  };

  Gateway(Handles handles, GatewayOptions options = {});
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Binds and starts serving on a background thread. Returns the bound
  /// port. Throws transport if the port cannot be bound.
  int start();
  void stop();
  /// Serves on the calling thread until stop() is called elsewhere.
  void run();

  [[nodiscard]] int port() const
  {
    return port_;
  }
  [[nodiscard]] std::size_t subscribers() const;

  /// Delivers due stimuli and ticks to the controller. Exposed for the
  /// realtime ticker and for tests.
  StateUpdate pump(Duration d);

private:
  struct Subscriber
  {
    std::mutex mutex;
    std::condition_variable wake;
    std::deque<std::string> pending;
    bool closed = false;
  };

  void install_routes();
  int bind();
  void broadcast(const StateUpdate& u);
  void close_subscribers();

  Handles h_;
  GatewayOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex pump_mutex_;
  mutable std::mutex subs_mutex_;
  std::vector<std::shared_ptr<Subscriber>> subs_;
  std::size_t observer_id_ = 0;
  int port_ = 0;
  std::thread server_thread_;
  std::thread ticker_thread_;
  std::atomic<bool> running_{ false };
  std::mutex ticker_mutex_;
  std::condition_variable ticker_wake_;
};

}  // namespace itrash
