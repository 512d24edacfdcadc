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

#include "itrash/gateway.hpp"

#include <httplib.h>

#include <iostream>
#include <sstream>

namespace itrash {

namespace {

constexpr auto json_type = "application/json";

void send_json(httplib::Response& res, int status, const nlohmann::json& body)
{
  res.status = status;
  res.set_content(body.dump(), json_type);
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message)
{
  send_json(res, status, { { "error", code }, { "message", message } });
}

nlohmann::json parse_body(const httplib::Request& req)
{
  if (req.body.empty()) {
    return nlohmann::json::object();
  }
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) {
      throw Error(ErrorCode::parse_error, "request body must be a JSON object");
    }
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("request body: ") + e.what());
  }
}

std::string sse_frame(const StateUpdate& u)
{
  return "event: state\ndata: " + to_json(u).dump() + "\n\n";
}

}  // namespace

int http_status(ErrorCode code)
{
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::missing_field:
    case ErrorCode::invalid_record:
    case ErrorCode::parse_error:
    case ErrorCode::unknown_channel:
    case ErrorCode::malformed_payload:
    case ErrorCode::invalid_ngo:
    case ErrorCode::non_positive_amount:
      return 400;
    case ErrorCode::unknown_record:
    case ErrorCode::unknown_address:
      return 404;
    case ErrorCode::no_active_session:
    case ErrorCode::out_of_order:
    case ErrorCode::duplicate_record:
    case ErrorCode::duplicate_memo:
    case ErrorCode::insufficient_funds:
      return 409;
    case ErrorCode::transport:
      return 502;
    case ErrorCode::unsupported:
      return 501;
    default:
      return 500;
  }
}

Gateway::Gateway(Handles handles, GatewayOptions options)
  : h_(handles)
  , options_(std::move(options))
  , server_(std::make_unique<httplib::Server>())
{
  observer_id_ = h_.runtime.subscribe([this](const StateUpdate& u) { broadcast(u); });
  install_routes();
}

Gateway::~Gateway()
{
  stop();
  h_.runtime.unsubscribe(observer_id_);
}

StateUpdate Gateway::pump(Duration d)
{
  std::lock_guard lock(pump_mutex_);
  auto events = h_.scheduler.advance(d);
  h_.runtime.feed(events);
  return h_.runtime.snapshot();
}

void Gateway::broadcast(const StateUpdate& u)
{
  auto frame = sse_frame(u);
  std::lock_guard lock(subs_mutex_);
  for (const auto& sub : subs_) {
    {
      std::lock_guard sub_lock(sub->mutex);
      sub->pending.push_back(frame);
    }
    sub->wake.notify_one();
  }
}

void Gateway::close_subscribers()
{
  std::lock_guard lock(subs_mutex_);
  for (const auto& sub : subs_) {
    {
      std::lock_guard sub_lock(sub->mutex);
      sub->closed = true;
    }
    sub->wake.notify_one();
  }
}

std::size_t Gateway::subscribers() const
{
  std::lock_guard lock(subs_mutex_);
  return subs_.size();
}

void Gateway::install_routes()
{
  auto& srv = *server_;

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, http_status(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });

  srv.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
    auto update = h_.runtime.snapshot();
    if (update.time == Timestamp{}) {
      update.time = h_.clock.now();
    }
    send_json(res, 200, to_json(update));
  });

  srv.Get(R"(/donate/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
    int ngo_id = 0;
    try {
      ngo_id = std::stoi(req.matches[1].str());
    } catch (const std::out_of_range&) {
      throw Error(ErrorCode::invalid_ngo, "ngo id out of range");
    }
    std::string message;
    {
      std::lock_guard lock(pump_mutex_);
      message = h_.runtime.donate(ngo_id, h_.clock.now());
    }
    send_json(res, 200, { { "message", message }, { "ngo_id", ngo_id } });
  });

  srv.Post("/qr", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    if (!body.contains("payload") || !body["payload"].is_string()) {
      throw Error(ErrorCode::missing_field, "body needs a string 'payload'");
    }
    auto payload = body["payload"].get<std::string>();
    auto address = parse_qr(payload);
    std::lock_guard lock(pump_mutex_);
    if (!std::holds_alternative<state::RewardPrompt>(h_.runtime.state().phase)) {
      throw Error(ErrorCode::no_active_session, "no reward is waiting to be claimed");
    }
    // The in-process ledger stands in for the chain, where every well-formed
    // address already exists.
    if (auto* local = dynamic_cast<Ledger*>(&h_.ledger); local && !local->has_wallet(address)) {
      local->register_wallet(address, "user");
    }
    auto failures_before = h_.runtime.failures().size();
    h_.runtime.submit({ h_.clock.now(), event::QrScanned{ payload } });
    auto failures = h_.runtime.failures();
    if (failures.size() != failures_before) {
      throw Error(ErrorCode::transport, failures.back());
    }
    send_json(res, 200, { { "message", reward_sent_message }, { "address", address } });
  });

  srv.Get("/ledger/transfers", [this](const httplib::Request&, httplib::Response& res) {
    std::string body;
    for (const auto& t : h_.ledger.transfers()) {
      body += to_json(t).dump();
      body += '\n';
    }
    res.set_content(body, "application/x-ndjson");
  });

  srv.Get("/ledger/wallets", [this](const httplib::Request&, httplib::Response& res) {
    auto out = nlohmann::json::array();
    for (const auto& w : h_.ledger.wallets()) {
      out.push_back(to_json(w));
    }
    send_json(res, 200, out);
  });

  srv.Get("/records", [this](const httplib::Request& req, httplib::Response& res) {
    RecordFilter filter;
    if (req.has_param("from")) {
      filter.from = parse_iso8601(req.get_param_value("from"));
    }
    if (req.has_param("to")) {
      filter.to = parse_iso8601(req.get_param_value("to"));
    }
    filter.disposed_only = req.get_param_value("disposed_only") == "true";
    auto out = nlohmann::json::array();
    for (const auto& r : h_.store.query(filter)) {
      out.push_back(to_json(r));
    }
    send_json(res, 200, out);
  });

  srv.Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    auto sub = std::make_shared<Subscriber>();
    {
      std::lock_guard lock(subs_mutex_);
      subs_.push_back(sub);
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
      "text/event-stream",
      [this, sub](std::size_t, httplib::DataSink& sink) {
        std::deque<std::string> batch;
        {
          std::unique_lock lock(sub->mutex);
          sub->wake.wait_for(lock, options_.heartbeat, [&] { return sub->closed || !sub->pending.empty(); });
          if (sub->closed) {
            sink.done();
            return true;
          }
          batch.swap(sub->pending);
        }
        if (batch.empty()) {
          batch.emplace_back(": heartbeat\n\n");
        }
        for (const auto& frame : batch) {
          if (!sink.write(frame.data(), frame.size())) {
            return false;
          }
        }
        return true;
      },
      [this, sub](bool) {
        std::lock_guard lock(subs_mutex_);
        std::erase(subs_, sub);
      });
  });

  if (!options_.simulation) {
    return;
  }

  srv.Post("/stimulus", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    std::lock_guard lock(pump_mutex_);
    if (!body.contains("at")) {
      body["at"] = format_iso8601_ms(h_.clock.now());
    }
    auto stimulus = stimulus_from_json(body);
    (void)to_event(stimulus);
    auto seq = h_.scheduler.inject(std::move(stimulus));
    h_.runtime.feed(h_.scheduler.advance(Duration::zero()));
    auto state = to_json(h_.runtime.snapshot());
    send_json(res, 202, { { "accepted", seq }, { "state", state } });
  });

  srv.Post("/clock/advance", [this](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    Duration d{};
    if (auto it = body.find("ms"); it != body.end()) {
      if (!it->is_number_integer()) {
        throw Error(ErrorCode::invalid_argument, "'ms' must be an integer");
      }
      d = std::chrono::milliseconds{ it->get<std::int64_t>() };
    } else if (auto by = body.find("by"); by != body.end() && by->is_string()) {
      d = parse_duration(by->get<std::string>());
    } else {
      throw Error(ErrorCode::missing_field, "body needs 'ms' or 'by'");
    }
    if (d < Duration::zero()) {
      throw Error(ErrorCode::invalid_argument, "cannot move the clock backwards");
    }
    send_json(res, 200, to_json(pump(d)));
  });
}

int Gateway::bind()
{
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else if (server_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  } else {
    port_ = -1;
  }
  if (port_ <= 0) {
    throw Error(ErrorCode::transport,
                "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  running_ = true;
  if (options_.realtime_period) {
    ticker_thread_ = std::thread([this] {
      std::unique_lock lock(ticker_mutex_);
      while (running_) {
        ticker_wake_.wait_for(lock, *options_.realtime_period);
        if (!running_) {
          break;
        }
        try {
          pump(h_.scheduler.tick_interval());
        } catch (const std::exception& e) {
          std::clog << "error: ticker: " << e.what() << '\n';
        }
      }
    });
  }
  return port_;
}

int Gateway::start()
{
  auto port = bind();
  server_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void Gateway::run()
{
  bind();
  server_->listen_after_bind();
}

void Gateway::stop()
{
  if (!running_.exchange(false)) {
    return;
  }
  ticker_wake_.notify_all();
  if (ticker_thread_.joinable()) {
    ticker_thread_.join();
  }
  close_subscribers();
  server_->stop();
  if (server_thread_.joinable()) {
    server_thread_.join();
  }
}

}  // namespace itrash
