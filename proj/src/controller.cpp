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

#include "itrash/controller.hpp"

#include <sstream>

#include "itrash/error.hpp"
#include "itrash/ledger.hpp"
#include "itrash/random.hpp"

namespace itrash {

std::string_view to_string(LedPattern p)
{
  switch (p) {
    case LedPattern::ready: return "ready";
    case LedPattern::processing: return "processing";
    case LedPattern::error: return "error";
    case LedPattern::solid_blue: return "solid_blue";
    case LedPattern::solid_yellow: return "solid_yellow";
    case LedPattern::solid_brown: return "solid_brown";
  }
  return "error";
}

std::string_view to_string(LcdScreen s)
{
  switch (s) {
    case LcdScreen::instructions: return "instructions";
    case LcdScreen::try_again: return "try_again";
    case LcdScreen::show_qr_prompt: return "show_qr_prompt";
    case LcdScreen::ngo_menu: return "ngo_menu";
    case LcdScreen::reward_sent: return "reward_sent";
  }
  return "instructions";
}

void ControllerConfig::validate() const
{
  auto positive = [](Duration d, const char* name) {
    if (d <= Duration::zero()) {
      throw Error(ErrorCode::invalid_argument, std::string(name) + " must be > 0");
    }
  };
  positive(disposal_timeout, "disposal_timeout");
  positive(reward_timeout, "reward_timeout");
  positive(donate_timeout, "donate_timeout");
  positive(retry_linger, "retry_linger");
  positive(capture_timeout, "capture_timeout");
  if (reward_amount <= TokenAmount{}) {
    throw Error(ErrorCode::invalid_argument, "reward_amount must be > 0");
  }
}

std::string_view state_name(const Phase& phase)
{
  struct Namer
  {
    std::string_view operator()(const state::Idle&) const { return "Idle"; }
    std::string_view operator()(const state::Capturing&) const { return "Capturing"; }
    std::string_view operator()(const state::Classifying&) const { return "Classifying"; }
    std::string_view operator()(const state::PromptRetry&) const { return "PromptRetry"; }
    std::string_view operator()(const state::AwaitDisposal&) const { return "AwaitDisposal"; }
    std::string_view operator()(const state::RewardPrompt&) const { return "RewardPrompt"; }
    std::string_view operator()(const state::DonateMenu&) const { return "DonateMenu"; }
    std::string_view operator()(const state::Finalizing&) const { return "Finalizing"; }
  };
  return std::visit(Namer{}, phase);
}

std::optional<Timestamp> state_deadline(const Phase& phase)
{
  if (auto* s = std::get_if<state::Capturing>(&phase)) {
    return s->deadline;
  }
  if (auto* s = std::get_if<state::Classifying>(&phase)) {
    return s->deadline;
  }
  if (auto* s = std::get_if<state::PromptRetry>(&phase)) {
    return s->until;
  }
  if (auto* s = std::get_if<state::AwaitDisposal>(&phase)) {
    return s->deadline;
  }
  if (auto* s = std::get_if<state::RewardPrompt>(&phase)) {
    return s->deadline;
  }
  if (auto* s = std::get_if<state::DonateMenu>(&phase)) {
    return s->deadline;
  }
  return std::nullopt;
}

std::string_view event_name(const ControllerEvent& e)
{
  struct Namer
  {
    std::string_view operator()(const event::MainProximityTriggered&) const
    {
      return "MainProximityTriggered";
    }
    std::string_view operator()(const event::ImageCaptured&) const { return "ImageCaptured"; }
    std::string_view operator()(const event::Classified&) const { return "Classified"; }
    std::string_view operator()(const event::BinSensorTriggered&) const
    {
      return "BinSensorTriggered";
    }
    std::string_view operator()(const event::QrScanned&) const { return "QrScanned"; }
    std::string_view operator()(const event::NgoSelected&) const { return "NgoSelected"; }
    std::string_view operator()(const event::Tick&) const { return "Tick"; }
  };
  return std::visit(Namer{}, e);
}

namespace {

std::string session_record_id(std::uint64_t salt, std::uint64_t counter, Timestamp now)
{
  auto hi = splitmix64(salt ^ splitmix64(counter));
  auto lo = splitmix64(hi ^ static_cast<std::uint64_t>(now.time_since_epoch().count()));
  return format_uuid(hi, lo);
}

DisposalRecord finish_record(const SessionData& s, SessionOutcome outcome, Timestamp now)
{
  return DisposalRecord(s.record_id,
                        base64_encode(s.image),
                        now,
                        s.predicted,
                        s.thrown,
                        std::nullopt,
                        outcome);
}

bool due(const ControllerEvent& e, Timestamp deadline, Timestamp now)
{
  return std::holds_alternative<event::Tick>(e) && now >= deadline;
}

}  // namespace

StepResult step(const ControllerState& current,
                const ControllerEvent& ev,
                const ControllerConfig& config,
                Timestamp now)
{
  StepResult out{ current, {} };
  auto& next = out.state;
  auto& fx = out.effects;
  const auto& phase = current.phase;

  auto go_retry = [&] {
    next.phase = state::PromptRetry{ now + config.retry_linger };
    fx.emplace_back(effect::SetLed{ LedPattern::error });
    fx.emplace_back(effect::ShowLcd{ LcdScreen::try_again });
  };
  auto go_idle = [&] {
    next.phase = state::Idle{};
    next.session = SessionData{};
    fx.emplace_back(effect::SetLed{ LedPattern::ready });
  };
  auto finalize = [&](SessionOutcome outcome) {
    next.phase = state::Finalizing{ outcome };
    return finish_record(next.session, outcome, now);
  };

  if (std::holds_alternative<state::Idle>(phase)) {
    if (std::holds_alternative<event::MainProximityTriggered>(ev)) {
      next.session_counter = current.session_counter + 1;
      next.session = SessionData{};
      next.session.record_id = session_record_id(current.id_salt, next.session_counter, now);
      next.session.started = now;
      next.phase = state::Capturing{ now + config.capture_timeout };
      fx.emplace_back(effect::CaptureImage{});
      fx.emplace_back(effect::SetLed{ LedPattern::processing });
    }
  } else if (auto* capturing = std::get_if<state::Capturing>(&phase)) {
    if (auto* img = std::get_if<event::ImageCaptured>(&ev)) {
      next.session.image = img->image;
      next.phase = state::Classifying{ capturing->deadline };
      fx.emplace_back(effect::RunClassifier{ img->image });
    } else if (due(ev, capturing->deadline, now)) {
      go_retry();
    }
  } else if (auto* classifying = std::get_if<state::Classifying>(&phase)) {
    if (auto* c = std::get_if<event::Classified>(&ev)) {
      if (auto color = c->outcome.color()) {
        next.session.predicted = *color;
        next.phase = state::AwaitDisposal{ *color, now + config.disposal_timeout };
        fx.emplace_back(effect::SetLed{ solid(*color) });
      } else {
        go_retry();
      }
    } else if (due(ev, classifying->deadline, now)) {
      go_retry();
    }
  } else if (auto* retry = std::get_if<state::PromptRetry>(&phase)) {
    if (due(ev, retry->until, now)) {
      go_idle();
    }
  } else if (auto* await = std::get_if<state::AwaitDisposal>(&phase)) {
    if (auto* bin = std::get_if<event::BinSensorTriggered>(&ev)) {
      next.session.thrown = bin->bin;
      if (bin->bin == await->predicted) {
        next.phase = state::RewardPrompt{ now + config.reward_timeout };
        fx.emplace_back(effect::ShowLcd{ LcdScreen::show_qr_prompt });
      } else {
        auto record = finalize(SessionOutcome::incorrect_bin());
        fx.emplace_back(effect::SetLed{ LedPattern::error });
        fx.emplace_back(effect::PersistRecord{ std::move(record) });
      }
    } else if (due(ev, await->deadline, now)) {
      fx.emplace_back(effect::PersistRecord{ finalize(SessionOutcome::timed_out()) });
    }
  } else if (auto* prompt = std::get_if<state::RewardPrompt>(&phase)) {
    if (auto* qr = std::get_if<event::QrScanned>(&ev)) {
      std::string address;
      try {
        address = parse_qr(qr->payload);
      } catch (const Error&) {
        return out;  // unreadable code: treated as no scan
      }
      auto record = finalize(SessionOutcome::rewarded());
      fx.emplace_back(effect::IssueReward{
        { RewardDestination::Kind::user_wallet, address, 0 },
        config.reward_amount,
        next.session.record_id });
      fx.emplace_back(effect::PersistRecord{ std::move(record) });
      fx.emplace_back(effect::ShowLcd{ LcdScreen::reward_sent });
    } else if (due(ev, prompt->deadline, now)) {
      next.phase = state::DonateMenu{ now + config.donate_timeout };
      fx.emplace_back(effect::ShowLcd{ LcdScreen::ngo_menu });
    }
  } else if (auto* menu = std::get_if<state::DonateMenu>(&phase)) {
    if (auto* ngo = std::get_if<event::NgoSelected>(&ev)) {
      if (ngo->ngo_id < 1 || ngo->ngo_id > ngo_count) {
        return out;
      }
      auto record = finalize(SessionOutcome::donated(ngo->ngo_id));
      fx.emplace_back(effect::IssueReward{ { RewardDestination::Kind::ngo, {}, ngo->ngo_id },
                                           config.reward_amount,
                                           next.session.record_id });
      fx.emplace_back(effect::PersistRecord{ std::move(record) });
      fx.emplace_back(effect::ShowLcd{ LcdScreen::reward_sent });
    } else if (due(ev, menu->deadline, now)) {
      fx.emplace_back(effect::PersistRecord{ finalize(SessionOutcome::unclaimed()) });
    }
  } else if (std::holds_alternative<state::Finalizing>(phase)) {
    if (std::holds_alternative<event::Tick>(ev)) {
      go_idle();
    }
  }
  return out;
}

SessionRun run_session(std::span<const TimedEvent> events,
                       const ControllerConfig& config,
                       ControllerState initial)
{
  config.validate();
  SessionRun run;
  run.final_state = std::move(initial);
  std::optional<Timestamp> last;
  for (const auto& te : events) {
    if (last && te.at < *last) {
      throw Error(ErrorCode::out_of_order,
                  "event at " + format_iso8601_ms(te.at) + " precedes " +
                    format_iso8601_ms(*last));
    }
    last = te.at;
    auto result = step(run.final_state, te.event, config, te.at);
    run.final_state = std::move(result.state);
    for (auto& e : result.effects) {
      if (auto* p = std::get_if<effect::PersistRecord>(&e); p && !run.record) {
        run.record = p->record;
      }
      run.effects.push_back({ te.at, std::move(e) });
    }
  }
  return run;
}

nlohmann::json to_json(const SideEffect& e)
{
  struct Encoder
  {
    nlohmann::json operator()(const effect::CaptureImage&) const
    {
      return { { "effect", "capture_image" } };
    }
    nlohmann::json operator()(const effect::RunClassifier& r) const
    {
      return { { "effect", "run_classifier" }, { "image_bytes", r.image.size() } };
    }
    nlohmann::json operator()(const effect::SetLed& s) const
    {
      return { { "effect", "set_led" }, { "pattern", to_string(s.pattern) } };
    }
    nlohmann::json operator()(const effect::ShowLcd& s) const
    {
      return { { "effect", "show_lcd" }, { "screen", to_string(s.screen) } };
    }
    nlohmann::json operator()(const effect::PersistRecord& p) const
    {
      return { { "effect", "persist_record" }, { "record", to_json(p.record) } };
    }
    nlohmann::json operator()(const effect::IssueReward& r) const
    {
      nlohmann::json j{ { "effect", "issue_reward" },
                        { "amount", r.amount.to_string() },
                        { "memo", r.memo } };
      if (r.destination.kind == RewardDestination::Kind::ngo) {
        j["ngo_id"] = r.destination.ngo_id;
      } else {
        j["wallet"] = r.destination.address;
      }
      return j;
    }
  };
  return std::visit(Encoder{}, e);
}

nlohmann::json to_json(const ControllerEvent& e)
{
  nlohmann::json j{ { "event", event_name(e) } };
  if (auto* img = std::get_if<event::ImageCaptured>(&e)) {
    j["image_b64"] = base64_encode(img->image);
  } else if (auto* c = std::get_if<event::Classified>(&e)) {
    j["outcome"] = to_string(c->outcome);
  } else if (auto* b = std::get_if<event::BinSensorTriggered>(&e)) {
    j["bin"] = to_string(b->bin);
  } else if (auto* q = std::get_if<event::QrScanned>(&e)) {
    j["payload"] = q->payload;
  } else if (auto* n = std::get_if<event::NgoSelected>(&e)) {
    j["ngo_id"] = n->ngo_id;
  } else if (auto* t = std::get_if<event::Tick>(&e)) {
    j["now"] = format_iso8601_ms(t->now);
  }
  return j;
}

std::string effect_log_jsonl(std::span<const TimedEffect> effects)
{
  std::ostringstream out;
  for (const auto& te : effects) {
    auto j = to_json(te.effect);
    j["at"] = format_iso8601_ms(te.at);
    out << j.dump() << '\n';
  }
  return out.str();
}

}  // namespace itrash
