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

#include "itrash/replay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "itrash/classifier.hpp"
#include "itrash/error.hpp"
#include "itrash/item_tag.hpp"
#include "itrash/random.hpp"
#include "itrash/runtime.hpp"

namespace itrash {

namespace {

constexpr auto camera_delay = std::chrono::milliseconds{ 500 };
constexpr auto throw_delay = std::chrono::milliseconds{ 3500 };
constexpr auto claim_delay = std::chrono::seconds{ 2 };
constexpr auto session_spacing = std::chrono::seconds{ 120 };
constexpr auto start_jitter_s = 20;

std::string_view kind_name(TrashcanKind k)
{
  return k == TrashcanKind::itrash ? "itrash" : "control";
}

TrashcanKind parse_kind(std::string_view s)
{
  if (s == "itrash") {
    return TrashcanKind::itrash;
  }
  if (s == "control") {
    return TrashcanKind::control;
  }
  throw Error(ErrorCode::parse_error, "unknown trashcan kind '" + std::string(s) + "'");
}

nlohmann::json color_json(std::optional<BinColor> c)
{
  return c ? nlohmann::json(std::string(to_string(*c))) : nlohmann::json(nullptr);
}

std::optional<BinColor> color_json_field(const nlohmann::json& j, const char* key)
{
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  return color_from_string(it->get<std::string>());
}

std::chrono::sys_days parse_date(std::string_view text)
{
  // Reuse the timestamp parser on midnight of that day.
  return std::chrono::floor<std::chrono::days>(parse_iso8601(std::string(text) + "T00:00:00Z"));
}

/// Largest-remainder apportionment of n items over weights; ties go to the
/// earlier index.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights)
{
  auto total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t given = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    auto quota = static_cast<double>(n) * weights[i] / total;
    out[i] = static_cast<std::size_t>(std::floor(quota + 1e-12));
    given += out[i];
    remainders.emplace_back(quota - static_cast<double>(out[i]), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first + 1e-12; });
  for (std::size_t k = 0; given < n; ++k, ++given) {
    ++out[remainders[k % remainders.size()].second];
  }
  return out;
}

struct Item
{
  std::optional<BinColor> real;
  std::optional<BinColor> predicted;
  std::optional<BinColor> thrown;
  enum class Claim
  {
    none,
    donate,
    qr,
  } claim = Claim::none;
  int ngo_id = 0;
  Timestamp start{};
};

std::string user_wallet_address(std::uint64_t seed, std::size_t k)
{
  constexpr std::string_view alphabet = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
  auto h = splitmix64(seed ^ (0x5553455200000000ULL + k));
  std::string out = "rUser";
  for (int i = 0; i < 10; ++i) {
    out += alphabet[h % alphabet.size()];
    h /= alphabet.size();
  }
  return out;
}

}  // namespace

std::size_t ScenarioSpec::total() const
{
  std::size_t n = 0;
  for (const auto& c : cells) {
    n += c.count;
  }
  return n;
}

void ScenarioSpec::validate() const
{
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::inconsistent_spec, name + ": " + why);
  };
  if (days < 1) {
    fail("days must be >= 1");
  }
  if (day_start_hour < 0 || day_length_hours < 1 || day_start_hour + day_length_hours > 24) {
    fail("day window must lie within one calendar day");
  }
  if (!hour_weights.empty() && hour_weights.size() != static_cast<std::size_t>(day_length_hours)) {
    fail("need one hour weight per hour of the day window");
  }
  double weight_sum = 0.0;
  for (double w : hour_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      fail("hour weights must be finite and >= 0");
    }
    weight_sum += w;
  }
  if (!hour_weights.empty() && !(weight_sum > 0.0)) {
    fail("hour weights sum to zero");
  }
  (void)parse_date(start_date);
  std::size_t followed = 0;
  for (const auto& c : cells) {
    if (kind == TrashcanKind::itrash && !c.predicted) {
      fail("itrash cells need a predicted color");
    }
    if (kind == TrashcanKind::control && (c.predicted || !c.thrown)) {
      fail("control cells have a thrown color and no prediction");
    }
    if (c.thrown && c.predicted && *c.thrown == *c.predicted) {
      followed += c.count;
    }
  }
  if (total() != declared_total) {
    fail("cell counts sum to " + std::to_string(total()) + ", declared " +
         std::to_string(declared_total));
  }
  if (ngo_donations + qr_claims > followed) {
    fail("more reward claims than sessions that earn a reward");
  }
}

nlohmann::json to_json(const ScenarioSpec& spec)
{
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : spec.cells) {
    cells.push_back({ { "real", color_json(c.real) },
                      { "predicted", color_json(c.predicted) },
                      { "thrown", color_json(c.thrown) },
                      { "count", c.count } });
  }
  return { { "name", spec.name },
           { "kind", kind_name(spec.kind) },
           { "days", spec.days },
           { "day_start_hour", spec.day_start_hour },
           { "day_length_hours", spec.day_length_hours },
           { "start_date", spec.start_date },
           { "declared_total", spec.declared_total },
           { "hour_weights", spec.hour_weights },
           { "ngo_donations", spec.ngo_donations },
           { "qr_claims", spec.qr_claims },
           { "cells", cells } };
}

ScenarioSpec scenario_from_json(const nlohmann::json& j)
{
  ScenarioSpec s;
  try {
    s.name = j.value("name", std::string("scenario"));
    s.kind = parse_kind(j.value("kind", std::string("itrash")));
    s.days = j.value("days", s.days);
    s.day_start_hour = j.value("day_start_hour", s.day_start_hour);
    s.day_length_hours = j.value("day_length_hours", s.day_length_hours);
    s.start_date = j.value("start_date", s.start_date);
    s.declared_total = j.at("declared_total").get<std::size_t>();
    if (j.contains("hour_weights")) {
      s.hour_weights = j.at("hour_weights").get<std::vector<double>>();
    }
    s.ngo_donations = j.value("ngo_donations", std::size_t{ 0 });
    s.qr_claims = j.value("qr_claims", std::size_t{ 0 });
    for (const auto& c : j.at("cells")) {
      s.cells.push_back({ color_json_field(c, "real"),
                          color_json_field(c, "predicted"),
                          color_json_field(c, "thrown"),
                          c.at("count").get<std::size_t>() });
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  try {
    return scenario_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

std::vector<double> midday_peak_weights(int day_start_hour, int day_length_hours)
{
  std::vector<double> w;
  for (int h = day_start_hour; h < day_start_hour + day_length_hours; ++h) {
    w.push_back(h >= 11 && h < 14 ? 2.0 : 1.0);
  }
  return w;
}

ScenarioSpec canonical_itrash_scenario()
{
  using B = BinColor;
  ScenarioSpec s;
  s.name = "canonical_itrash";
  s.kind = TrashcanKind::itrash;
  s.hour_weights = midday_peak_weights(s.day_start_hour, s.day_length_hours);
  s.ngo_donations = 2;
  auto add = [&](B real, B pred, std::optional<B> thrown, std::size_t n) {
    s.cells.push_back({ real, pred, thrown, n });
  };
  // Correct predictions and where users threw them.
  add(B::brown, B::brown, B::brown, 9);
  add(B::brown, B::brown, B::blue, 3);
  add(B::brown, B::brown, B::yellow, 2);
  add(B::blue, B::blue, B::blue, 9);
  add(B::blue, B::blue, B::brown, 2);
  add(B::yellow, B::yellow, B::yellow, 20);
  add(B::yellow, B::yellow, B::brown, 3);
  add(B::yellow, B::yellow, B::blue, 7);
  // Mispredictions; thrown colors chosen to meet the per-bin totals
  // (24 blue, 25 yellow, 18 brown) with most users following the LED.
  add(B::blue, B::brown, B::brown, 2);
  add(B::blue, B::brown, B::blue, 2);
  add(B::blue, B::yellow, B::yellow, 2);
  add(B::yellow, B::blue, B::blue, 3);
  add(B::yellow, B::brown, B::brown, 2);
  add(B::yellow, B::brown, B::yellow, 1);
  // Shown to the camera, never thrown (phones, wallets, earphones).
  s.cells.push_back({ std::nullopt, B::blue, std::nullopt, 4 });
  s.cells.push_back({ std::nullopt, B::yellow, std::nullopt, 4 });
  s.cells.push_back({ std::nullopt, B::brown, std::nullopt, 4 });
  s.declared_total = 79;
  return s;
}

ScenarioSpec canonical_control_scenario()
{
  using B = BinColor;
  ScenarioSpec s;
  s.name = "canonical_control";
  s.kind = TrashcanKind::control;
  s.hour_weights = midday_peak_weights(s.day_start_hour, s.day_length_hours);
  auto add = [&](B real, B thrown, std::size_t n) {
    s.cells.push_back({ real, std::nullopt, thrown, n });
  };
  add(B::brown, B::brown, 9);
  add(B::brown, B::blue, 6);
  add(B::brown, B::yellow, 3);
  add(B::blue, B::blue, 11);
  add(B::blue, B::brown, 15);
  add(B::blue, B::yellow, 10);
  add(B::yellow, B::yellow, 22);
  add(B::yellow, B::blue, 6);
  add(B::yellow, B::brown, 7);
  s.declared_total = 89;
  return s;
}

std::size_t EventTrace::sessions() const
{
  auto opener = meta.kind == TrashcanKind::itrash ? Channel::Kind::main_proximity
                                                  : Channel::Kind::bin_proximity;
  return static_cast<std::size_t>(std::count_if(
    stimuli.begin(), stimuli.end(), [&](const Stimulus& s) { return s.channel.kind == opener; }));
}

void write_trace(const EventTrace& trace, std::ostream& out)
{
  nlohmann::json meta{ { "name", trace.meta.name },
                       { "kind", kind_name(trace.meta.kind) },
                       { "days", trace.meta.days },
                       { "day_start_hour", trace.meta.day_start_hour },
                       { "day_length_hours", trace.meta.day_length_hours },
                       { "start_date", trace.meta.start_date },
                       { "seed", trace.meta.seed } };
  out << nlohmann::json{ { "meta", meta } }.dump() << '\n';
  for (const auto& s : trace.stimuli) {
    out << to_json(s).dump() << '\n';
  }
}

EventTrace read_trace(std::istream& in)
{
  EventTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      auto j = nlohmann::json::parse(line);
      if (j.contains("meta")) {
        const auto& m = j.at("meta");
        trace.meta.name = m.value("name", std::string{});
        trace.meta.kind = parse_kind(m.value("kind", std::string("itrash")));
        trace.meta.days = m.value("days", 5);
        trace.meta.day_start_hour = m.value("day_start_hour", 8);
        trace.meta.day_length_hours = m.value("day_length_hours", 12);
        trace.meta.start_date = m.value("start_date", std::string{});
        trace.meta.seed = m.value("seed", std::uint64_t{ 0 });
        continue;
      }
      auto s = stimulus_from_json(j);
      if (!trace.stimuli.empty() && s.at < trace.stimuli.back().at) {
        throw Error(ErrorCode::out_of_order, "stimuli are not time ordered");
      }
      trace.stimuli.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, "trace line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trace;
}

EventTrace generate_trace(const ScenarioSpec& spec, std::uint64_t seed)
{
  spec.validate();
  EventTrace trace;
  trace.meta = { spec.name,           spec.kind,       spec.days, spec.day_start_hour,
                 spec.day_length_hours, spec.start_date, seed };

  std::vector<Item> items;
  for (const auto& c : spec.cells) {
    for (std::size_t k = 0; k < c.count; ++k) {
      items.push_back({ c.real, c.predicted, c.thrown });
    }
  }
  Rng rng(seed);
  portable_shuffle(items.begin(), items.end(), rng);

  std::size_t donations = spec.ngo_donations;
  std::size_t claims = spec.qr_claims;
  int next_ngo = 0;
  for (auto& item : items) {
    bool earns = item.thrown && item.predicted && *item.thrown == *item.predicted;
    if (!earns) {
      continue;
    }
    if (donations > 0) {
      item.claim = Item::Claim::donate;
      item.ngo_id = next_ngo++ % ngo_count + 1;
      --donations;
    } else if (claims > 0) {
      item.claim = Item::Claim::qr;
      --claims;
    }
  }

  // Hours are apportioned separately for disposed and undisposed items so
  // the disposal profile follows the weights regardless of the seed.
  std::vector<Item*> disposed_items;
  std::vector<Item*> undisposed_items;
  for (auto& item : items) {
    (item.thrown ? disposed_items : undisposed_items).push_back(&item);
  }
  const auto first_day = parse_date(spec.start_date);
  const auto n_hours = static_cast<std::size_t>(spec.day_length_hours);
  const auto weights =
    spec.hour_weights.empty() ? std::vector<double>(n_hours, 1.0) : spec.hour_weights;
  std::map<std::pair<int, std::size_t>, std::vector<Item*>> buckets;  // (day, hour)
  std::size_t day_counter = 0;
  for (auto* group : { &disposed_items, &undisposed_items }) {
    auto per_hour = apportion(group->size(), weights);
    std::size_t next = 0;
    for (std::size_t h = 0; h < n_hours; ++h) {
      for (std::size_t k = 0; k < per_hour[h]; ++k) {
        auto day = static_cast<int>(day_counter++ % static_cast<std::size_t>(spec.days));
        buckets[{ day, h }].push_back((*group)[next++]);
      }
    }
  }

  constexpr std::size_t slots_per_hour = std::chrono::hours{ 1 } / session_spacing;
  std::vector<Item*> ordered;
  for (auto& [key, bucket] : buckets) {
    if (bucket.size() > slots_per_hour) {
      throw Error(ErrorCode::inconsistent_spec,
                  "more than " + std::to_string(slots_per_hour) + " sessions in one hour");
    }
    std::vector<std::size_t> slots(slots_per_hour);
    std::iota(slots.begin(), slots.end(), std::size_t{ 0 });
    portable_shuffle(slots.begin(), slots.end(), rng);
    slots.resize(bucket.size());
    std::sort(slots.begin(), slots.end());
    auto hour_start = Timestamp{ first_day + std::chrono::days{ key.first } } +
                      std::chrono::hours{ spec.day_start_hour + static_cast<int>(key.second) };
    for (std::size_t k = 0; k < bucket.size(); ++k) {
      auto jitter = std::chrono::seconds{ draw_below(rng, start_jitter_s) };
      bucket[k]->start = hour_start + session_spacing * static_cast<int>(slots[k]) + jitter;
      ordered.push_back(bucket[k]);
    }
  }
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Item* a, const Item* b) { return a->start < b->start; });

  const ControllerConfig timing;
  std::size_t qr_index = 0;
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    const auto& item = *ordered[k];
    ItemTag tag{ k + 1, item.real, std::nullopt };
    auto t0 = item.start;
    if (spec.kind == TrashcanKind::control) {
      trace.stimuli.push_back({ t0, Channel::bin_sensor(*item.thrown), tag.encode() });
      continue;
    }
    tag.predicted = ClassificationOutcome::valid(*item.predicted);
    trace.stimuli.push_back({ t0, Channel::main(), {} });
    trace.stimuli.push_back({ t0 + camera_delay, Channel::camera(), tag.encode() });
    if (!item.thrown) {
      continue;
    }
    auto t1 = t0 + throw_delay;
    trace.stimuli.push_back({ t1, Channel::bin_sensor(*item.thrown), {} });
    if (item.claim == Item::Claim::qr) {
      trace.stimuli.push_back(
        { t1 + claim_delay, Channel::qr(), make_qr_payload(user_wallet_address(seed, qr_index++)) });
    } else if (item.claim == Item::Claim::donate) {
      trace.stimuli.push_back({ t1 + timing.reward_timeout + claim_delay,
                                Channel::ngo(),
                                std::to_string(item.ngo_id) });
    }
  }
  return trace;
}

namespace {

void annotate_from_tags(EventStore& store)
{
  for (const auto& r : store.query()) {
    auto tag = ItemTag::decode(r.image_bytes());
    if (tag && tag->real) {
      store.annotate_real(r.record_id(), *tag->real, r.time());
    }
  }
}

void replay_control(const EventTrace& trace, ReplayResult& out)
{
  for (const auto& s : trace.stimuli) {
    if (s.channel.kind != Channel::Kind::bin_proximity) {
      continue;
    }
    ++out.presented;
    auto seq = out.presented;
    // Nothing is predicted at a plain bin; what the user chose is their own
    // prediction.
    DisposalRecord r(format_uuid(splitmix64(trace.meta.seed ^ seq), splitmix64(seq)),
                     base64_encode(s.payload),
                     s.at,
                     s.channel.bin,
                     s.channel.bin,
                     std::nullopt,
                     SessionOutcome::unclaimed());
    out.store->append(r);
  }
}

void replay_itrash(const EventTrace& trace, const ReplayOptions& options, ReplayResult& out)
{
  if (trace.stimuli.empty()) {
    return;
  }
  for (const auto& s : trace.stimuli) {
    if (s.channel.kind == Channel::Kind::qr) {
      try {
        auto address = parse_qr(s.payload);
        if (!out.ledger->has_wallet(address)) {
          out.ledger->register_wallet(address, "user");
        }
      } catch (const Error&) {
        // Malformed codes stay in the trace; the controller ignores them.
      }
    }
  }

  VirtualClock clock(trace.stimuli.front().at);
  StimulusScheduler scheduler(clock, options.tick_interval);
  for (const auto& s : trace.stimuli) {
    scheduler.inject(s);
  }
  ScriptedClassifier classifier;
  DevicePort devices;
  ControllerRuntime runtime({ options.config,
                              classifier,
                              *out.ledger,
                              out.accounts,
                              *out.store,
                              devices,
                              trace.meta.seed });

  const auto& cfg = options.config;
  const auto liveness_bound = cfg.capture_timeout + cfg.retry_linger + cfg.disposal_timeout +
                              cfg.reward_timeout + cfg.donate_timeout +
                              options.tick_interval * 4;
  std::optional<Timestamp> busy_since;
  while (true) {
    if (runtime.state().idle()) {
      busy_since.reset();
      auto due = scheduler.next_due();
      if (!due) {
        break;
      }
      if (*due > clock.now()) {
        scheduler.fast_forward(*due);
      }
      auto events = scheduler.advance(Duration::zero());
      runtime.feed(events);
      continue;
    }
    if (!busy_since) {
      busy_since = clock.now();
    }
    if (clock.now() - *busy_since > liveness_bound) {
      throw Error(ErrorCode::controller_stuck,
                  "controller stuck in " + std::string(state_name(runtime.state().phase)) +
                    " at " + format_iso8601_ms(clock.now()));
    }
    auto events = scheduler.advance(options.tick_interval);
    runtime.feed(events);
  }
  out.presented = devices.main_proximity.history().size();
  out.effects = runtime.effect_log();
  out.failures = runtime.failures();
}

}  // namespace

ReplayResult replay(const EventTrace& trace, const ReplayOptions& options)
{
  options.config.validate();
  ReplayResult out;
  out.store = options.store_path ? std::make_unique<EventStore>(*options.store_path)
                                 : std::make_unique<EventStore>();
  out.ledger = std::make_unique<Ledger>(trace.meta.seed);
  out.accounts = bootstrap_reward_wallets(*out.ledger, options.itrash_balance);
  if (trace.meta.kind == TrashcanKind::control) {
    replay_control(trace, out);
  } else {
    replay_itrash(trace, options, out);
  }
  annotate_from_tags(*out.store);
  return out;
}

}  // namespace itrash
