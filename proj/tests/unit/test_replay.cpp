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

#include <gtest/gtest.h>

#include <sstream>

#include "itrash/analytics.hpp"
#include "itrash/error.hpp"
#include "itrash/replay.hpp"
#include "oracles.hpp"

using namespace itrash;
using namespace std::chrono_literals;

namespace {

constexpr auto B = BinColor::blue;
constexpr auto Y = BinColor::yellow;

ErrorCode code_of(auto&& fn)
{
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::unsupported;
}

reference::Matrix counts_of(const FlowMatrix& m)
{
  return m.counts;
}

ScenarioSpec single_item()
{
  ScenarioSpec s;
  s.name = "single";
  s.days = 1;
  s.cells = { { Y, Y, Y, 1 } };
  s.declared_total = 1;
  s.qr_claims = 1;
  return s;
}

}  // namespace

TEST(Scenario, CanonicalSpecsAreConsistent)
{
  auto itrash = canonical_itrash_scenario();
  EXPECT_NO_THROW(itrash.validate());
  EXPECT_EQ(itrash.total(), 79u);
  EXPECT_EQ(itrash.ngo_donations, 2u);
  auto control = canonical_control_scenario();
  EXPECT_NO_THROW(control.validate());
  EXPECT_EQ(control.total(), 89u);
  EXPECT_EQ(control.kind, TrashcanKind::control);
}

TEST(Scenario, JsonRoundTrip)
{
  for (const auto& spec : { canonical_itrash_scenario(), canonical_control_scenario(), single_item() }) {
    EXPECT_EQ(to_json(scenario_from_json(to_json(spec))), to_json(spec));
  }
  EXPECT_EQ(code_of([] { scenario_from_json(nlohmann::json{ { "kind", "itrash" } }); }), ErrorCode::parse_error);
  EXPECT_EQ(code_of([] { load_scenario("/nonexistent/scenario.json"); }), ErrorCode::io);
}

TEST(Scenario, ValidationCatchesContradictions)
{
  auto s = single_item();
  s.declared_total = 2;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::inconsistent_spec);

  s = single_item();
  s.cells[0].predicted.reset();
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::inconsistent_spec);

  s = single_item();
  s.qr_claims = 2;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::inconsistent_spec);

  s = canonical_control_scenario();
  s.cells[0].predicted = B;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::inconsistent_spec);

  s = single_item();
  s.hour_weights = { 1.0, 2.0 };
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::inconsistent_spec);
}

TEST(Scenario, MiddayPeakWeights)
{
  auto w = midday_peak_weights(8, 12);
  ASSERT_EQ(w.size(), 12u);
  EXPECT_EQ(w[2], 1.0);
  EXPECT_EQ(w[3], 2.0);
  EXPECT_EQ(w[5], 2.0);
  EXPECT_EQ(w[6], 1.0);
}

TEST(Trace, SameSeedSameTrace)
{
  auto spec = canonical_itrash_scenario();
  auto a = generate_trace(spec, 11);
  auto b = generate_trace(spec, 11);
  auto c = generate_trace(spec, 12);
  EXPECT_EQ(a.stimuli, b.stimuli);
  EXPECT_NE(a.stimuli, c.stimuli);
  EXPECT_EQ(a.sessions(), 79u);
  EXPECT_TRUE(std::is_sorted(a.stimuli.begin(), a.stimuli.end(), [](auto& x, auto& y) { return x.at < y.at; }));
}

TEST(Trace, EmptySpecGivesEmptyTraceAndStore)
{
  ScenarioSpec empty;
  empty.name = "empty";
  auto trace = generate_trace(empty, 1);
  EXPECT_TRUE(trace.stimuli.empty());
  auto result = replay(trace);
  EXPECT_EQ(result.store->size(), 0u);
  EXPECT_EQ(result.presented, 0u);
}

TEST(Trace, WriteReadRoundTrip)
{
  auto trace = generate_trace(canonical_itrash_scenario(), 3);
  std::stringstream buffer;
  write_trace(trace, buffer);
  auto back = read_trace(buffer);
  EXPECT_EQ(back.stimuli, trace.stimuli);
  EXPECT_EQ(back.meta.seed, 3u);
  EXPECT_EQ(back.meta.name, trace.meta.name);
  EXPECT_EQ(back.meta.kind, TrashcanKind::itrash);
}

TEST(Trace, ReadRejectsDisorderAndGarbage)
{
  auto trace = generate_trace(single_item(), 1);
  std::swap(trace.stimuli.front(), trace.stimuli.back());
  std::stringstream buffer;
  write_trace(trace, buffer);
  EXPECT_EQ(code_of([&] { read_trace(buffer); }), ErrorCode::out_of_order);
  std::stringstream garbage("{\"meta\":{}}\nnot json\n");
  EXPECT_THROW(read_trace(garbage), Error);
}

TEST(Replay, SingleItemWithQrClaim)
{
  auto result = replay(generate_trace(single_item(), 4));
  ASSERT_EQ(result.store->size(), 1u);
  auto r = result.store->query().front();
  EXPECT_EQ(r.outcome(), SessionOutcome::rewarded());
  EXPECT_EQ(r.bin_real(), Y);
  EXPECT_EQ(result.ledger->balance(result.accounts.itrash), TokenAmount::parse("99.99"));
  EXPECT_EQ(result.presented, 1u);
  EXPECT_TRUE(result.failures.empty());
}

TEST(Replay, CanonicalItrashReproducesPublishedFlows)
{
  for (std::uint64_t seed : { 1ULL, 7ULL, 2024ULL }) {
    auto result = replay(generate_trace(canonical_itrash_scenario(), seed));
    auto records = result.store->query();
    EXPECT_EQ(result.presented, 79u) << seed;
    EXPECT_EQ(records.size(), 79u) << seed;
    EXPECT_EQ(accuracy(records, AccuracyMode::prediction), (Ratio{ 55, 67 })) << seed;
    EXPECT_EQ(follow_rate(records), (Ratio{ 38, 55 })) << seed;
    EXPECT_EQ(counts_of(flow_matrix(records, Pairing::predicted_vs_real)), reference::itrash_predicted_vs_real);
    EXPECT_EQ(counts_of(flow_matrix(records, Pairing::correct_predicted_vs_thrown)),
              reference::itrash_correct_vs_thrown);
    auto timeouts = result.store->query({ .outcomes = { SessionOutcome::Kind::timeout } });
    EXPECT_EQ(timeouts.size(), 12u);
    auto donated = result.store->query({ .outcomes = { SessionOutcome::Kind::correct_donated } });
    EXPECT_EQ(donated.size(), 2u);
    EXPECT_EQ(result.ledger->transfers().size(), 2u);
    EXPECT_EQ(result.ledger->balance(result.accounts.itrash), TokenAmount::parse("99.98"));
    EXPECT_TRUE(result.failures.empty());
  }
}

TEST(Replay, CanonicalControlReproducesPublishedFlows)
{
  auto result = replay(generate_trace(canonical_control_scenario(), 7));
  auto records = result.store->query();
  ASSERT_EQ(records.size(), 89u);
  EXPECT_EQ(accuracy(records, AccuracyMode::disposal), (Ratio{ 42, 89 }));
  EXPECT_EQ(counts_of(flow_matrix(records, Pairing::thrown_vs_real)), reference::control_thrown_vs_real);
  for (const auto& r : records) {
    EXPECT_TRUE(is_uuid(r.record_id()));
  }
  EXPECT_TRUE(result.ledger->transfers().empty());
}

TEST(Replay, DeterministicAcrossRuns)
{
  auto trace = generate_trace(canonical_itrash_scenario(), 99);
  auto a = replay(trace);
  auto b = replay(trace);
  EXPECT_EQ(a.store->query(), b.store->query());
  EXPECT_EQ(a.ledger->transfers(), b.ledger->transfers());
}

TEST(Replay, RecordsStayInsideTheDayWindow)
{
  auto spec = canonical_itrash_scenario();
  auto result = replay(generate_trace(spec, 5));
  for (const auto& r : result.store->query()) {
    auto since_midnight = r.time() - std::chrono::floor<std::chrono::days>(r.time());
    EXPECT_GE(since_midnight, std::chrono::hours{ spec.day_start_hour });
    EXPECT_LT(since_midnight, std::chrono::hours{ spec.day_start_hour + spec.day_length_hours } + 2min);
  }
}

TEST(Replay, FileBackedStoreOption)
{
  auto path = std::filesystem::temp_directory_path() / "itrash_replay_test.jsonl";
  std::filesystem::remove(path);
  ReplayOptions options;
  options.store_path = path;
  {
    auto result = replay(generate_trace(single_item(), 2), options);
    EXPECT_EQ(result.store->path(), path);
  }
  EventStore reopened(path);
  EXPECT_EQ(reopened.size(), 1u);
  EXPECT_EQ(reopened.query().front().bin_real(), Y);
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".audit.jsonl");
}
