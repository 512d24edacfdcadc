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

#include <thread>

#include "itrash/error.hpp"
#include "itrash/item_tag.hpp"
#include "itrash/runtime.hpp"

using namespace itrash;
using namespace std::chrono_literals;

namespace {

const auto t0 = parse_iso8601("2024-03-04T11:00:00Z");
const std::string user_wallet = "rUserWa11etAbc";

class ThrowingClassifier final : public ClassifierPort
{
public:
  ClassificationOutcome classify(std::string_view) override
  {
    throw Error(ErrorCode::transport, "endpoint down");
  }
};

struct Kiosk
{
  explicit Kiosk(ClassifierPort* override_classifier = nullptr)
    : accounts(bootstrap_reward_wallets(ledger))
    , runtime({ ControllerConfig{}, override_classifier ? *override_classifier : scripted, ledger, accounts, store,
                devices, 9 })
  {
    ledger.register_wallet(user_wallet, "user");
  }

  void present(BinColor predicted, Timestamp at)
  {
    devices.camera.stage(ItemTag{ 1, predicted, ClassificationOutcome::valid(predicted) }.encode());
    runtime.submit({ at, event::MainProximityTriggered{} });
  }

  void tick(Timestamp at) { runtime.submit({ at, event::Tick{ at } }); }

  ScriptedClassifier scripted;
  Ledger ledger;
  RewardAccounts accounts;
  EventStore store;
  DevicePort devices;
  ControllerRuntime runtime;
};

}  // namespace

TEST(Runtime, CorrectDisposalWithQrPaysTheUser)
{
  Kiosk k;
  k.present(BinColor::yellow, t0);
  EXPECT_EQ(k.runtime.snapshot().state, "AwaitDisposal");
  EXPECT_EQ(k.runtime.snapshot().predicted, BinColor::yellow);
  EXPECT_EQ(k.devices.led.current(), LedPattern::solid_yellow);

  k.runtime.submit({ t0 + 3s, event::BinSensorTriggered{ BinColor::yellow } });
  EXPECT_EQ(k.runtime.snapshot().state, "RewardPrompt");
  EXPECT_EQ(k.devices.lcd.current(), LcdScreen::show_qr_prompt);

  k.runtime.submit({ t0 + 5s, event::QrScanned{ make_qr_payload(user_wallet) } });
  EXPECT_EQ(k.ledger.balance(user_wallet), TokenAmount::parse("0.01"));
  EXPECT_EQ(k.ledger.balance(k.accounts.itrash), TokenAmount::parse("99.99"));
  ASSERT_EQ(k.store.size(), 1u);
  auto record = k.store.query().front();
  EXPECT_EQ(record.outcome(), SessionOutcome::rewarded());
  EXPECT_EQ(record.bin_thrown(), BinColor::yellow);
  EXPECT_EQ(k.ledger.transfers().front().memo, record.record_id());

  k.tick(t0 + 5100ms);
  EXPECT_TRUE(k.runtime.state().idle());
  EXPECT_EQ(k.devices.led.current(), LedPattern::ready);
  EXPECT_TRUE(k.runtime.failures().empty());
}

TEST(Runtime, DonationAfterRewardTimeout)
{
  Kiosk k;
  k.present(BinColor::brown, t0);
  k.runtime.submit({ t0 + 2s, event::BinSensorTriggered{ BinColor::brown } });
  k.tick(t0 + 12s);
  EXPECT_EQ(k.runtime.snapshot().state, "DonateMenu");
  EXPECT_EQ(k.devices.lcd.current(), LcdScreen::ngo_menu);
  try {
    k.runtime.donate(5, t0 + 13s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_ngo);
  }
  EXPECT_EQ(k.runtime.donate(3, t0 + 14s), "Reward sent!");
  EXPECT_EQ(k.ledger.balance(k.accounts.ngo(3)), TokenAmount::parse("0.01"));
  EXPECT_EQ(k.store.query().front().outcome(), SessionOutcome::donated(3));
  try {
    k.runtime.donate(3, t0 + 15s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_active_session);
  }
}

TEST(Runtime, WrongBinIsRecordedWithoutReward)
{
  Kiosk k;
  k.present(BinColor::blue, t0);
  k.runtime.submit({ t0 + 2s, event::BinSensorTriggered{ BinColor::brown } });
  EXPECT_EQ(k.store.query().front().outcome(), SessionOutcome::incorrect_bin());
  EXPECT_TRUE(k.ledger.transfers().empty());
  EXPECT_EQ(k.devices.led.current(), LedPattern::error);
}

TEST(Runtime, UnknownWalletIsAFailureNotACrash)
{
  Kiosk k;
  k.present(BinColor::blue, t0);
  k.runtime.submit({ t0 + 2s, event::BinSensorTriggered{ BinColor::blue } });
  k.runtime.submit({ t0 + 3s, event::QrScanned{ make_qr_payload("rSomeoneE1se") } });
  ASSERT_EQ(k.runtime.failures().size(), 1u);
  EXPECT_NE(k.runtime.failures()[0].find("ledger"), std::string::npos);
  EXPECT_EQ(k.ledger.balance(k.accounts.itrash), TokenAmount::whole(100));
  EXPECT_EQ(k.store.size(), 1u);
}

TEST(Runtime, MissingFrameTimesOutToRetry)
{
  Kiosk k;
  k.runtime.submit({ t0, event::MainProximityTriggered{} });
  EXPECT_EQ(k.runtime.snapshot().state, "Capturing");
  k.tick(t0 + 5s);
  EXPECT_EQ(k.runtime.snapshot().state, "PromptRetry");
  EXPECT_EQ(k.devices.lcd.current(), LcdScreen::try_again);
  k.tick(t0 + 8s);
  EXPECT_TRUE(k.runtime.state().idle());
  EXPECT_EQ(k.store.size(), 0u);
}

TEST(Runtime, ClassifierExceptionBecomesInvalid)
{
  ThrowingClassifier broken;
  Kiosk k(&broken);
  k.present(BinColor::blue, t0);
  EXPECT_EQ(k.runtime.snapshot().state, "PromptRetry");
  ASSERT_EQ(k.runtime.failures().size(), 1u);
  EXPECT_NE(k.runtime.failures()[0].find("classifier"), std::string::npos);
}

TEST(Runtime, ObserversSeeVisibleTransitionsInOrder)
{
  Kiosk k;
  std::vector<std::string> seen;
  auto id = k.runtime.subscribe([&](const StateUpdate& u) { seen.push_back(u.state); });
  k.present(BinColor::yellow, t0);
  k.runtime.submit({ t0 + 2s, event::BinSensorTriggered{ BinColor::yellow } });
  k.tick(t0 + 2100ms);
  EXPECT_EQ(seen.back(), "RewardPrompt");
  EXPECT_EQ(seen.front(), "Capturing");
  EXPECT_NE(std::find(seen.begin(), seen.end(), "AwaitDisposal"), seen.end());
  auto count = seen.size();
  k.runtime.unsubscribe(id);
  k.tick(t0 + 20s);
  EXPECT_EQ(seen.size(), count);
  auto j = to_json(k.runtime.snapshot());
  EXPECT_EQ(j["state"], "DonateMenu");
  EXPECT_TRUE(j["deadline"].is_string());
  EXPECT_TRUE(j["predicted"].is_null());
}

TEST(Runtime, LateEventsAreClampedForward)
{
  Kiosk k;
  k.tick(t0 + 10s);
  k.present(BinColor::blue, t0);
  EXPECT_EQ(k.runtime.snapshot().time, t0 + 10s);
  EXPECT_EQ(*k.runtime.snapshot().deadline, t0 + 20s);
}

TEST(Runtime, ConcurrentSubmittersAreSerialized)
{
  Kiosk k;
  std::vector<std::thread> threads;
  for (int p = 0; p < 4; ++p) {
    threads.emplace_back([&, p] {
      for (int i = 0; i < 200; ++i) {
        auto at = t0 + std::chrono::milliseconds{ 100 * i + p };
        k.runtime.submit({ at, event::MainProximityTriggered{} });
        k.runtime.submit({ at, event::Tick{ at } });
      }
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  auto log = k.runtime.effect_log();
  EXPECT_TRUE(std::is_sorted(log.begin(), log.end(), [](auto& a, auto& b) { return a.at < b.at; }));
  EXPECT_EQ(k.store.size(), 0u);
}
