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

#include <array>
#include <cstdint>
#include <map>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "itrash/time.hpp"
#include "itrash/tokens.hpp"

namespace itrash {

struct Wallet
{
  std::string address;
  TokenAmount balance;
  std::string label;

  friend bool operator==(const Wallet&, const Wallet&) = default;
};

struct Transfer
{
  std::string tx_id;
  std::string from;
  std::string to;
  TokenAmount amount;
  Timestamp time;
  std::string memo;

  friend bool operator==(const Transfer&, const Transfer&) = default;
};

nlohmann::json to_json(const Wallet& w);
nlohmann::json to_json(const Transfer& t);
Transfer transfer_from_json(const nlohmann::json& j);

/// Operations a ledger backend must offer. The in-process Ledger below is the
/// default; a network client for a real chain would implement the same port.
class LedgerPort
{
public:
  virtual ~LedgerPort() = default;

  virtual Wallet create_wallet(std::string_view label, TokenAmount initial_balance) = 0;
  virtual Transfer transfer(std::string_view from,
                            std::string_view to,
                            TokenAmount amount,
                            std::string_view memo,
                            Timestamp time) = 0;
  [[nodiscard]] virtual TokenAmount balance(std::string_view address) const = 0;
  [[nodiscard]] virtual std::vector<Wallet> wallets() const = 0;
  [[nodiscard]] virtual std::vector<Transfer> transfers() const = 0;
};

/// Consistent view of a ledger taken under one lock.
struct LedgerSnapshot
{
  std::vector<Wallet> genesis;  // wallets as created, with initial balances
  std::vector<Wallet> wallets;  // current balances
  std::vector<Transfer> transfers;
};

/// In-process ledger with zero fees. Transfers are serialized behind a
/// single writer lock; readers share.
class Ledger final : public LedgerPort
{
public:
  explicit Ledger(std::uint64_t address_salt = 0);

  Wallet create_wallet(std::string_view label, TokenAmount initial_balance) override;

  /// Atomically debits `from` and credits `to`. A non-empty memo may be used
  /// once per ledger, which caps rewards at one per session.
  Transfer transfer(std::string_view from,
                    std::string_view to,
                    TokenAmount amount,
                    std::string_view memo,
                    Timestamp time) override;

  [[nodiscard]] TokenAmount balance(std::string_view address) const override;
  [[nodiscard]] std::vector<Wallet> wallets() const override;
  [[nodiscard]] std::vector<Transfer> transfers() const override;

  /// Adds a wallet that already exists elsewhere (a user's own wallet).
  /// Throws invalid_argument for a bad or duplicate address.
  Wallet register_wallet(std::string_view address,
                         std::string_view label,
                         TokenAmount initial_balance = {});

  [[nodiscard]] bool has_wallet(std::string_view address) const;
  [[nodiscard]] TokenAmount total_supply() const;
  [[nodiscard]] LedgerSnapshot snapshot() const;

private:
  mutable std::shared_mutex mutex_;
  std::uint64_t salt_;
  std::uint64_t next_wallet_ = 0;
  std::vector<Wallet> genesis_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<Wallet> wallets_;
  std::vector<Transfer> log_;
  std::unordered_set<std::string> memos_;
};

/// Applies a transfer log to genesis balances. Throws if any step would be
/// rejected by the ledger (unknown address, overdraft, non-positive amount).
std::map<std::string, TokenAmount> replay_balances(const std::vector<Wallet>& genesis,
                                                   const std::vector<Transfer>& log);

/// Placeholder for a network-backed XRP client. Every operation fails with
/// `unsupported`; it exists so the runtime can be wired against LedgerPort.
class RemoteLedgerAdapter final : public LedgerPort
{
public:
  explicit RemoteLedgerAdapter(std::string endpoint);

  Wallet create_wallet(std::string_view label, TokenAmount initial_balance) override;
  Transfer transfer(std::string_view from,
                    std::string_view to,
                    TokenAmount amount,
                    std::string_view memo,
                    Timestamp time) override;
  [[nodiscard]] TokenAmount balance(std::string_view address) const override;
  [[nodiscard]] std::vector<Wallet> wallets() const override;
  [[nodiscard]] std::vector<Transfer> transfers() const override;

  [[nodiscard]] const std::string& endpoint() const
  {
    return endpoint_;
  }

private:
  std::string endpoint_;
};

inline constexpr int ngo_count = 4;
inline constexpr std::string_view reward_sent_message = "Reward sent!";

/// The five wallets a kiosk needs: its own and one per NGO.
struct RewardAccounts
{
  std::string itrash;
  std::array<std::string, ngo_count> ngos;

  /// Throws invalid_ngo unless 1 <= ngo_id <= 4.
  [[nodiscard]] const std::string& ngo(int ngo_id) const;
};

RewardAccounts bootstrap_reward_wallets(LedgerPort& ledger,
                                        TokenAmount itrash_balance = TokenAmount::whole(100));

/// Throws invalid_ngo unless 1 <= ngo_id <= 4.
void check_ngo_id(int ngo_id);

/// "r" followed by 5..34 base58 characters.
bool is_valid_address(std::string_view address);

/// Wallet QR codes carry "itrash://wallet/<address>". Throws malformed_payload
/// on anything else.
std::string parse_qr(std::string_view payload);
std::string make_qr_payload(std::string_view address);

}  // namespace itrash
