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

#include "itrash/ledger.hpp"

#include <mutex>

#include "itrash/error.hpp"
#include "itrash/random.hpp"

namespace itrash {

namespace {

constexpr std::string_view base58_alphabet =
  "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

std::string make_address(std::uint64_t salt, std::uint64_t n)
{
  std::string out = "r";
  auto a = splitmix64(salt ^ (n * 0x9E3779B97F4A7C15ULL));
  auto b = splitmix64(a + n);
  for (int i = 0; i < 12; ++i) {
    out += base58_alphabet[a % 58];
    a /= 58;
  }
  for (int i = 0; i < 12; ++i) {
    out += base58_alphabet[b % 58];
    b /= 58;
  }
  return out;
}

std::string make_tx_id(std::uint64_t salt, std::uint64_t n)
{
  static constexpr char hex[] = "0123456789ABCDEF";
  auto h = splitmix64(salt + 0xA5A5A5A5ULL + n);
  std::string out = "TX";
  for (int i = 15; i >= 0; --i) {
    out += hex[(h >> (i * 4)) & 0xF];
  }
  out += '-';
  out += std::to_string(n);
  return out;
}

}  // namespace

nlohmann::json to_json(const Wallet& w)
{
  return { { "address", w.address },
           { "balance", w.balance.to_string() },
           { "label", w.label } };
}

nlohmann::json to_json(const Transfer& t)
{
  return { { "tx_id", t.tx_id },
           { "from", t.from },
           { "to", t.to },
           { "amount", t.amount.to_string() },
           { "time", format_iso8601_ms(t.time) },
           { "memo", t.memo } };
}

Transfer transfer_from_json(const nlohmann::json& j)
{
  try {
    return { j.at("tx_id").get<std::string>(),
             j.at("from").get<std::string>(),
             j.at("to").get<std::string>(),
             TokenAmount::parse(j.at("amount").get<std::string>()),
             parse_iso8601(j.at("time").get<std::string>()),
             j.at("memo").get<std::string>() };
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

Ledger::Ledger(std::uint64_t address_salt)
  : salt_(address_salt)
{
}

Wallet Ledger::create_wallet(std::string_view label, TokenAmount initial_balance)
{
  if (label.empty()) {
    throw Error(ErrorCode::invalid_argument, "wallet label is empty");
  }
  if (initial_balance < TokenAmount{}) {
    throw Error(ErrorCode::invalid_argument, "initial balance is negative");
  }
  std::unique_lock lock(mutex_);
  std::string address;
  do {
    address = make_address(salt_, next_wallet_++);
  } while (index_.contains(address));
  Wallet w{ address, initial_balance, std::string(label) };
  index_.emplace(address, wallets_.size());
  wallets_.push_back(w);
  genesis_.push_back(w);
  return w;
}

Wallet Ledger::register_wallet(std::string_view address,
                               std::string_view label,
                               TokenAmount initial_balance)
{
  if (!is_valid_address(address)) {
    throw Error(ErrorCode::invalid_argument, "bad wallet address " + std::string(address));
  }
  if (label.empty() || initial_balance < TokenAmount{}) {
    throw Error(ErrorCode::invalid_argument, "wallet needs a label and a balance >= 0");
  }
  std::unique_lock lock(mutex_);
  if (index_.contains(address)) {
    throw Error(ErrorCode::invalid_argument, "wallet " + std::string(address) + " exists");
  }
  Wallet w{ std::string(address), initial_balance, std::string(label) };
  index_.emplace(w.address, wallets_.size());
  wallets_.push_back(w);
  genesis_.push_back(w);
  return w;
}

Transfer Ledger::transfer(std::string_view from,
                          std::string_view to,
                          TokenAmount amount,
                          std::string_view memo,
                          Timestamp time)
{
  if (amount <= TokenAmount{}) {
    throw Error(ErrorCode::non_positive_amount,
                "transfer amount " + amount.to_string() + " is not positive");
  }
  if (from == to) {
    throw Error(ErrorCode::invalid_argument, "transfer to the same wallet");
  }
  std::unique_lock lock(mutex_);
  auto src = index_.find(from);
  if (src == index_.end()) {
    throw Error(ErrorCode::unknown_address, "unknown wallet " + std::string(from));
  }
  auto dst = index_.find(to);
  if (dst == index_.end()) {
    throw Error(ErrorCode::unknown_address, "unknown wallet " + std::string(to));
  }
  if (!memo.empty() && memos_.contains(std::string(memo))) {
    throw Error(ErrorCode::duplicate_memo,
                "memo " + std::string(memo) + " was already paid");
  }
  auto& payer = wallets_[src->second];
  if (payer.balance < amount) {
    throw Error(ErrorCode::insufficient_funds,
                payer.address + " holds " + payer.balance.to_string() + ", needs " +
                  amount.to_string());
  }
  payer.balance -= amount;
  wallets_[dst->second].balance += amount;
  Transfer t{ make_tx_id(salt_, log_.size() + 1),
              std::string(from),
              std::string(to),
              amount,
              time,
              std::string(memo) };
  log_.push_back(t);
  if (!memo.empty()) {
    memos_.emplace(memo);
  }
  return t;
}

TokenAmount Ledger::balance(std::string_view address) const
{
  std::shared_lock lock(mutex_);
  auto it = index_.find(address);
  if (it == index_.end()) {
    throw Error(ErrorCode::unknown_address, "unknown wallet " + std::string(address));
  }
  return wallets_[it->second].balance;
}

std::vector<Wallet> Ledger::wallets() const
{
  std::shared_lock lock(mutex_);
  return wallets_;
}

std::vector<Transfer> Ledger::transfers() const
{
  std::shared_lock lock(mutex_);
  return log_;
}

bool Ledger::has_wallet(std::string_view address) const
{
  std::shared_lock lock(mutex_);
  return index_.contains(address);
}

TokenAmount Ledger::total_supply() const
{
  std::shared_lock lock(mutex_);
  TokenAmount sum;
  for (const auto& w : wallets_) {
    sum += w.balance;
  }
  return sum;
}

LedgerSnapshot Ledger::snapshot() const
{
  std::shared_lock lock(mutex_);
  return { genesis_, wallets_, log_ };
}

std::map<std::string, TokenAmount> replay_balances(const std::vector<Wallet>& genesis,
                                                   const std::vector<Transfer>& log)
{
  std::map<std::string, TokenAmount> balances;
  for (const auto& w : genesis) {
    balances[w.address] = w.balance;
  }
  for (const auto& t : log) {
    auto src = balances.find(t.from);
    auto dst = balances.find(t.to);
    if (src == balances.end() || dst == balances.end()) {
      throw Error(ErrorCode::unknown_address, "log references unknown wallet in " + t.tx_id);
    }
    if (t.amount <= TokenAmount{}) {
      throw Error(ErrorCode::non_positive_amount, t.tx_id);
    }
    if (src->second < t.amount) {
      throw Error(ErrorCode::insufficient_funds, "log overdraws in " + t.tx_id);
    }
    src->second -= t.amount;
    dst->second += t.amount;
  }
  return balances;
}

RemoteLedgerAdapter::RemoteLedgerAdapter(std::string endpoint)
  : endpoint_(std::move(endpoint))
{
}

namespace {
[[noreturn]] void not_connected(const std::string& endpoint)
{
  throw Error(ErrorCode::unsupported, "remote ledger at " + endpoint + " is not connected");
}
}  // namespace

Wallet RemoteLedgerAdapter::create_wallet(std::string_view, TokenAmount)
{
  not_connected(endpoint_);
}

Transfer RemoteLedgerAdapter::transfer(std::string_view,
                                       std::string_view,
                                       TokenAmount,
                                       std::string_view,
                                       Timestamp)
{
  not_connected(endpoint_);
}

TokenAmount RemoteLedgerAdapter::balance(std::string_view) const
{
  not_connected(endpoint_);
}

std::vector<Wallet> RemoteLedgerAdapter::wallets() const
{
  not_connected(endpoint_);
}

std::vector<Transfer> RemoteLedgerAdapter::transfers() const
{
  not_connected(endpoint_);
}

void check_ngo_id(int ngo_id)
{
  if (ngo_id < 1 || ngo_id > ngo_count) {
    throw Error(ErrorCode::invalid_ngo,
                "ngo id " + std::to_string(ngo_id) + " is not in 1..4");
  }
}

const std::string& RewardAccounts::ngo(int ngo_id) const
{
  check_ngo_id(ngo_id);
  return ngos[static_cast<std::size_t>(ngo_id - 1)];
}

RewardAccounts bootstrap_reward_wallets(LedgerPort& ledger, TokenAmount itrash_balance)
{
  RewardAccounts accounts;
  accounts.itrash = ledger.create_wallet("itrash", itrash_balance).address;
  for (int i = 0; i < ngo_count; ++i) {
    accounts.ngos[static_cast<std::size_t>(i)] =
      ledger.create_wallet("ngo_" + std::to_string(i + 1), TokenAmount{}).address;
  }
  return accounts;
}

bool is_valid_address(std::string_view address)
{
  if (address.size() < 6 || address.size() > 35 || address.front() != 'r') {
    return false;
  }
  for (auto c : address.substr(1)) {
    if (base58_alphabet.find(c) == std::string_view::npos) {
      return false;
    }
  }
  return true;
}

std::string parse_qr(std::string_view payload)
{
  constexpr std::string_view prefix = "itrash://wallet/";
  if (payload.substr(0, prefix.size()) != prefix) {
    throw Error(ErrorCode::malformed_payload,
                "QR payload is not an itrash wallet link: '" + std::string(payload) + "'");
  }
  auto address = payload.substr(prefix.size());
  if (!is_valid_address(address)) {
    throw Error(ErrorCode::malformed_payload,
                "QR payload carries an invalid address: '" + std::string(address) + "'");
  }
  return std::string(address);
}

std::string make_qr_payload(std::string_view address)
{
  return "itrash://wallet/" + std::string(address);
}

}  // namespace itrash
