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

#include "itrash/domain.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace itrash {

namespace {

constexpr std::string_view b64_alphabet =
  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c)
{
  if (c >= 'A' && c <= 'Z') {
    return c - 'A';
  }
  if (c >= 'a' && c <= 'z') {
    return c - 'a' + 26;
  }
  if (c >= '0' && c <= '9') {
    return c - '0' + 52;
  }
  if (c == '+') {
    return 62;
  }
  if (c == '/') {
    return 63;
  }
  return -1;
}

std::string lower(std::string_view text)
{
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

nlohmann::json color_or_null(std::optional<BinColor> c)
{
  if (!c) {
    return nullptr;
  }
  return std::string(to_string(*c));
}

std::optional<BinColor> color_field(const nlohmann::json& j, const char* key)
{
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    return std::nullopt;
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::parse_error, std::string(key) + " must be a string");
  }
  return color_from_string(it->get<std::string>());
}

}  // namespace

std::optional<BinColor> parse_color(std::string_view text)
{
  auto l = lower(text);
  for (auto c : all_colors) {
    if (l == to_string(c)) {
      return c;
    }
  }
  return std::nullopt;
}

BinColor color_from_string(std::string_view text)
{
  if (auto c = parse_color(text)) {
    return *c;
  }
  throw Error(ErrorCode::parse_error, "unknown bin color '" + std::string(text) + "'");
}

std::string to_string(const ClassificationOutcome& outcome)
{
  if (auto c = outcome.color()) {
    return std::string(to_string(*c));
  }
  return "invalid";
}

std::string to_string(const SessionOutcome& outcome)
{
  using K = SessionOutcome::Kind;
  switch (outcome.kind) {
    case K::correct_rewarded: return "correct_rewarded";
    case K::correct_unclaimed: return "correct_unclaimed";
    case K::correct_donated:
      return "correct_donated:" + std::to_string(outcome.ngo_id);
    case K::incorrect_bin: return "incorrect_bin";
    case K::timeout: return "timeout";
  }
  return "timeout";
}

SessionOutcome parse_outcome(std::string_view text)
{
  if (text == "correct_rewarded") {
    return SessionOutcome::rewarded();
  }
  if (text == "correct_unclaimed") {
    return SessionOutcome::unclaimed();
  }
  if (text == "incorrect_bin") {
    return SessionOutcome::incorrect_bin();
  }
  if (text == "timeout") {
    return SessionOutcome::timed_out();
  }
  constexpr std::string_view donated = "correct_donated:";
  if (text.substr(0, donated.size()) == donated && text.size() == donated.size() + 1) {
    int ngo = text.back() - '0';
    if (ngo >= 1 && ngo <= 4) {
      return SessionOutcome::donated(ngo);
    }
  }
  throw Error(ErrorCode::parse_error, "unknown outcome '" + std::string(text) + "'");
}

DisposalRecord::DisposalRecord(std::string record_id,
                               std::string image_b64,
                               Timestamp time,
                               std::optional<BinColor> bin_predicted,
                               std::optional<BinColor> bin_thrown,
                               std::optional<BinColor> bin_real,
                               SessionOutcome outcome)
  : record_id_(std::move(record_id))
  , image_b64_(std::move(image_b64))
  , time_(floor_seconds(time))
  , bin_predicted_(bin_predicted)
  , bin_thrown_(bin_thrown)
  , bin_real_(bin_real)
  , outcome_(outcome)
{
  if (record_id_.empty()) {
    throw Error(ErrorCode::invalid_record, "record_id is empty");
  }
  if (!is_base64(image_b64_)) {
    throw Error(ErrorCode::invalid_record,
                "image of " + record_id_ + " is not valid base64");
  }
  if (outcome_.is_correct_disposal() &&
      (!bin_thrown_ || !bin_predicted_ || *bin_thrown_ != *bin_predicted_)) {
    throw Error(ErrorCode::invalid_record,
                record_id_ + ": outcome " + to_string(outcome_) +
                  " requires bin_thrown = bin_predicted");
  }
  if (outcome_.kind == SessionOutcome::Kind::timeout && bin_thrown_) {
    throw Error(ErrorCode::invalid_record,
                record_id_ + ": a timed-out session cannot have bin_thrown");
  }
  if (outcome_.kind == SessionOutcome::Kind::correct_donated &&
      (outcome_.ngo_id < 1 || outcome_.ngo_id > 4)) {
    throw Error(ErrorCode::invalid_record, record_id_ + ": ngo id out of range");
  }
}

std::string DisposalRecord::image_bytes() const
{
  return base64_decode(image_b64_);
}

DisposalRecord DisposalRecord::with_bin_real(BinColor real) const
{
  DisposalRecord copy = *this;
  copy.bin_real_ = real;
  return copy;
}

bool is_correct_prediction(const DisposalRecord& r)
{
  if (!r.bin_predicted() || !r.bin_real()) {
    throw Error(ErrorCode::missing_field,
                r.record_id() + " lacks bin_predicted or bin_real");
  }
  return *r.bin_predicted() == *r.bin_real();
}

bool is_followed_instruction(const DisposalRecord& r)
{
  if (!r.bin_predicted() || !r.bin_thrown()) {
    throw Error(ErrorCode::missing_field,
                r.record_id() + " lacks bin_predicted or bin_thrown");
  }
  return *r.bin_predicted() == *r.bin_thrown();
}

nlohmann::json to_json(const DisposalRecord& r)
{
  nlohmann::json j;
  j["record_id"] = r.record_id();
  j["image_b64"] = r.image_b64();
  j["time"] = format_iso8601(r.time());
  j["bin_predicted"] = color_or_null(r.bin_predicted());
  j["bin_thrown"] = color_or_null(r.bin_thrown());
  j["bin_real"] = color_or_null(r.bin_real());
  j["outcome"] = to_string(r.outcome());
  return j;
}

DisposalRecord record_from_json(const nlohmann::json& j)
{
  if (!j.is_object()) {
    throw Error(ErrorCode::parse_error, "record must be a JSON object");
  }
  for (const char* key : { "record_id", "image_b64", "time", "outcome" }) {
    if (!j.contains(key) || !j.at(key).is_string()) {
      throw Error(ErrorCode::parse_error,
                  std::string("record field '") + key + "' missing or not a string");
    }
  }
  return DisposalRecord(j.at("record_id").get<std::string>(),
                        j.at("image_b64").get<std::string>(),
                        parse_iso8601(j.at("time").get<std::string>()),
                        color_field(j, "bin_predicted"),
                        color_field(j, "bin_thrown"),
                        color_field(j, "bin_real"),
                        parse_outcome(j.at("outcome").get<std::string>()));
}

std::string encode_record(const DisposalRecord& r)
{
  nlohmann::ordered_json j;
  j["record_id"] = r.record_id();
  j["image_b64"] = r.image_b64();
  j["time"] = format_iso8601(r.time());
  j["bin_predicted"] = color_or_null(r.bin_predicted());
  j["bin_thrown"] = color_or_null(r.bin_thrown());
  j["bin_real"] = color_or_null(r.bin_real());
  j["outcome"] = to_string(r.outcome());
  return j.dump();
}

DisposalRecord decode_record(std::string_view line)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
  return record_from_json(j);
}

std::string base64_encode(std::string_view bytes)
{
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    auto n = (static_cast<unsigned char>(bytes[i]) << 16) |
             (static_cast<unsigned char>(bytes[i + 1]) << 8) |
             static_cast<unsigned char>(bytes[i + 2]);
    out += b64_alphabet[(n >> 18) & 63];
    out += b64_alphabet[(n >> 12) & 63];
    out += b64_alphabet[(n >> 6) & 63];
    out += b64_alphabet[n & 63];
  }
  auto rest = bytes.size() - i;
  if (rest == 1) {
    auto n = static_cast<unsigned char>(bytes[i]) << 16;
    out += b64_alphabet[(n >> 18) & 63];
    out += b64_alphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    auto n = (static_cast<unsigned char>(bytes[i]) << 16) |
             (static_cast<unsigned char>(bytes[i + 1]) << 8);
    out += b64_alphabet[(n >> 18) & 63];
    out += b64_alphabet[(n >> 12) & 63];
    out += b64_alphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

bool is_base64(std::string_view text)
{
  if (text.size() % 4 != 0) {
    return false;
  }
  std::size_t padding = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '=') {
      // Padding only in the last two positions, and nothing after it.
      if (i + 2 < text.size()) {
        return false;
      }
      ++padding;
    } else if (padding > 0 || b64_value(text[i]) < 0) {
      return false;
    }
  }
  return true;
}

std::string base64_decode(std::string_view text)
{
  if (!is_base64(text)) {
    throw Error(ErrorCode::parse_error, "invalid base64 text");
  }
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int n_valid = 0;
    for (int k = 0; k < 4; ++k) {
      v[k] = text[i + k] == '=' ? 0 : b64_value(text[i + k]);
      n_valid += text[i + k] == '=' ? 0 : 1;
    }
    auto n = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out += static_cast<char>((n >> 16) & 0xFF);
    if (n_valid > 2) {
      out += static_cast<char>((n >> 8) & 0xFF);
    }
    if (n_valid > 3) {
      out += static_cast<char>(n & 0xFF);
    }
  }
  return out;
}

std::string format_uuid(std::uint64_t hi, std::uint64_t lo)
{
  hi = (hi & ~std::uint64_t{ 0xF000 }) | 0x4000;                 // version 4
  lo = (lo & ~(std::uint64_t{ 0xC } << 60)) | (std::uint64_t{ 0x8 } << 60);  // variant 10
  char buf[40];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                static_cast<unsigned long long>(hi >> 32),
                static_cast<unsigned long long>((hi >> 16) & 0xFFFF),
                static_cast<unsigned long long>(hi & 0xFFFF),
                static_cast<unsigned long long>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xFFFFFFFFFFFFULL));
  return buf;
}

bool is_uuid(std::string_view text)
{
  if (text.size() != 36) {
    return false;
  }
  for (std::size_t i = 0; i < text.size(); ++i) {
    bool dash = i == 8 || i == 13 || i == 18 || i == 23;
    if (dash != (text[i] == '-')) {
      return false;
    }
    if (!dash && !std::isxdigit(static_cast<unsigned char>(text[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace itrash
