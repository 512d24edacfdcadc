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

#include "itrash/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <httplib.h>

#include "itrash/error.hpp"
#include "itrash/item_tag.hpp"

namespace itrash {

void ConfusionTable::validate() const
{
  if (!(invalid_rate >= 0.0 && invalid_rate <= 1.0)) {
    throw Error(ErrorCode::invalid_table, "invalid_rate outside [0, 1]");
  }
  for (auto real : all_colors) {
    double sum = 0.0;
    for (auto pred : all_colors) {
      auto v = p(real, pred);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::invalid_table,
                    "negative entry in row " + std::string(to_string(real)));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::invalid_table,
                  "row " + std::string(to_string(real)) + " sums to " + std::to_string(sum));
    }
  }
}

ConfusionTable ConfusionTable::identity()
{
  ConfusionTable t;
  for (auto c : all_colors) {
    t.rows[index_of(c)][index_of(c)] = 1.0;
  }
  return t;
}

ConfusionTable ConfusionTable::field_trial_fit()
{
  ConfusionTable t;
  auto set = [&](BinColor real, BinColor pred, double v) {
    t.rows[index_of(real)][index_of(pred)] = v;
  };
  set(BinColor::brown, BinColor::brown, 1.0);
  set(BinColor::blue, BinColor::blue, 11.0 / 17.0);
  set(BinColor::blue, BinColor::brown, 4.0 / 17.0);
  set(BinColor::blue, BinColor::yellow, 2.0 / 17.0);
  set(BinColor::yellow, BinColor::yellow, 30.0 / 36.0);
  set(BinColor::yellow, BinColor::blue, 3.0 / 36.0);
  set(BinColor::yellow, BinColor::brown, 3.0 / 36.0);
  return t;
}

ConfusionTable ConfusionTable::presentation_noise()
{
  auto t = field_trial_fit();
  t.invalid_rate = 12.0 / 79.0;
  return t;
}

nlohmann::json to_json(const ConfusionTable& t)
{
  nlohmann::json rows = nlohmann::json::object();
  for (auto real : all_colors) {
    nlohmann::json row = nlohmann::json::object();
    for (auto pred : all_colors) {
      row[std::string(to_string(pred))] = t.p(real, pred);
    }
    rows[std::string(to_string(real))] = row;
  }
  return { { "rows", rows }, { "invalid_rate", t.invalid_rate } };
}

ConfusionTable confusion_table_from_json(const nlohmann::json& j)
{
  ConfusionTable t;
  try {
    const auto& rows = j.at("rows");
    for (auto real : all_colors) {
      const auto& row = rows.at(std::string(to_string(real)));
      for (auto pred : all_colors) {
        t.rows[index_of(real)][index_of(pred)] =
          row.value(std::string(to_string(pred)), 0.0);
      }
    }
    t.invalid_rate = j.value("invalid_rate", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_table, e.what());
  }
  t.validate();
  return t;
}

ConfusionTable load_confusion_table(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  try {
    return confusion_table_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

ClassificationOutcome classify_simulated(BinColor true_label,
                                         const ConfusionTable& table,
                                         std::uint64_t seed)
{
  table.validate();
  Rng rng(seed);
  if (draw_unit(rng) < table.invalid_rate) {
    return ClassificationOutcome::invalid();
  }
  auto u = draw_unit(rng);
  const auto& row = table.rows[index_of(true_label)];
  double acc = 0.0;
  for (auto pred : all_colors) {
    acc += row[index_of(pred)];
    if (u < acc) {
      return ClassificationOutcome::valid(pred);
    }
  }
  // u landed in the rounding slack above the last cumulative sum.
  for (auto it = all_colors.rbegin(); it != all_colors.rend(); ++it) {
    if (row[index_of(*it)] > 0.0) {
      return ClassificationOutcome::valid(*it);
    }
  }
  return ClassificationOutcome::valid(true_label);
}

ConfusionTable fit_confusion_table(std::span<const DisposalRecord> records,
                                   std::vector<std::string>* warnings)
{
  if (records.empty()) {
    throw Error(ErrorCode::empty_input, "no records to fit");
  }
  std::array<std::array<std::size_t, 3>, 3> counts{};
  std::string missing;
  for (const auto& r : records) {
    if (!r.bin_predicted() || !r.bin_real()) {
      missing += (missing.empty() ? "" : ", ") + r.record_id();
      continue;
    }
    ++counts[index_of(*r.bin_real())][index_of(*r.bin_predicted())];
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::missing_annotation,
                "records lack bin_predicted or bin_real: " + missing);
  }
  ConfusionTable t;
  for (auto real : all_colors) {
    auto& row = counts[index_of(real)];
    std::size_t total = row[0] + row[1] + row[2];
    if (total == 0) {
      t.rows[index_of(real)][index_of(real)] = 1.0;
      auto msg = "no records with bin_real=" + std::string(to_string(real)) +
                 "; using an identity row";
      std::clog << "warning: " << msg << '\n';
      if (warnings) {
        warnings->push_back(msg);
      }
      continue;
    }
    for (auto pred : all_colors) {
      t.rows[index_of(real)][index_of(pred)] =
        static_cast<double>(row[index_of(pred)]) / static_cast<double>(total);
    }
  }
  return t;
}

SimulatedClassifier::SimulatedClassifier(ConfusionTable table, std::uint64_t seed)
  : table_(table)
  , seed_(seed)
{
  table_.validate();
}

ClassificationOutcome SimulatedClassifier::classify(std::string_view image)
{
  auto tag = ItemTag::decode(image);
  if (!tag || !tag->real) {
    return ClassificationOutcome::invalid();
  }
  return classify_simulated(*tag->real, table_, splitmix64(seed_ + calls_++));
}

ClassificationOutcome ScriptedClassifier::classify(std::string_view image)
{
  auto tag = ItemTag::decode(image);
  if (!tag || !tag->predicted) {
    return ClassificationOutcome::invalid();
  }
  return *tag->predicted;
}

RemoteClassifierConfig RemoteClassifierConfig::from_json(const nlohmann::json& j)
{
  RemoteClassifierConfig c;
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.path = j.value("path", c.path);
    c.model = j.value("model", c.model);
    c.auth_token_env = j.value("auth_token_env", c.auth_token_env);
    c.timeout = std::chrono::milliseconds{ j.value("timeout_ms", c.timeout.count()) };
    c.max_retries = j.value("max_retries", c.max_retries);
    c.prompt = j.at("prompt").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("classifier config: ") + e.what());
  }
  return c;
}

RemoteClassifierConfig RemoteClassifierConfig::load(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open " + path.string());
  }
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse_error, e.what());
  }
}

ClassificationOutcome parse_classifier_reply(std::string_view reply)
{
  auto is_trim = [](unsigned char c) {
    return std::isspace(c) || c == '"' || c == '\'' || c == '.' || c == '`';
  };
  while (!reply.empty() && is_trim(static_cast<unsigned char>(reply.front()))) {
    reply.remove_prefix(1);
  }
  while (!reply.empty() && is_trim(static_cast<unsigned char>(reply.back()))) {
    reply.remove_suffix(1);
  }
  if (auto c = parse_color(reply)) {
    return ClassificationOutcome::valid(*c);
  }
  return ClassificationOutcome::invalid();
}

RemoteClassifier::RemoteClassifier(RemoteClassifierConfig config)
  : config_(std::move(config))
{
  if (config_.base_url.empty()) {
    throw Error(ErrorCode::invalid_argument, "classifier base_url is empty");
  }
}

nlohmann::json RemoteClassifier::build_request(std::string_view image) const
{
  nlohmann::json content = nlohmann::json::array();
  content.push_back({ { "type", "text" }, { "text", config_.prompt } });
  content.push_back(
    { { "type", "image_url" },
      { "image_url", { { "url", "data:image/png;base64," + base64_encode(image) } } } });
  return { { "model", config_.model },
           { "max_tokens", 5 },
           { "messages", nlohmann::json::array({ { { "role", "user" }, { "content", content } } }) } };
}

ClassificationOutcome RemoteClassifier::classify(std::string_view image)
{
  if (image.empty()) {
    throw Error(ErrorCode::invalid_argument, "cannot classify an empty image");
  }
  const auto body = build_request(image).dump();
  httplib::Headers headers;
  if (const char* token = std::getenv(config_.auth_token_env.c_str()); token && *token) {
    headers.emplace("Authorization", std::string("Bearer ") + token);
  }
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    auto result = client.Post(config_.path, headers, body, "application/json");
    if (!result) {
      auto err = result.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        std::clog << "warning: classifier request timed out after "
                  << config_.timeout.count() << " ms; treating image as invalid\n";
        return ClassificationOutcome::invalid();
      }
      last_error = httplib::to_string(err);
      continue;
    }
    if (result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw Error(ErrorCode::transport,
                  "classifier endpoint answered HTTP " + std::to_string(result->status));
    }
    auto reply = nlohmann::json::parse(result->body, nullptr, false);
    if (reply.is_discarded()) {
      return ClassificationOutcome::invalid();
    }
    std::string text;
    try {
      if (reply.contains("choices")) {
        text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } else {
        text = reply.at("text").get<std::string>();
      }
    } catch (const nlohmann::json::exception&) {
      return ClassificationOutcome::invalid();
    }
    return parse_classifier_reply(text);
  }
  throw Error(ErrorCode::transport,
              "classifier unreachable after " + std::to_string(config_.max_retries + 1) +
                " attempts: " + last_error);
}

}  // namespace itrash
