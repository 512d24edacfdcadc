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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "itrash/domain.hpp"
#include "itrash/random.hpp"
#include "itrash/time.hpp"

namespace itrash {

class ClassifierPort
{
public:
  virtual ~ClassifierPort() = default;
  virtual ClassificationOutcome classify(std::string_view image) = 0;
};

/// rows[real][predicted] = P(predicted | real), indexed by index_of(BinColor).
/// invalid_rate is applied before the row draw.
struct ConfusionTable
{
  std::array<std::array<double, 3>, 3> rows{};
  double invalid_rate = 0.0;

  /// Throws invalid_table: negative entries, rows not summing to 1 within
  /// 1e-9, or invalid_rate outside [0, 1].
  void validate() const;

  [[nodiscard]] double p(BinColor real, BinColor predicted) const
  {
    return rows[index_of(real)][index_of(predicted)];
  }

  static ConfusionTable identity();

  /// Row-normalised predicted-given-real counts of the 67 analysed items:
  /// brown 14/14, blue 11/4/2 of 17, yellow 30/3/3 of 36.
  static ConfusionTable field_trial_fit();

  /// field_trial_fit() with 12 of 79 presentations unreadable.
  static ConfusionTable presentation_noise();

  friend bool operator==(const ConfusionTable&, const ConfusionTable&) = default;
};

/// {"rows": {"blue": {"blue": p, "yellow": p, "brown": p}, ...}, "invalid_rate": p}
nlohmann::json to_json(const ConfusionTable& t);
ConfusionTable confusion_table_from_json(const nlohmann::json& j);
ConfusionTable load_confusion_table(const std::filesystem::path& path);

/// Deterministic for a given seed.
ClassificationOutcome classify_simulated(BinColor true_label,
                                         const ConfusionTable& table,
                                         std::uint64_t seed);

/// Row-normalised counts of bin_predicted given bin_real. Every record must
/// carry both. A real class with no records gets an identity row and a
/// warning appended to `warnings` (when given).
ConfusionTable fit_confusion_table(std::span<const DisposalRecord> records,
                                   std::vector<std::string>* warnings = nullptr);

/// Draws predictions for tagged simulated frames from a confusion table.
/// Untagged frames or frames without a real label classify as Invalid.
class SimulatedClassifier final : public ClassifierPort
{
public:
  SimulatedClassifier(ConfusionTable table, std::uint64_t seed);
  ClassificationOutcome classify(std::string_view image) override;

private:
  ConfusionTable table_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

/// Returns exactly the prediction scripted in the frame's tag; used by trace
/// replay so classifier output matches the scenario cell.
class ScriptedClassifier final : public ClassifierPort
{
public:
  ClassificationOutcome classify(std::string_view image) override;
};

struct RemoteClassifierConfig
{
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  /// Name of the environment variable holding the bearer token.
  std::string auth_token_env = "ITRASH_CLASSIFIER_TOKEN";
  Duration timeout = std::chrono::seconds{ 15 };
  int max_retries = 2;
  std::string prompt;

  static RemoteClassifierConfig from_json(const nlohmann::json& j);
  static RemoteClassifierConfig load(const std::filesystem::path& path);
};

/// Maps a model reply to an outcome: one of blue/yellow/brown/invalid,
/// case-insensitive, surrounding whitespace, quotes and a trailing period
/// ignored. Anything else is Invalid.
ClassificationOutcome parse_classifier_reply(std::string_view reply);

/// Vision API client speaking the chat-completions request shape. Transport
/// errors are retried `max_retries` times, then rethrown; a timeout yields
/// Invalid and a logged warning.
class RemoteClassifier final : public ClassifierPort
{
public:
  explicit RemoteClassifier(RemoteClassifierConfig config);
  ClassificationOutcome classify(std::string_view image) override;

  [[nodiscard]] nlohmann::json build_request(std::string_view image) const;

private:
  RemoteClassifierConfig config_;
};

}  // namespace itrash
