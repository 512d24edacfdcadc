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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "itrash/domain.hpp"
#include "itrash/time.hpp"

namespace itrash {

struct RecordFilter
{
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> to;    // exclusive
  /// Outcome kinds to keep; empty keeps all.
  std::set<SessionOutcome::Kind> outcomes;
  bool disposed_only = false;
};

struct AnnotationEntry
{
  std::string record_id;
  std::optional<BinColor> previous;
  BinColor current;
  Timestamp at;
};

/// Append-only store of disposal records. Only bin_real may change after a
/// record is written, and every change leaves an audit entry.
///
/// With a backing file the store keeps one JSON record per line; audit
/// entries go to "<file>.audit.jsonl". Without one it lives in memory.
class EventStore
{
public:
  EventStore() = default;

  /// Opens (or creates) a file-backed store, loading existing lines.
  explicit EventStore(std::filesystem::path path);

  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  /// Throws duplicate_record, or out_of_order if r is older than the last
  /// stored record.
  std::string append(const DisposalRecord& r);

  /// Throws unknown_record.
  DisposalRecord annotate_real(const std::string& record_id, BinColor real, Timestamp at);
  DisposalRecord annotate_real(const std::string& record_id, BinColor real);

  /// Matching records in time order (storage order breaks ties).
  [[nodiscard]] std::vector<DisposalRecord> query(const RecordFilter& filter = {}) const;

  [[nodiscard]] std::optional<DisposalRecord> get(const std::string& record_id) const;
  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::vector<AnnotationEntry> audit_log() const;
  [[nodiscard]] const std::optional<std::filesystem::path>& path() const
  {
    return path_;
  }

  void export_jsonl(std::ostream& out) const;
  void export_jsonl(const std::filesystem::path& out) const;

  /// Appends every record in the stream; returns how many were read.
  std::size_t import_jsonl(std::istream& in);
  std::size_t import_jsonl(const std::filesystem::path& in);

private:
  void append_locked(const DisposalRecord& r);
  void rewrite_file_locked() const;

  mutable std::shared_mutex mutex_;
  std::optional<std::filesystem::path> path_;
  std::vector<DisposalRecord> records_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<AnnotationEntry> audit_;
};

/// Parses records from JSONL text, skipping blank lines.
std::vector<DisposalRecord> read_records(std::istream& in);

}  // namespace itrash
