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

#include "itrash/event_store.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "itrash/error.hpp"

namespace itrash {

namespace {

std::filesystem::path audit_path(const std::filesystem::path& p)
{
  return p.string() + ".audit.jsonl";
}

nlohmann::json to_json(const AnnotationEntry& e)
{
  return { { "record_id", e.record_id },
           { "previous", e.previous ? nlohmann::json(std::string(to_string(*e.previous)))
                                    : nlohmann::json(nullptr) },
           { "bin_real", std::string(to_string(e.current)) },
           { "at", format_iso8601(e.at) } };
}

AnnotationEntry annotation_from_json(const nlohmann::json& j)
{
  AnnotationEntry e;
  e.record_id = j.at("record_id").get<std::string>();
  if (!j.at("previous").is_null()) {
    e.previous = color_from_string(j.at("previous").get<std::string>());
  }
  e.current = color_from_string(j.at("bin_real").get<std::string>());
  e.at = parse_iso8601(j.at("at").get<std::string>());
  return e;
}

}  // namespace

std::vector<DisposalRecord> read_records(std::istream& in)
{
  std::vector<DisposalRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(decode_record(line));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

EventStore::EventStore(std::filesystem::path path)
  : path_(std::move(path))
{
  if (std::filesystem::exists(*path_)) {
    std::ifstream in(*path_);
    if (!in) {
      throw Error(ErrorCode::io, "cannot read " + path_->string());
    }
    for (auto& r : read_records(in)) {
      append_locked(r);
    }
  } else {
    std::ofstream touch(*path_);
    if (!touch) {
      throw Error(ErrorCode::io, "cannot create " + path_->string());
    }
  }
  if (std::ifstream audit(audit_path(*path_)); audit) {
    std::string line;
    while (std::getline(audit, line)) {
      if (!line.empty()) {
        audit_.push_back(annotation_from_json(nlohmann::json::parse(line)));
      }
    }
  }
}

void EventStore::append_locked(const DisposalRecord& r)
{
  if (index_.contains(r.record_id())) {
    throw Error(ErrorCode::duplicate_record, r.record_id());
  }
  if (!records_.empty() && r.time() < records_.back().time()) {
    throw Error(ErrorCode::out_of_order,
                r.record_id() + " at " + format_iso8601(r.time()) + " is older than " +
                  format_iso8601(records_.back().time()));
  }
  index_.emplace(r.record_id(), records_.size());
  records_.push_back(r);
}

std::string EventStore::append(const DisposalRecord& r)
{
  std::unique_lock lock(mutex_);
  append_locked(r);
  if (path_) {
    std::ofstream out(*path_, std::ios::app);
    out << encode_record(r) << '\n';
    if (!out) {
      throw Error(ErrorCode::io, "write to " + path_->string() + " failed");
    }
  }
  return r.record_id();
}

void EventStore::rewrite_file_locked() const
{
  auto tmp = path_->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& r : records_) {
      out << encode_record(r) << '\n';
    }
    if (!out) {
      throw Error(ErrorCode::io, "write to " + tmp + " failed");
    }
  }
  std::filesystem::rename(tmp, *path_);
}

DisposalRecord EventStore::annotate_real(const std::string& record_id, BinColor real, Timestamp at)
{
  std::unique_lock lock(mutex_);
  auto it = index_.find(record_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::unknown_record, record_id);
  }
  auto& slot = records_[it->second];
  AnnotationEntry entry{ record_id, slot.bin_real(), real, at };
  slot = slot.with_bin_real(real);
  audit_.push_back(entry);
  if (path_) {
    rewrite_file_locked();
    std::ofstream audit(audit_path(*path_), std::ios::app);
    audit << to_json(entry).dump() << '\n';
  }
  return slot;
}

DisposalRecord EventStore::annotate_real(const std::string& record_id, BinColor real)
{
  return annotate_real(record_id, real,
                       std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()));
}

std::vector<DisposalRecord> EventStore::query(const RecordFilter& filter) const
{
  std::shared_lock lock(mutex_);
  std::vector<DisposalRecord> out;
  for (const auto& r : records_) {
    if (filter.from && r.time() < *filter.from) {
      continue;
    }
    if (filter.to && r.time() >= *filter.to) {
      continue;
    }
    if (!filter.outcomes.empty() && !filter.outcomes.contains(r.outcome().kind)) {
      continue;
    }
    if (filter.disposed_only && !r.disposed()) {
      continue;
    }
    out.push_back(r);
  }
  // Storage order is already time order; stable_sort keeps ties as stored.
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.time() < b.time();
  });
  return out;
}

std::optional<DisposalRecord> EventStore::get(const std::string& record_id) const
{
  std::shared_lock lock(mutex_);
  auto it = index_.find(record_id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return records_[it->second];
}

std::size_t EventStore::size() const
{
  std::shared_lock lock(mutex_);
  return records_.size();
}

std::vector<AnnotationEntry> EventStore::audit_log() const
{
  std::shared_lock lock(mutex_);
  return audit_;
}

void EventStore::export_jsonl(std::ostream& out) const
{
  std::shared_lock lock(mutex_);
  for (const auto& r : records_) {
    out << encode_record(r) << '\n';
  }
}

void EventStore::export_jsonl(const std::filesystem::path& out) const
{
  std::ofstream file(out, std::ios::trunc);
  if (!file) {
    throw Error(ErrorCode::io, "cannot write " + out.string());
  }
  export_jsonl(file);
}

std::size_t EventStore::import_jsonl(std::istream& in)
{
  auto records = read_records(in);
  for (const auto& r : records) {
    append(r);
  }
  return records.size();
}

std::size_t EventStore::import_jsonl(const std::filesystem::path& in)
{
  std::ifstream file(in);
  if (!file) {
    throw Error(ErrorCode::io, "cannot read " + in.string());
  }
  return import_jsonl(file);
}

}  // namespace itrash
