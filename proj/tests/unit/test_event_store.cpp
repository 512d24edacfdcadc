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

#include <fstream>
#include <sstream>

#include "itrash/error.hpp"
#include "itrash/event_store.hpp"
#include "oracles.hpp"

using namespace itrash;
using namespace std::chrono_literals;

namespace {

const auto t0 = parse_iso8601("2024-03-04T09:00:00Z");

DisposalRecord timeout_at(std::string id, Timestamp at)
{
  return { std::move(id), "", at, BinColor::blue, std::nullopt, std::nullopt, SessionOutcome::timed_out() };
}

class TempDir
{
public:
  TempDir()
    : path_(std::filesystem::temp_directory_path() /
            ("itrash_store_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name()))
  {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

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

}  // namespace

TEST(EventStore, AppendReturnsIdAndRejectsDuplicates)
{
  EventStore store;
  EXPECT_EQ(store.append(timeout_at("r1", t0)), "r1");
  EXPECT_EQ(code_of([&] { store.append(timeout_at("r1", t0 + 1s)); }), ErrorCode::duplicate_record);
  EXPECT_EQ(store.size(), 1u);
}

TEST(EventStore, RejectsRecordsOlderThanTheLast)
{
  EventStore store;
  store.append(timeout_at("r1", t0 + 10s));
  EXPECT_EQ(code_of([&] { store.append(timeout_at("r2", t0)); }), ErrorCode::out_of_order);
  store.append(timeout_at("r3", t0 + 10s));
  EXPECT_EQ(store.size(), 2u);
}

TEST(EventStore, AnnotateChangesOnlyRealBinAndAudits)
{
  EventStore store;
  DisposalRecord r("r1", base64_encode("img"), t0, BinColor::blue, BinColor::blue, std::nullopt,
                   SessionOutcome::rewarded());
  store.append(r);
  auto updated = store.annotate_real("r1", BinColor::yellow, t0 + 1h);
  EXPECT_EQ(updated.bin_real(), BinColor::yellow);
  EXPECT_EQ(updated.with_bin_real(BinColor::blue), r.with_bin_real(BinColor::blue));
  store.annotate_real("r1", BinColor::brown, t0 + 2h);
  auto audit = store.audit_log();
  ASSERT_EQ(audit.size(), 2u);
  EXPECT_EQ(audit[0].previous, std::nullopt);
  EXPECT_EQ(audit[0].current, BinColor::yellow);
  EXPECT_EQ(audit[1].previous, BinColor::yellow);
  EXPECT_EQ(audit[1].at, t0 + 2h);
  EXPECT_EQ(store.get("r1")->bin_real(), BinColor::brown);
  EXPECT_EQ(code_of([&] { store.annotate_real("nope", BinColor::blue, t0); }), ErrorCode::unknown_record);
}

TEST(EventStore, QueryFiltersMatchReferenceCounts)
{
  EventStore store;
  for (const auto& r : oracle::reference_itrash_records()) {
    store.append(r);
  }
  EXPECT_EQ(store.query().size(), 79u);
  EXPECT_EQ(store.query({ .disposed_only = true }).size(), 67u);
  EXPECT_EQ(store.query({ .outcomes = { SessionOutcome::Kind::timeout } }).size(), 12u);
  auto all = store.query();
  auto mid = all[40].time();
  auto before = store.query({ .to = mid });
  auto after = store.query({ .from = mid });
  EXPECT_EQ(before.size() + after.size(), 79u);
  for (const auto& r : before) {
    EXPECT_LT(r.time(), mid);
  }
  EXPECT_TRUE(store.query({ .from = mid, .to = mid }).empty());
}

TEST(EventStore, FileBackedStoreSurvivesReopen)
{
  TempDir dir;
  auto file = dir.path() / "records.jsonl";
  {
    EventStore store(file);
    store.append(timeout_at("r1", t0));
    store.append(DisposalRecord("r2", "", t0 + 1min, BinColor::yellow, BinColor::yellow, std::nullopt,
                                SessionOutcome::unclaimed()));
    store.annotate_real("r2", BinColor::yellow, t0 + 2h);
  }
  EventStore reopened(file);
  EXPECT_EQ(reopened.size(), 2u);
  EXPECT_EQ(reopened.get("r2")->bin_real(), BinColor::yellow);
  ASSERT_EQ(reopened.audit_log().size(), 1u);
  EXPECT_EQ(reopened.audit_log()[0].record_id, "r2");
  EXPECT_EQ(code_of([&] { reopened.append(timeout_at("r1", t0 + 2min)); }), ErrorCode::duplicate_record);
  std::ifstream in(file);
  EXPECT_EQ(read_records(in).size(), 2u);
}

TEST(EventStore, ExportImportRoundTrip)
{
  EventStore source;
  for (const auto& r : oracle::reference_control_records()) {
    source.append(r);
  }
  std::stringstream buffer;
  source.export_jsonl(buffer);
  EventStore target;
  EXPECT_EQ(target.import_jsonl(buffer), 89u);
  EXPECT_EQ(target.query(), source.query());

  TempDir dir;
  source.export_jsonl(dir.path() / "out.jsonl");
  EventStore from_file;
  EXPECT_EQ(from_file.import_jsonl(dir.path() / "out.jsonl"), 89u);
  EXPECT_EQ(from_file.query(), source.query());
}

TEST(EventStore, ImportReportsBadLine)
{
  std::stringstream in("\n{\"record_id\":\"x\"}\n");
  EventStore store;
  try {
    store.import_jsonl(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(store.import_jsonl(std::filesystem::path("/nonexistent/dir/x.jsonl")), Error);
}
