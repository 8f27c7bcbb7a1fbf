// Copyright 2026 The c3kit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "c3/error.hpp"
#include "c3/expdb.hpp"
#include "support/tempdir.hpp"

using namespace c3;
using nlohmann::json;

namespace {

StoreOptions fast() {
  StoreOptions o;
  o.sync = false;
  return o;
}

EpochEntry entry(const std::string& run, std::int64_t epoch, double mae, double mse = 0.0) {
  EpochEntry e;
  e.run_id = run;
  e.epoch = epoch;
  e.val_mae = mae;
  e.val_mse = mse;
  e.wall_time_s = 1.0;
  return e;
}

}  // namespace

TEST_CASE("open on an empty directory gives an empty store") {
  testing::TempDir dir;
  auto store = open_store(dir / "db", fast());
  CHECK(store.query().empty());
  CHECK(std::filesystem::exists(dir / "db/.lock"));
}

TEST_CASE("entries survive reopen") {
  testing::TempDir dir;
  std::string id;
  {
    auto store = open_store(dir.path(), fast());
    id = store.create_run({{"seed", 1}}, DatasetId::kShtA, "first").run_id;
    store.record_epoch(entry(id, 0, 12.0, 20.0));
    store.record_epoch(entry(id, 1, 10.5, 18.0));
    store.record_epoch(entry(id, 2, 11.0, 19.0));
  }
  CHECK_FALSE(std::filesystem::exists(dir / ".lock"));
  auto store = open_store(dir.path(), fast());
  CHECK(store.epochs(id).size() == 3);
  const auto rows = store.query();
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].epochs == 3);
  CHECK(rows[0].run.notes == "first");
  CHECK(rows[0].best.best_epoch == 1);
  CHECK(rows[0].best.best_mae == 10.5);
  CHECK(rows[0].best.best_mse_at_best_mae == 18.0);
}

TEST_CASE("a second writer is refused; readers are not") {
  testing::TempDir dir;
  auto writer = open_store(dir.path(), fast());
  try {
    open_store(dir.path(), fast());
    FAIL("expected lock error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kLocked);
  }
  StoreOptions ro = fast();
  ro.read_only = true;
  auto reader = open_store(dir.path(), ro);
  CHECK(reader.query().empty());
  CHECK_THROWS_AS(reader.create_run(json::object(), DatasetId::kGcc), Error);
}

TEST_CASE("stale lock from a dead process is broken") {
  testing::TempDir dir;
  testing::write_text(dir / ".lock", "999999999\n");
  auto store = open_store(dir.path(), fast());
  REQUIRE(store.recovery_notes().size() == 1);
  CHECK(store.recovery_notes()[0].find("stale lock") != std::string::npos);
}

TEST_CASE("best tracker: strict improvement, earliest tie, monotone epochs") {
  testing::TempDir dir;
  auto store = open_store(dir.path(), fast());
  const auto id = store.create_run(json::object(), DatasetId::kShtB).run_id;
  CHECK(store.record_epoch(entry(id, 0, 10.5, 1.0)).best_epoch == 0);
  const auto t = store.record_epoch(entry(id, 1, 10.5, 2.0));
  CHECK(t.best_epoch == 0);
  CHECK(t.best_mse_at_best_mae == 1.0);
  store.record_epoch(entry(id, 5, 9.0));
  CHECK_THROWS_AS(store.record_epoch(entry(id, 3, 1.0)), Error);
  CHECK_THROWS_AS(store.record_epoch(entry(id, 5, 1.0)), Error);
  CHECK_THROWS_AS(store.record_epoch(entry("nope", 9, 1.0)), Error);
  CHECK_THROWS_AS(store.record_epoch(entry(id, 9, -1.0)), Error);
  CHECK(store.stored_tracker(id) == store.replayed_tracker(id));
}

TEST_CASE("torn trailing line is truncated on writable open") {
  testing::TempDir dir;
  std::string id;
  {
    auto store = open_store(dir.path(), fast());
    id = store.create_run(json::object(), DatasetId::kQnrf).run_id;
    store.record_epoch(entry(id, 0, 3.0));
    store.record_epoch(entry(id, 1, 2.0));
  }
  const auto epochs_file = dir / "epochs.jsonl";
  const auto good_size = std::filesystem::file_size(epochs_file);
  {
    std::ofstream out(epochs_file, std::ios::app | std::ios::binary);
    out << R"({"run_id":")" << id << R"(","epoch":2,"val_m)";
  }
  {
    StoreOptions ro = fast();
    ro.read_only = true;
    auto reader = open_store(dir.path(), ro);
    CHECK(reader.epochs(id).size() == 2);
    CHECK(std::filesystem::file_size(epochs_file) > good_size);
  }
  auto store = open_store(dir.path(), fast());
  REQUIRE(store.recovery_notes().size() == 1);
  CHECK(store.recovery_notes()[0].find("partial") != std::string::npos);
  CHECK(std::filesystem::file_size(epochs_file) == good_size);
  CHECK(store.record_epoch(entry(id, 2, 1.0)).best_epoch == 2);
}

TEST_CASE("corrupt line in the middle is a data error") {
  testing::TempDir dir;
  {
    auto store = open_store(dir.path(), fast());
    store.create_run(json::object(), DatasetId::kQnrf);
  }
  std::string runs = testing::read_bytes(dir / "runs.jsonl");
  testing::write_text(dir / "runs.jsonl", "garbage\n" + runs);
  CHECK_THROWS_AS(open_store(dir.path(), fast()), Error);
}

TEST_CASE("config hash is canonical") {
  json a = json::parse(R"({"b": 1, "a": {"y": [1, 2.5], "x": "s"}})");
  json b;
  b["a"]["x"] = "s";
  b["a"]["y"] = {1, 2.5};
  b["b"] = 1;
  CHECK(canonical_json(a) == R"({"a":{"x":"s","y":[1,2.5]},"b":1})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 64);
  CHECK(config_hash(json::object()) == "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  CHECK(config_hash(a) != config_hash(json{{"b", 2}}));
}

TEST_CASE("run ids are unique and sortable") {
  const auto t = std::chrono::system_clock::now();
  std::set<std::string> seen;
  std::string prev;
  for (int i = 0; i < 1000; ++i) {
    const auto id = make_run_id(t);
    CHECK(id.size() == 26);
    CHECK(id > prev);
    prev = id;
    seen.insert(id);
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("timestamps") {
  using namespace std::chrono;
  const system_clock::time_point t{milliseconds(1760788800123)};
  CHECK(format_rfc3339(t) == "2025-10-18T12:00:00.123Z");
  CHECK(parse_rfc3339("2025-10-18T12:00:00.123Z") == 1760788800123);
  CHECK(parse_rfc3339("2025-10-18T14:00:00.123+02:00") == 1760788800123);
  CHECK(parse_rfc3339("2025-10-18T12:00:00Z") == 1760788800000);
  CHECK(parse_rfc3339("2025-10-18") == 1760745600000);
  CHECK_THROWS_AS(parse_rfc3339("yesterday"), Error);
  CHECK_THROWS_AS(parse_rfc3339("2025-10-18T12:00:00"), Error);
}

TEST_CASE("query filters and ordering") {
  testing::TempDir dir;
  using namespace std::chrono;
  auto clock_ms = std::make_shared<std::int64_t>(1760788800000);
  StoreOptions o = fast();
  o.clock = [clock_ms] { return system_clock::time_point{milliseconds((*clock_ms) += 60000)}; };
  auto store = open_store(dir.path(), o);
  const auto a = store.create_run({{"lr", 1e-5}}, DatasetId::kShtA);
  const auto b = store.create_run({{"lr", 1e-4}}, DatasetId::kShtB);
  const auto c = store.create_run({{"lr", 1e-3}, {"nested", {{"k", 3}}}}, DatasetId::kShtA);

  const auto all = store.query();
  REQUIRE(all.size() == 3);
  CHECK(all[0].run.run_id == a.run_id);
  CHECK(all[2].run.run_id == c.run_id);

  const auto sht_a = store.query({.dataset = DatasetId::kShtA});
  REQUIRE(sht_a.size() == 2);
  for (const auto& r : sht_a) CHECK(r.run.dataset == DatasetId::kShtA);

  CHECK(store.query({.run_id = b.run_id}).size() == 1);
  CHECK(store.query({.since = b.created_at}).size() == 2);
  CHECK(store.query({.since = "2030-01-01"}).empty());

  // round trip: every run comes back with its exact snapshot
  StoreOptions ro = fast();
  ro.read_only = true;
  auto reader = open_store(dir.path(), ro);
  for (const auto& r : {a, b, c}) {
    const auto rows = reader.query({.run_id = r.run_id});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].run.config_snapshot == r.config_snapshot);
    CHECK(rows[0].run.config_hash == r.config_hash);
    CHECK(rows[0].run.created_at == r.created_at);
  }
}
