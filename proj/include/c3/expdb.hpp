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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "c3/datasets.hpp"

namespace c3 {

/// One experiment, as written to runs.jsonl.
struct RunRecord {
  std::string run_id;      // 26-char Crockford base32, time-sortable
  std::string created_at;  // RFC 3339 UTC, millisecond precision
  nlohmann::json config_snapshot;
  std::string config_hash;  // SHA-256 hex of canonical_json(config_snapshot)
  DatasetId dataset = DatasetId::kCustom;
  std::string notes;
};

struct EpochEntry {
  std::string run_id;
  std::int64_t epoch = 0;
  std::optional<double> train_loss;
  double val_mae = 0.0;
  double val_mse = 0.0;
  double wall_time_s = 0.0;
};

/// Lowest val_mae seen so far; ties keep the earliest epoch.
struct BestTracker {
  std::string run_id;
  std::int64_t best_epoch = -1;
  double best_mae = 0.0;
  double best_mse_at_best_mae = 0.0;

  bool has_value() const noexcept { return best_epoch >= 0; }

  /// Returns true when `e` became the new best.
  bool offer(const EpochEntry& e);

  friend bool operator==(const BestTracker&, const BestTracker&) = default;
};

struct RunSummary {
  RunRecord run;
  BestTracker best;
  std::size_t epochs = 0;
};

struct QueryFilter {
  std::optional<DatasetId> dataset;
  std::optional<std::string> run_id;
  std::optional<std::string> since;  // RFC 3339; runs created at or after
};

struct StoreOptions {
  bool read_only = false;
  /// fsync after every append.
  bool sync = true;
  /// Source of created_at; the system clock when empty.
  std::function<std::chrono::system_clock::time_point()> clock;
};

/// Append-only experiment log in a directory:
///
///   runs.jsonl    one RunRecord per line
///   epochs.jsonl  one EpochEntry per line, each carrying the run's
///                 BestTracker after that epoch
///   .lock         present while a writer holds the store
///
/// One writer at a time (enforced by the lock file); any number of
/// read-only handles. A partial last line left by a crash is truncated on
/// writable open and skipped by readers.
class ExperimentStore {
 public:
  static ExperimentStore open(const std::filesystem::path& dir, StoreOptions opts = {});

  ExperimentStore(ExperimentStore&& other) noexcept;
  ExperimentStore& operator=(ExperimentStore&& other) noexcept;
  ExperimentStore(const ExperimentStore&) = delete;
  ExperimentStore& operator=(const ExperimentStore&) = delete;
  ~ExperimentStore();

  RunRecord create_run(const nlohmann::json& config_snapshot, DatasetId dataset, std::string notes = {});

  BestTracker record_epoch(const EpochEntry& entry);

  /// Runs sorted by (created_at, run_id).
  std::vector<RunSummary> query(const QueryFilter& filter = {}) const;

  std::vector<EpochEntry> epochs(const std::string& run_id) const;

  /// Tracker as persisted in the last epoch line of the run.
  BestTracker stored_tracker(const std::string& run_id) const;

  /// Tracker recomputed from the run's epoch lines alone.
  BestTracker replayed_tracker(const std::string& run_id) const;

  const std::vector<std::string>& recovery_notes() const noexcept { return notes_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }
  bool read_only() const noexcept { return opts_.read_only; }

 private:
  struct RunState {
    RunRecord record;
    std::vector<EpochEntry> epochs;
    BestTracker stored;
    BestTracker live;
  };

  ExperimentStore() = default;
  void load();
  void append_line(const std::filesystem::path& file, const std::string& line);
  void release() noexcept;
  const RunState& state(const std::string& run_id) const;

  std::filesystem::path dir_;
  StoreOptions opts_;
  bool locked_ = false;
  std::vector<std::string> notes_;
  std::map<std::string, RunState> runs_;
};

inline ExperimentStore open_store(const std::filesystem::path& dir, StoreOptions opts = {}) {
  return ExperimentStore::open(dir, std::move(opts));
}

/// Compact JSON with lexicographically ordered keys.
std::string canonical_json(const nlohmann::json& value);

/// Lower-case SHA-256 hex of canonical_json(value).
std::string config_hash(const nlohmann::json& value);

/// Min-scan over epochs in order, same rule as BestTracker::offer.
BestTracker replay_tracker(std::span<const EpochEntry> entries);

/// ULID-style id: 48-bit millisecond timestamp then 80 random bits,
/// Crockford base32. Strictly increasing within a process.
std::string make_run_id(std::chrono::system_clock::time_point now);

std::string format_rfc3339(std::chrono::system_clock::time_point t);

/// Milliseconds since the Unix epoch. Accepts "Z" or "+hh:mm" offsets and an
/// optional fraction.
std::int64_t parse_rfc3339(const std::string& text);

nlohmann::json to_json(const RunRecord& r);
nlohmann::json to_json(const EpochEntry& e);
nlohmann::json to_json(const BestTracker& b);

}  // namespace c3
