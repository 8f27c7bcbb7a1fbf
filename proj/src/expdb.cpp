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

#include "c3/expdb.hpp"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "c3/error.hpp"

namespace c3 {

using nlohmann::json;

namespace {

constexpr const char* kRunsFile = "runs.jsonl";
constexpr const char* kEpochsFile = "epochs.jsonl";
constexpr const char* kLockFile = ".lock";

std::string errno_text() { return std::strerror(errno); }

json best_json(const BestTracker& b) {
  return {{"best_epoch", b.best_epoch}, {"best_mae", b.best_mae}, {"best_mse_at_best_mae", b.best_mse_at_best_mae}};
}

RunRecord run_from_json(const json& j) {
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.created_at = j.at("created_at").get<std::string>();
  r.config_snapshot = j.at("config_snapshot");
  r.config_hash = j.at("config_hash").get<std::string>();
  r.dataset = parse_dataset_id(j.at("dataset").get<std::string>());
  r.notes = j.value("notes", std::string());
  return r;
}

EpochEntry epoch_from_json(const json& j) {
  EpochEntry e;
  e.run_id = j.at("run_id").get<std::string>();
  e.epoch = j.at("epoch").get<std::int64_t>();
  if (j.contains("train_loss") && !j["train_loss"].is_null()) e.train_loss = j["train_loss"].get<double>();
  e.val_mae = j.at("val_mae").get<double>();
  e.val_mse = j.at("val_mse").get<double>();
  e.wall_time_s = j.at("wall_time_s").get<double>();
  return e;
}

struct Lines {
  std::vector<std::string> complete;
  std::size_t good_bytes = 0;  // prefix made of complete lines
  std::size_t total_bytes = 0;
};

Lines read_lines(const std::filesystem::path& file) {
  Lines out;
  std::ifstream in(file, std::ios::binary);
  if (!in) return out;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  out.total_bytes = data.size();
  std::size_t start = 0;
  for (std::size_t nl; (nl = data.find('\n', start)) != std::string::npos; start = nl + 1) {
    out.complete.push_back(data.substr(start, nl - start));
    out.good_bytes = nl + 1;
  }
  return out;
}

// Parses each line; a bad final line is treated like a torn write.
template <typename Fn>
std::size_t parse_lines(const std::filesystem::path& file, Lines& lines, std::vector<std::string>& notes, Fn&& on_line) {
  std::size_t keep_bytes = lines.good_bytes;
  if (lines.total_bytes > lines.good_bytes) {
    notes.push_back(file.filename().string() + ": dropped partial trailing record (" +
                    std::to_string(lines.total_bytes - lines.good_bytes) + " bytes)");
  }
  for (std::size_t i = 0; i < lines.complete.size(); ++i) {
    const std::string& line = lines.complete[i];
    try {
      on_line(json::parse(line));
    } catch (const std::exception& e) {
      if (i + 1 == lines.complete.size()) {
        notes.push_back(file.filename().string() + ": dropped corrupt trailing record: " + e.what());
        keep_bytes -= line.size() + 1;
        break;
      }
      fail(ErrorKind::kData, file.string() + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return keep_bytes;
}

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

bool BestTracker::offer(const EpochEntry& e) {
  if (has_value() && !(e.val_mae < best_mae)) return false;
  run_id = e.run_id;
  best_epoch = e.epoch;
  best_mae = e.val_mae;
  best_mse_at_best_mae = e.val_mse;
  return true;
}

BestTracker replay_tracker(std::span<const EpochEntry> entries) {
  BestTracker t;
  for (const auto& e : entries) t.offer(e);
  return t;
}

std::string canonical_json(const json& value) {
  // nlohmann::json stores objects in a std::map, so keys are already sorted.
  return value.dump(-1, ' ', false, json::error_handler_t::strict);
}

std::string config_hash(const json& value) {
  const std::string text = canonical_json(value);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorKind::kIo, "config_hash: SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string make_run_id(std::chrono::system_clock::time_point now) {
  static std::mutex mu;
  static std::uint64_t last_ms = 0;
  static std::uint64_t rand_hi = 0;  // top 16 of the 80 random bits
  static std::uint64_t rand_lo = 0;  // low 64
  static std::mt19937_64 rng{std::random_device{}()};

  std::lock_guard lock(mu);
  std::uint64_t ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count());
  ms &= (std::uint64_t{1} << 48) - 1;
  if (ms <= last_ms) {
    // same (or earlier) millisecond: bump the random part to stay sortable
    ms = last_ms;
    if (++rand_lo == 0) rand_hi = (rand_hi + 1) & 0xffff;
  } else {
    last_ms = ms;
    rand_hi = rng() & 0xffff;
    rand_lo = rng();
  }

  static constexpr char kCrockford[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
  std::string id(26, '0');
  // 128-bit value: ms (48) | rand_hi (16) | rand_lo (64), encoded as 26 x 5 bits (top 2 bits zero).
  unsigned __int128 v = (static_cast<unsigned __int128>(ms) << 80) | (static_cast<unsigned __int128>(rand_hi) << 64) | rand_lo;
  for (int i = 25; i >= 0; --i) {
    id[static_cast<std::size_t>(i)] = kCrockford[static_cast<unsigned>(v & 31)];
    v >>= 5;
  }
  return id;
}

std::string format_rfc3339(std::chrono::system_clock::time_point t) {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
  const std::time_t secs = static_cast<std::time_t>(ms >= 0 ? ms / 1000 : (ms - 999) / 1000);
  const int frac = static_cast<int>(ms - static_cast<long long>(secs) * 1000);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, frac);
  return buf;
}

std::int64_t parse_rfc3339(const std::string& text) {
  int y, mo, d, h, mi, s, consumed = 0;
  auto bad = [&] { fail(ErrorKind::kInvalidArgument, "not an RFC 3339 timestamp: '" + text + "'"); };
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%*1[Tt ]%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
    // date only
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) == 3 && consumed == static_cast<int>(text.size())) {
      return days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400000;
    }
    bad();
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) bad();
  std::size_t pos = static_cast<std::size_t>(consumed);
  std::int64_t frac_ms = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (digits < 3) frac_ms = frac_ms * 10 + (text[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) bad();
    for (; digits < 3; ++digits) frac_ms *= 10;
  }
  std::int64_t offset_min = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int oh, om, n = 0;
    if (std::sscanf(text.c_str() + pos + 1, "%2d:%2d%n", &oh, &om, &n) != 2) bad();
    offset_min = (text[pos] == '-' ? -1 : 1) * (oh * 60 + om);
    pos += 1 + static_cast<std::size_t>(n);
  } else {
    bad();
  }
  if (pos != text.size()) bad();
  const std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return ((days * 24 + h) * 60 + mi - offset_min) * 60000 + static_cast<std::int64_t>(s) * 1000 + frac_ms;
}

json to_json(const RunRecord& r) {
  return {{"run_id", r.run_id},
          {"created_at", r.created_at},
          {"dataset", to_string(r.dataset)},
          {"config_hash", r.config_hash},
          {"config_snapshot", r.config_snapshot},
          {"notes", r.notes}};
}

json to_json(const EpochEntry& e) {
  return {{"run_id", e.run_id},
          {"epoch", e.epoch},
          {"train_loss", e.train_loss ? json(*e.train_loss) : json(nullptr)},
          {"val_mae", e.val_mae},
          {"val_mse", e.val_mse},
          {"wall_time_s", e.wall_time_s}};
}

json to_json(const BestTracker& b) {
  json j = best_json(b);
  j["run_id"] = b.run_id;
  return j;
}

ExperimentStore ExperimentStore::open(const std::filesystem::path& dir, StoreOptions opts) {
  ExperimentStore store;
  store.dir_ = dir;
  store.opts_ = std::move(opts);
  std::error_code ec;
  if (!store.opts_.read_only) {
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create store directory " + dir.string() + ": " + ec.message());
    const auto lock = dir / kLockFile;
    for (int attempt = 0; attempt < 2; ++attempt) {
      const int fd = ::open(lock.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
      if (fd >= 0) {
        const std::string pid = std::to_string(::getpid()) + "\n";
        [[maybe_unused]] const auto n = ::write(fd, pid.data(), pid.size());
        ::close(fd);
        store.locked_ = true;
        break;
      }
      if (errno != EEXIST) fail(ErrorKind::kIo, "cannot create " + lock.string() + ": " + errno_text());
      // Held: break it only if the owning process is gone.
      long owner = 0;
      std::ifstream(lock) >> owner;
      const bool alive = owner > 0 && (::kill(static_cast<pid_t>(owner), 0) == 0 || errno == EPERM);
      if (alive || attempt > 0) {
        fail(ErrorKind::kLocked, "experiment store " + dir.string() + " is locked by pid " + std::to_string(owner));
      }
      std::filesystem::remove(lock, ec);
      store.notes_.push_back("removed stale lock left by pid " + std::to_string(owner));
    }
  } else if (!std::filesystem::is_directory(dir, ec)) {
    fail(ErrorKind::kIo, "no experiment store at " + dir.string());
  }
  store.load();
  return store;
}

void ExperimentStore::load() {
  auto runs_file = dir_ / kRunsFile;
  auto epochs_file = dir_ / kEpochsFile;

  Lines run_lines = read_lines(runs_file);
  const std::size_t runs_keep = parse_lines(runs_file, run_lines, notes_, [&](const json& j) {
    RunRecord r = run_from_json(j);
    if (config_hash(r.config_snapshot) != r.config_hash) fail(ErrorKind::kData, "run " + r.run_id + ": config_hash mismatch");
    if (runs_.count(r.run_id)) fail(ErrorKind::kData, "duplicate run_id " + r.run_id);
    runs_[r.run_id].record = std::move(r);
  });

  Lines epoch_lines = read_lines(epochs_file);
  const std::size_t epochs_keep = parse_lines(epochs_file, epoch_lines, notes_, [&](const json& j) {
    EpochEntry e = epoch_from_json(j);
    auto it = runs_.find(e.run_id);
    if (it == runs_.end()) fail(ErrorKind::kData, "epoch for unknown run " + e.run_id);
    RunState& st = it->second;
    if (!st.epochs.empty() && e.epoch <= st.epochs.back().epoch) {
      fail(ErrorKind::kData, "run " + e.run_id + ": epochs not increasing");
    }
    const json& b = j.at("best");
    st.stored.run_id = e.run_id;
    st.stored.best_epoch = b.at("best_epoch").get<std::int64_t>();
    st.stored.best_mae = b.at("best_mae").get<double>();
    st.stored.best_mse_at_best_mae = b.at("best_mse_at_best_mae").get<double>();
    st.live.offer(e);
    st.epochs.push_back(std::move(e));
  });

  if (!opts_.read_only) {
    std::error_code ec;
    if (runs_keep < run_lines.total_bytes) std::filesystem::resize_file(runs_file, runs_keep, ec);
    if (!ec && epochs_keep < epoch_lines.total_bytes) std::filesystem::resize_file(epochs_file, epochs_keep, ec);
    if (ec) fail(ErrorKind::kIo, "cannot truncate torn record: " + ec.message());
  }
}

ExperimentStore::ExperimentStore(ExperimentStore&& other) noexcept
    : dir_(std::move(other.dir_)),
      opts_(std::move(other.opts_)),
      locked_(std::exchange(other.locked_, false)),
      notes_(std::move(other.notes_)),
      runs_(std::move(other.runs_)) {}

ExperimentStore& ExperimentStore::operator=(ExperimentStore&& other) noexcept {
  if (this != &other) {
    release();
    dir_ = std::move(other.dir_);
    opts_ = std::move(other.opts_);
    locked_ = std::exchange(other.locked_, false);
    notes_ = std::move(other.notes_);
    runs_ = std::move(other.runs_);
  }
  return *this;
}

ExperimentStore::~ExperimentStore() { release(); }

void ExperimentStore::release() noexcept {
  if (!locked_) return;
  std::error_code ec;
  std::filesystem::remove(dir_ / kLockFile, ec);
  locked_ = false;
}

void ExperimentStore::append_line(const std::filesystem::path& file, const std::string& line) {
  if (opts_.read_only) fail(ErrorKind::kInvalidArgument, "experiment store opened read-only");
  const int fd = ::open(file.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
  if (fd < 0) fail(ErrorKind::kIo, "cannot open " + file.string() + ": " + errno_text());
  const std::string data = line + "\n";
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string err = errno_text();
      ::close(fd);
      fail(ErrorKind::kIo, "write " + file.string() + ": " + err);
    }
    done += static_cast<std::size_t>(n);
  }
  if (opts_.sync && ::fdatasync(fd) != 0) {
    const std::string err = errno_text();
    ::close(fd);
    fail(ErrorKind::kIo, "fdatasync " + file.string() + ": " + err);
  }
  ::close(fd);
}

RunRecord ExperimentStore::create_run(const json& config_snapshot, DatasetId dataset, std::string notes) {
  const auto now = opts_.clock ? opts_.clock() : std::chrono::system_clock::now();
  RunRecord r;
  do {
    r.run_id = make_run_id(now);
  } while (runs_.count(r.run_id));
  r.created_at = format_rfc3339(now);
  r.config_snapshot = config_snapshot;
  r.config_hash = config_hash(config_snapshot);
  r.dataset = dataset;
  r.notes = std::move(notes);
  append_line(dir_ / kRunsFile, canonical_json(to_json(r)));
  runs_[r.run_id].record = r;
  return r;
}

BestTracker ExperimentStore::record_epoch(const EpochEntry& entry) {
  auto it = runs_.find(entry.run_id);
  if (it == runs_.end()) fail(ErrorKind::kInvalidArgument, "record_epoch: unknown run " + entry.run_id);
  RunState& st = it->second;
  if (entry.epoch < 0) fail(ErrorKind::kInvalidArgument, "record_epoch: negative epoch");
  if (!st.epochs.empty() && entry.epoch <= st.epochs.back().epoch) {
    fail(ErrorKind::kInvalidArgument, "record_epoch: epoch " + std::to_string(entry.epoch) + " after epoch " +
                                          std::to_string(st.epochs.back().epoch) + " for run " + entry.run_id);
  }
  auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!finite_nonneg(entry.val_mae) || !finite_nonneg(entry.val_mse) || !finite_nonneg(entry.wall_time_s) ||
      (entry.train_loss && !std::isfinite(*entry.train_loss))) {
    fail(ErrorKind::kInvalidArgument, "record_epoch: metrics must be finite and non-negative");
  }

  BestTracker next = st.live;
  next.offer(entry);
  json line = to_json(entry);
  line["best"] = best_json(next);
  append_line(dir_ / kEpochsFile, canonical_json(line));
  st.live = next;
  st.stored = next;
  st.epochs.push_back(entry);
  return next;
}

const ExperimentStore::RunState& ExperimentStore::state(const std::string& run_id) const {
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorKind::kInvalidArgument, "unknown run " + run_id);
  return it->second;
}

std::vector<EpochEntry> ExperimentStore::epochs(const std::string& run_id) const { return state(run_id).epochs; }

BestTracker ExperimentStore::stored_tracker(const std::string& run_id) const { return state(run_id).stored; }

BestTracker ExperimentStore::replayed_tracker(const std::string& run_id) const { return replay_tracker(state(run_id).epochs); }

std::vector<RunSummary> ExperimentStore::query(const QueryFilter& filter) const {
  const std::optional<std::int64_t> since = filter.since ? std::optional(parse_rfc3339(*filter.since)) : std::nullopt;
  std::vector<RunSummary> out;
  for (const auto& [id, st] : runs_) {
    if (filter.run_id && id != *filter.run_id) continue;
    if (filter.dataset && st.record.dataset != *filter.dataset) continue;
    if (since && parse_rfc3339(st.record.created_at) < *since) continue;
    out.push_back({st.record, st.stored, st.epochs.size()});
  }
  std::sort(out.begin(), out.end(), [](const RunSummary& a, const RunSummary& b) {
    const auto ta = parse_rfc3339(a.run.created_at);
    const auto tb = parse_rfc3339(b.run.created_at);
    return ta != tb ? ta < tb : a.run.run_id < b.run.run_id;
  });
  return out;
}

}  // namespace c3
