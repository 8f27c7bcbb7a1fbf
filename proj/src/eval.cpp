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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "c3/c3dm.hpp"
#include "c3/error.hpp"
#include "c3/labels.hpp"
#include "c3/metrics.hpp"
#include "c3/parallel.hpp"
#include "c3/summation.hpp"

namespace c3 {

using nlohmann::json;

namespace {

std::map<std::string, std::filesystem::path> list_maps(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) fail(ErrorKind::kIo, "not a directory: " + dir.string());
  std::map<std::string, std::filesystem::path> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".c3dm") out[entry.path().stem().string()] = entry.path();
  }
  if (ec) fail(ErrorKind::kIo, "cannot list " + dir.string() + ": " + ec.message());
  return out;
}

struct ImageScore {
  CountPair pair;
  double psnr = 0.0;
  double ssim = 0.0;
  bool zero_gt_peak = false;
};

EvalReport reduce(std::vector<ImageScore> scores, const EvalOptions& opts) {
  EvalReport report;
  report.n_images = scores.size();
  report.flags = opts.flags;
  report.pairs.reserve(scores.size());
  for (const auto& s : scores) report.pairs.push_back(s.pair);
  report.mae = mae(report.pairs);
  report.mse = mse(report.pairs);
  if (opts.with_quality) {
    CompensatedSum p, q;
    for (const auto& s : scores) {
      p.add(s.psnr);
      q.add(s.ssim);
      if (s.zero_gt_peak) report.flags.push_back("psnr_zero_gt_peak:" + s.pair.image_id);
    }
    report.psnr = p.value() / static_cast<double>(scores.size());
    report.ssim = q.value() / static_cast<double>(scores.size());
  }
  return report;
}

ImageScore score(const std::string& id, const DensityMap& pred, const DensityMap& gt, bool with_quality) {
  ImageScore s;
  s.pair = {id, count(pred), count(gt)};
  if (with_quality) {
    try {
      const auto p = psnr_detailed(pred, gt);
      s.psnr = p.db;
      s.zero_gt_peak = p.zero_gt_peak;
      s.ssim = ssim(pred, gt);
    } catch (const Error& e) {
      fail(e.kind(), id + ": " + e.what());
    }
  }
  return s;
}

std::string fmt_number(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

EvalReport evaluate_maps(std::span<const std::string> ids, std::span<const DensityMap> preds,
                         std::span<const DensityMap> gts, const EvalOptions& opts) {
  if (ids.size() != preds.size() || ids.size() != gts.size()) {
    fail(ErrorKind::kInvalidArgument, "evaluate_maps: ids, predictions and ground truth differ in length");
  }
  if (ids.empty()) fail(ErrorKind::kInvalidArgument, "evaluate_maps: nothing to evaluate");
  std::vector<ImageScore> scores(ids.size());
  parallel_for(ids.size(), opts.threads, [&](std::size_t i) { scores[i] = score(ids[i], preds[i], gts[i], opts.with_quality); });
  return reduce(std::move(scores), opts);
}

EvalReport evaluate_run(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir, const EvalOptions& opts) {
  const auto preds = list_maps(pred_dir);
  const auto gts = list_maps(gt_dir);

  std::vector<std::string> missing_pred, missing_gt, ids;
  for (const auto& [id, _] : gts) {
    if (preds.count(id)) {
      ids.push_back(id);
    } else {
      missing_pred.push_back(id);
    }
  }
  for (const auto& [id, _] : preds) {
    if (!gts.count(id)) missing_gt.push_back(id);
  }
  if (!missing_pred.empty() || !missing_gt.empty() || ids.empty()) {
    std::ostringstream msg;
    msg << "evaluate: unmatched image ids";
    auto list = [&](const char* label, const std::vector<std::string>& v) {
      if (v.empty()) return;
      msg << "; " << label << ":";
      for (const auto& id : v) msg << ' ' << id;
    };
    list("no prediction for", missing_pred);
    list("no ground truth for", missing_gt);
    if (ids.empty() && missing_pred.empty() && missing_gt.empty()) msg << "; both directories are empty";
    fail(ErrorKind::kData, msg.str());
  }

  std::vector<ImageScore> scores(ids.size());
  parallel_for(ids.size(), opts.threads, [&](std::size_t i) {
    const auto& id = ids[i];
    scores[i] = score(id, read_c3dm(preds.at(id)), read_c3dm(gts.at(id)), opts.with_quality);
  });
  return reduce(std::move(scores), opts);
}

json to_json(const EvalReport& report) {
  json j;
  j["n_images"] = report.n_images;
  j["mae"] = report.mae;
  j["mse"] = report.mse;
  j["psnr"] = report.psnr ? json(*report.psnr) : json(nullptr);
  j["ssim"] = report.ssim ? json(*report.ssim) : json(nullptr);
  j["flags"] = report.flags;
  return j;
}

std::string format_table(const EvalReport& report) {
  std::ostringstream out;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %12s\n", "metric", "value");
  out << line << std::string(23, '-') << '\n';
  auto row = [&](const char* name, const std::string& v) {
    std::snprintf(line, sizeof line, "%-10s %12s\n", name, v.c_str());
    out << line;
  };
  row("images", std::to_string(report.n_images));
  row("mae", fmt_number(report.mae));
  row("mse", fmt_number(report.mse));
  row("psnr_db", report.psnr ? fmt_number(*report.psnr) : "-");
  row("ssim", report.ssim ? fmt_number(*report.ssim) : "-");
  for (const auto& f : report.flags) out << "flag: " << f << '\n';
  return out.str();
}

std::string format_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "image_id,predicted,actual,abs_err\n";
  for (const auto& p : report.pairs) {
    out << p.image_id << ',' << fmt_number(p.predicted, 6) << ',' << fmt_number(p.actual, 6) << ','
        << fmt_number(std::fabs(p.predicted - p.actual), 6) << '\n';
  }
  return out.str();
}

}  // namespace c3
