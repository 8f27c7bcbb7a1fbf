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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "c3/density.hpp"

namespace c3 {

struct CountPair {
  std::string image_id;
  double predicted = 0.0;
  double actual = 0.0;
};

struct EvalReport {
  std::size_t n_images = 0;
  double mae = 0.0;
  double mse = 0.0;  // root-mean-square, as reported in the counting literature
  std::optional<double> psnr;
  std::optional<double> ssim;
  std::vector<std::string> flags;
  std::vector<CountPair> pairs;
};

/// PSNR of identical maps, and the ceiling for everything else.
inline constexpr double kPsnrCapDb = 120.0;

double mae(std::span<const CountPair> pairs);

/// Root of the mean squared count error.
double mse(std::span<const CountPair> pairs);

struct PsnrResult {
  double db = kPsnrCapDb;
  /// gt was all zero, so pred's own peak set the scale.
  bool zero_gt_peak = false;
};

/// Both maps are denormalized and divided by max(gt) so the gt peak is 1.0.
PsnrResult psnr_detailed(const DensityMap& pred, const DensityMap& gt);
double psnr(const DensityMap& pred, const DensityMap& gt);

/// Mean structural similarity over all valid 11x11 windows (Gaussian
/// weights, sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1 after the
/// same peak scaling as psnr.
double ssim(const DensityMap& pred, const DensityMap& gt);

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

struct EvalOptions {
  bool with_quality = false;
  int threads = 1;
  /// Provenance notes copied into the report, e.g. "downsampled_targets:8".
  std::vector<std::string> flags;
};

/// Pairs `<id>.c3dm` files across the two directories and scores them.
EvalReport evaluate_run(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir, const EvalOptions& opts);

/// Scores in-memory pairs (same order, same ids) without touching disk.
EvalReport evaluate_maps(std::span<const std::string> ids, std::span<const DensityMap> preds,
                         std::span<const DensityMap> gts, const EvalOptions& opts);

nlohmann::json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);
/// `image_id,predicted,actual,abs_err`
std::string format_csv(const EvalReport& report);

}  // namespace c3
