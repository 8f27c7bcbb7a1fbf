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

#include "c3/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "c3/error.hpp"
#include "c3/summation.hpp"

namespace c3 {

namespace {

void require_pairs(std::span<const CountPair> pairs, const char* what) {
  if (pairs.empty()) fail(ErrorKind::kInvalidArgument, std::string(what) + ": no pairs");
}

void require_same_shape(const DensityMap& a, const DensityMap& b, const char* what) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::kData, std::string(what) + ": dimension mismatch " + std::to_string(a.height) + "x" +
                               std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" + std::to_string(b.width));
  }
}

double peak(const DensityMap& m) {
  double p = 0.0;
  for (double v : m.values) p = std::max(p, v);
  return p / m.norm_factor;
}

// Denormalized copy divided by `scale`.
std::vector<double> scaled(const DensityMap& m, double scale) {
  std::vector<double> out(m.values.size());
  const double k = 1.0 / (m.norm_factor * scale);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = m.values[i] * k;
  return out;
}

// Valid-mode separable correlation with a symmetric 1-D kernel.
std::vector<double> filter_valid(const std::vector<double>& img, int h, int w, const std::vector<double>& k) {
  const int n = static_cast<int>(k.size());
  const int oh = h - n + 1;
  const int ow = w - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    const double* row = img.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * row[c + i];
      tmp[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += k[i] * tmp[static_cast<std::size_t>(r + i) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = s;
    }
  }
  return out;
}

std::vector<double> gaussian_1d(int size, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(size));
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    k[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

double mae(std::span<const CountPair> pairs) {
  require_pairs(pairs, "mae");
  CompensatedSum acc;
  for (const CountPair& p : pairs) acc.add(std::fabs(p.predicted - p.actual));
  return acc.value() / static_cast<double>(pairs.size());
}

double mse(std::span<const CountPair> pairs) {
  require_pairs(pairs, "mse");
  CompensatedSum acc;
  for (const CountPair& p : pairs) {
    const double d = p.predicted - p.actual;
    acc.add(d * d);
  }
  return std::sqrt(acc.value() / static_cast<double>(pairs.size()));
}

PsnrResult psnr_detailed(const DensityMap& pred, const DensityMap& gt) {
  require_same_shape(pred, gt, "psnr");
  PsnrResult result;
  double scale = peak(gt);
  if (scale <= 0.0) {
    scale = peak(pred);
    if (scale <= 0.0) return result;  // both all-zero
    result.zero_gt_peak = true;
  }
  const auto p = scaled(pred, scale);
  const auto g = scaled(gt, scale);
  CompensatedSum acc;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - g[i];
    acc.add(d * d);
  }
  const double mean_sq = acc.value() / static_cast<double>(p.size());
  if (mean_sq > 0.0) result.db = std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mean_sq));
  return result;
}

double psnr(const DensityMap& pred, const DensityMap& gt) { return psnr_detailed(pred, gt).db; }

double ssim(const DensityMap& pred, const DensityMap& gt) {
  require_same_shape(pred, gt, "ssim");
  if (gt.height < kSsimWindow || gt.width < kSsimWindow) {
    fail(ErrorKind::kInvalidArgument, "ssim: map smaller than the 11x11 window");
  }
  double scale = peak(gt);
  if (scale <= 0.0) scale = peak(pred);
  if (scale <= 0.0) return 1.0;  // both all-zero

  const int h = gt.height;
  const int w = gt.width;
  const auto x = scaled(pred, scale);
  const auto y = scaled(gt, scale);
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto k = gaussian_1d(kSsimWindow, kSsimSigma);
  const auto mu_x = filter_valid(x, h, w, k);
  const auto mu_y = filter_valid(y, h, w, k);
  const auto e_xx = filter_valid(xx, h, w, k);
  const auto e_yy = filter_valid(yy, h, w, k);
  const auto e_xy = filter_valid(xy, h, w, k);

  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  CompensatedSum acc;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cxy = e_xy[i] - mx * my;
    const double s = ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    acc.add(std::clamp(s, -1.0, 1.0));
  }
  return acc.value() / static_cast<double>(mu_x.size());
}

}  // namespace c3
