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

// Independent reference computations used only by tests. Nothing here calls
// into the library code paths it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "c3/density.hpp"
#include "c3/ingest.hpp"

namespace c3::oracle {

/// O(n^2) mean distance to the k nearest other points.
inline std::vector<double> brute_knn_mean(const std::vector<Point>& pts, std::size_t k) {
  std::vector<double> out(pts.size(), 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      const double dx = pts[i].x - pts[j].x;
      const double dy = pts[i].y - pts[j].y;
      d.push_back(std::sqrt(dx * dx + dy * dy));
    }
    if (d.empty()) continue;
    std::sort(d.begin(), d.end());
    const std::size_t m = std::min(k, d.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < m; ++t) sum += d[t];
    out[i] = sum / static_cast<double>(m);
  }
  return out;
}

/// Unnormalized isotropic Gaussian samples divided by their own sum.
inline std::vector<double> direct_gaussian(int size, double sigma) {
  std::vector<double> k;
  const int half = size / 2;
  double s = 0.0;
  for (int r = -half; r <= half; ++r)
    for (int c = -half; c <= half; ++c) {
      k.push_back(std::exp(-(r * r + c * c) / (2.0 * sigma * sigma)));
      s += k.back();
    }
  for (double& v : k) v /= s;
  return k;
}

/// Single fixed-kernel stamp: draw the whole kernel on a canvas padded by the
/// half-size, crop back to the image, then rescale the survivors to sum 1.
inline std::vector<double> padded_crop_stamp(int height, int width, int row, int col, int size, double sigma) {
  const int half = size / 2;
  const int ph = height + 2 * half;
  const int pw = width + 2 * half;
  std::vector<double> canvas(static_cast<std::size_t>(ph) * pw, 0.0);
  const auto k = direct_gaussian(size, sigma);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) canvas[static_cast<std::size_t>(row + r) * pw + (col + c)] += k[r * size + c];
  std::vector<double> out(static_cast<std::size_t>(height) * width);
  double kept = 0.0;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      out[static_cast<std::size_t>(r) * width + c] = canvas[static_cast<std::size_t>(r + half) * pw + (c + half)];
      kept += out[static_cast<std::size_t>(r) * width + c];
    }
  for (double& v : out) v /= kept;
  return out;
}

/// SSIM straight from the definition: per valid 11x11 window, 2-D Gaussian
/// weights, centered second moments. Inputs are already scaled to range 1.
inline double reference_ssim(const std::vector<double>& x, const std::vector<double>& y, int h, int w) {
  const int n = 11;
  const double sigma = 1.5;
  std::vector<double> wts(n * n);
  double ws = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const double dr = r - 5, dc = c - 5;
      wts[r * n + c] = std::exp(-(dr * dr + dc * dc) / (2 * sigma * sigma));
      ws += wts[r * n + c];
    }
  for (double& v : wts) v /= ws;
  const double c1 = 0.0001, c2 = 0.0009;
  double total = 0.0;
  int windows = 0;
  for (int r0 = 0; r0 + n <= h; ++r0)
    for (int c0 = 0; c0 + n <= w; ++c0) {
      double mx = 0, my = 0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const std::size_t i = static_cast<std::size_t>(r0 + r) * w + (c0 + c);
          mx += wts[r * n + c] * x[i];
          my += wts[r * n + c] * y[i];
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const std::size_t i = static_cast<std::size_t>(r0 + r) * w + (c0 + c);
          const double a = x[i] - mx, b = y[i] - my;
          vx += wts[r * n + c] * a * a;
          vy += wts[r * n + c] * b * b;
          cxy += wts[r * n + c] * a * b;
        }
      total += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  return total / windows;
}

/// Random annotation set; a share of points sits exactly on borders.
inline AnnotationSet random_annotations(std::mt19937_64& rng, int max_points, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_int_distribution<int> npts(0, max_points);
  AnnotationSet a;
  a.image_id = "rand";
  a.height = side(rng);
  a.width = side(rng);
  const int n = npts(rng);
  std::uniform_real_distribution<double> ux(0.0, a.width), uy(0.0, a.height), u01(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Point p{ux(rng), uy(rng)};
    const double pick = u01(rng);
    if (pick < 0.03) p.x = 0.0;
    else if (pick < 0.06) p.x = std::nextafter(static_cast<double>(a.width), 0.0);
    else if (pick < 0.09) p.y = 0.0;
    else if (pick < 0.12) p.y = std::nextafter(static_cast<double>(a.height), 0.0);
    if (p.x >= a.width) p.x = std::nextafter(static_cast<double>(a.width), 0.0);
    if (p.y >= a.height) p.y = std::nextafter(static_cast<double>(a.height), 0.0);
    a.points.push_back(p);
  }
  return a;
}

inline double plain_sum(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s);
}

}  // namespace c3::oracle
