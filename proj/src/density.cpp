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

#include "c3/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "c3/error.hpp"
#include "c3/knn.hpp"

namespace c3 {

KernelSpec KernelSpec::fixed(int size, double sigma) {
  KernelSpec s;
  s.mode = KernelMode::kFixed;
  s.fixed_size = size;
  s.fixed_sigma = sigma;
  return s;
}

KernelSpec KernelSpec::adaptive(int k, double beta, double cap) {
  KernelSpec s;
  s.mode = KernelMode::kAdaptive;
  s.knn_k = k;
  s.beta = beta;
  s.sigma_cap = cap;
  return s;
}

void KernelSpec::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::kInvalidArgument, "kernel spec: " + what); };
  if (fixed_size < 1 || fixed_size % 2 == 0) bad("fixed_size must be odd and >= 1");
  if (!(fixed_sigma > 0.0) || !std::isfinite(fixed_sigma)) bad("fixed_sigma must be positive");
  if (knn_k < 1) bad("knn_k must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) bad("beta must be positive");
  if (!(sigma_cap > 0.0) || !std::isfinite(sigma_cap)) bad("sigma_cap must be positive");
  if (!(truncation > 0.0) || !std::isfinite(truncation)) bad("truncation must be positive");
}

std::vector<double> gaussian_kernel(int size, double sigma) {
  if (size < 1 || size % 2 == 0) fail(ErrorKind::kInvalidArgument, "gaussian_kernel: size must be odd and >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail(ErrorKind::kInvalidArgument, "gaussian_kernel: sigma must be positive");
  const int half = size / 2;
  const double denom = 2.0 * sigma * sigma;
  std::vector<double> k(static_cast<std::size_t>(size) * size);
  double sum = 0.0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      const double dy = r - half;
      const double dx = c - half;
      const double v = std::exp(-(dx * dx + dy * dy) / denom);
      k[static_cast<std::size_t>(r) * size + c] = v;
      sum += v;
    }
  }
  for (double& v : k) v /= sum;
  return k;
}

std::vector<double> adaptive_sigmas(std::span<const Point> points, const KernelSpec& spec) {
  spec.validate();
  const auto knn = knn_mean_distance(points, static_cast<std::size_t>(spec.knn_k));
  std::vector<double> sigmas(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    sigmas[i] = knn.isolated[i] ? spec.fixed_sigma : std::min(spec.beta * knn.mean_distance[i], spec.sigma_cap);
  }
  return sigmas;
}

namespace {

struct Stamp {
  int row;
  int col;
  double sigma;  // adaptive only
};

struct Window {
  int r0, r1, c0, c1;  // clipped, half-open
};

Window clip(const Stamp& s, int half, Shape shape) {
  return {std::max(s.row - half, 0), std::min(s.row + half + 1, shape.height), std::max(s.col - half, 0),
          std::min(s.col + half + 1, shape.width)};
}

int cell_index(double v, int extent) {
  const double f = std::floor(v);
  if (f <= 0.0) return 0;
  if (f >= extent - 1) return extent - 1;
  return static_cast<int>(f);
}

void stamp_fixed(DensityMap& map, std::span<const Stamp> stamps, std::span<const double> kernel, int size, int band_lo,
                 int band_hi) {
  const int half = size / 2;
  const Shape shape = map.shape();
  for (const Stamp& s : stamps) {
    const Window w = clip(s, half, shape);
    const int lo = std::max(w.r0, band_lo);
    const int hi = std::min(w.r1, band_hi);
    if (lo >= hi) continue;
    double mass = 0.0;
    for (int r = w.r0; r < w.r1; ++r) {
      const double* krow = kernel.data() + static_cast<std::size_t>(r - s.row + half) * size;
      for (int c = w.c0; c < w.c1; ++c) mass += krow[c - s.col + half];
    }
    for (int r = lo; r < hi; ++r) {
      const double* krow = kernel.data() + static_cast<std::size_t>(r - s.row + half) * size;
      double* out = &map.at(r, 0);
      for (int c = w.c0; c < w.c1; ++c) out[c] += krow[c - s.col + half] / mass;
    }
  }
}

void stamp_adaptive(DensityMap& map, std::span<const Stamp> stamps, double truncation, int band_lo, int band_hi) {
  const Shape shape = map.shape();
  std::vector<double> gy;
  std::vector<double> gx;
  for (const Stamp& s : stamps) {
    const double reach = std::ceil(truncation * s.sigma);
    const int half = reach >= static_cast<double>(std::max(shape.height, shape.width))
                         ? std::max(shape.height, shape.width)
                         : static_cast<int>(reach);
    const Window w = clip(s, half, shape);
    const int lo = std::max(w.r0, band_lo);
    const int hi = std::min(w.r1, band_hi);
    if (lo >= hi) continue;
    const double denom = 2.0 * s.sigma * s.sigma;
    if (half == 0 || !(denom > 0.0)) {
      map.at(s.row, s.col) += 1.0;
      continue;
    }
    auto weights = [denom](std::vector<double>& g, int from, int to, int center) {
      g.resize(static_cast<std::size_t>(to - from));
      double sum = 0.0;
      for (int i = from; i < to; ++i) {
        const double d = i - center;
        const double v = std::exp(-(d * d) / denom);
        g[static_cast<std::size_t>(i - from)] = v;
        sum += v;
      }
      return sum;
    };
    const double sy = weights(gy, w.r0, w.r1, s.row);
    const double sx = weights(gx, w.c0, w.c1, s.col);
    const double mass = sy * sx;
    for (int r = lo; r < hi; ++r) {
      const double wy = gy[static_cast<std::size_t>(r - w.r0)];
      double* out = &map.at(r, 0);
      for (int c = w.c0; c < w.c1; ++c) out[c] += wy * gx[static_cast<std::size_t>(c - w.c0)] / mass;
    }
  }
}

}  // namespace

DensityMap render(const AnnotationSet& ann, const KernelSpec& spec, Shape out_shape, int threads) {
  spec.validate();
  if (out_shape.height < 1 || out_shape.width < 1) fail(ErrorKind::kInvalidArgument, "render: zero-sized output");
  if (ann.height < 1 || ann.width < 1) fail(ErrorKind::kInvalidArgument, "render: annotation has no dimensions");

  const double sy = static_cast<double>(out_shape.height) / ann.height;
  const double sx = static_cast<double>(out_shape.width) / ann.width;
  const bool rescale = out_shape.height != ann.height || out_shape.width != ann.width;

  std::vector<Point> pts;
  pts.reserve(ann.points.size());
  for (const Point& p : ann.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail(ErrorKind::kInvalidArgument, "render: " + ann.image_id + " has a non-finite coordinate");
    }
    pts.push_back(rescale ? Point{p.x * sx, p.y * sy} : p);
  }

  std::vector<Stamp> stamps(pts.size());
  std::vector<double> sigmas;
  if (spec.mode == KernelMode::kAdaptive) sigmas = adaptive_sigmas(pts, spec);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    stamps[i] = {cell_index(pts[i].y, out_shape.height), cell_index(pts[i].x, out_shape.width),
                 sigmas.empty() ? 0.0 : sigmas[i]};
  }

  DensityMap map(out_shape.height, out_shape.width);
  std::vector<double> kernel;
  if (spec.mode == KernelMode::kFixed) kernel = gaussian_kernel(spec.fixed_size, spec.fixed_sigma);

  auto run_band = [&](int lo, int hi) {
    if (spec.mode == KernelMode::kFixed) {
      stamp_fixed(map, stamps, kernel, spec.fixed_size, lo, hi);
    } else {
      stamp_adaptive(map, stamps, spec.truncation, lo, hi);
    }
  };

  const int bands = std::clamp(threads, 1, out_shape.height);
  if (bands == 1 || stamps.empty()) {
    run_band(0, out_shape.height);
    return map;
  }
  std::vector<std::jthread> workers;
  workers.reserve(static_cast<std::size_t>(bands));
  for (int b = 0; b < bands; ++b) {
    const int lo = static_cast<int>(static_cast<long long>(out_shape.height) * b / bands);
    const int hi = static_cast<int>(static_cast<long long>(out_shape.height) * (b + 1) / bands);
    workers.emplace_back(run_band, lo, hi);
  }
  workers.clear();
  return map;
}

}  // namespace c3
