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

#include <cstddef>
#include <span>
#include <vector>

#include "c3/ingest.hpp"

namespace c3 {

enum class KernelMode { kFixed, kAdaptive };

/// Gaussian kernel parameters for ground-truth rendering.
///
/// Fixed mode stamps one fixed_size x fixed_size kernel of width fixed_sigma
/// at every head. Adaptive mode gives head i the width
/// min(beta * mean distance to its knn_k nearest heads, sigma_cap) and a
/// window of half-extent ceil(truncation * sigma).
struct KernelSpec {
  KernelMode mode = KernelMode::kFixed;
  int fixed_size = 15;
  double fixed_sigma = 4.0;
  int knn_k = 3;
  double beta = 0.3;
  double sigma_cap = 15.0;
  double truncation = 3.0;

  static KernelSpec fixed(int size = 15, double sigma = 4.0);
  static KernelSpec adaptive(int k = 3, double beta = 0.3, double cap = 15.0);

  /// Throws kInvalidArgument when a field is out of range.
  void validate() const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct Shape {
  int height = 0;
  int width = 0;

  std::size_t cells() const noexcept { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Row-major non-negative raster. Its sum divided by norm_factor is the
/// crowd count.
struct DensityMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;
  double norm_factor = 1.0;

  DensityMap() = default;
  DensityMap(int h, int w, double norm = 1.0)
      : height(h), width(w), values(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0.0), norm_factor(norm) {}

  Shape shape() const noexcept { return {height, width}; }
  double& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
  double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }

  friend bool operator==(const DensityMap&, const DensityMap&) = default;
};

/// Square kernel sampled from exp(-(dx^2 + dy^2) / (2 sigma^2)) around the
/// middle cell and divided by its own sum. Row-major, size*size entries.
std::vector<double> gaussian_kernel(int size, double sigma);

/// Per-head sigma used in adaptive mode. Isolated heads (no neighbours)
/// get spec.fixed_sigma. Coincident neighbours may give 0, which renders as
/// a single-cell delta.
std::vector<double> adaptive_sigmas(std::span<const Point> points, const KernelSpec& spec);

/// Renders `ann` into a map of `out_shape`. Points are rescaled by the
/// per-axis ratio when out_shape differs from the annotation dimensions,
/// then snapped to the nearest cell. Every head contributes exactly 1 to the
/// map sum: the in-bounds part of a border-clipped kernel is renormalized.
///
/// `threads` > 1 splits the raster into row bands; each cell still receives
/// its contributions in point order, so the output is bitwise independent
/// of the thread count.
DensityMap render(const AnnotationSet& ann, const KernelSpec& spec, Shape out_shape, int threads = 1);

}  // namespace c3
