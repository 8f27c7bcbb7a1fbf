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

#include "c3/labels.hpp"

#include <cmath>
#include <string>

#include "c3/error.hpp"
#include "c3/summation.hpp"

namespace c3 {

DensityMap downsample_sum_preserving(const DensityMap& map, DownsampleSpec spec) {
  const int f = spec.factor;
  if (f < 1) fail(ErrorKind::kInvalidArgument, "downsample: factor must be >= 1");
  if (map.height % f != 0 || map.width % f != 0) {
    fail(ErrorKind::kInvalidArgument, "downsample: " + std::to_string(map.height) + "x" + std::to_string(map.width) +
                                          " not divisible by " + std::to_string(f));
  }
  if (f == 1) return map;
  DensityMap out(map.height / f, map.width / f, map.norm_factor);
  for (int r = 0; r < out.height; ++r) {
    for (int c = 0; c < out.width; ++c) {
      CompensatedSum block;
      for (int dr = 0; dr < f; ++dr) {
        const double* row = map.values.data() + static_cast<std::size_t>(r * f + dr) * map.width + c * f;
        for (int dc = 0; dc < f; ++dc) block.add(row[dc]);
      }
      out.at(r, c) = block.value();
    }
  }
  return out;
}

DensityMap normalize_labels(const DensityMap& map, NormalizationSpec spec) {
  if (!(spec.label_factor > 0.0) || !std::isfinite(spec.label_factor)) {
    fail(ErrorKind::kInvalidArgument, "normalize_labels: label_factor must be positive");
  }
  if (map.norm_factor != 1.0) {
    fail(ErrorKind::kInvalidArgument,
         "normalize_labels: map already normalized (norm_factor " + std::to_string(map.norm_factor) + ")");
  }
  DensityMap out = map;
  for (double& v : out.values) v *= spec.label_factor;
  out.norm_factor = spec.label_factor;
  return out;
}

DensityMap denormalize_labels(const DensityMap& map) {
  if (!(map.norm_factor > 0.0)) fail(ErrorKind::kInvalidArgument, "denormalize_labels: norm_factor must be positive");
  DensityMap out = map;
  if (map.norm_factor == 1.0) return out;
  for (double& v : out.values) v /= map.norm_factor;
  out.norm_factor = 1.0;
  return out;
}

double count(const DensityMap& map) {
  return compensated_sum(map.values) / map.norm_factor;
}

}  // namespace c3
