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

#include "c3/density.hpp"

namespace c3 {

/// Block-sum reduction by `factor` per axis (block mean times factor^2).
struct DownsampleSpec {
  int factor = 8;
};

/// Constant multiplied into training targets.
struct NormalizationSpec {
  double label_factor = 100.0;
};

/// Each output cell is the compensated sum of its factor x factor block, so
/// the total mass is unchanged. norm_factor carries through.
DensityMap downsample_sum_preserving(const DensityMap& map, DownsampleSpec spec);

/// Multiplies every value by label_factor and records it in norm_factor.
/// Throws when the map already carries a factor other than 1.
DensityMap normalize_labels(const DensityMap& map, NormalizationSpec spec);

DensityMap denormalize_labels(const DensityMap& map);

/// sum(values) / norm_factor with compensated summation.
double count(const DensityMap& map);

}  // namespace c3
