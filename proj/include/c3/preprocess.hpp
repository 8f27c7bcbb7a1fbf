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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "c3/density.hpp"
#include "c3/ingest.hpp"

namespace c3 {

enum class ResizeKind { kFixedSize, kRatioPreserving };

/// A dataset's sizing policy.
struct ResizeRule {
  ResizeKind kind = ResizeKind::kRatioPreserving;
  std::optional<Shape> fixed;
  std::optional<int> max_side;
  int divisor = 16;
  /// Enlarge images whose longer side is below max_side.
  bool upscale = false;

  static ResizeRule fixed_size(int height, int width);
  static ResizeRule ratio_preserving(int max_side, bool upscale = false);

  void validate() const;

  friend bool operator==(const ResizeRule&, const ResizeRule&) = default;
};

/// A rule applied to one source size.
struct ResizePlan {
  Shape src;
  Shape dst;
  double scale_y = 1.0;
  double scale_x = 1.0;

  friend bool operator==(const ResizePlan&, const ResizePlan&) = default;
};

enum class BatchStrategy { kCropToMin, kPadToMax };

struct Offset {
  int row = 0;
  int col = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

/// How a batch of differently sized images is brought to one tensor shape.
/// Offsets are crop origins (CropToMin) or the placement of each image inside
/// the zero-filled canvas (PadToMax, always top-left).
struct BatchPlan {
  BatchStrategy strategy = BatchStrategy::kCropToMin;
  int n = 0;
  Shape target;
  std::vector<Offset> per_image_offsets;

  friend bool operator==(const BatchPlan&, const BatchPlan&) = default;
};

ResizePlan plan_resize(Shape src, const ResizeRule& rule);

/// Scales every point by the plan; the image takes plan.dst.
AnnotationSet apply_resize(const AnnotationSet& ann, const ResizePlan& plan);

/// `seed` empty means centered crops.
BatchPlan plan_batch(std::span<const Shape> sizes, int n, BatchStrategy strategy,
                     std::optional<std::uint64_t> seed = std::nullopt);

/// Keeps points in the half-open window [origin, origin + target) and
/// shifts them by -origin.
AnnotationSet crop_annotations(const AnnotationSet& ann, Offset origin, Shape target);

nlohmann::json to_json(const ResizeRule& rule);
nlohmann::json to_json(const ResizePlan& plan);
nlohmann::json to_json(const BatchPlan& plan);
ResizeRule resize_rule_from_json(const nlohmann::json& j);
ResizePlan resize_plan_from_json(const nlohmann::json& j);
BatchPlan batch_plan_from_json(const nlohmann::json& j);

const char* to_string(BatchStrategy s);
BatchStrategy parse_batch_strategy(const std::string& s);

}  // namespace c3
