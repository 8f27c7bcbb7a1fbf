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

#include "c3/preprocess.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

#include "c3/error.hpp"

namespace c3 {

using nlohmann::json;

namespace {

std::string shape_str(Shape s) { return "(" + std::to_string(s.height) + ", " + std::to_string(s.width) + ")"; }

int floor_to(long long v, int divisor) { return static_cast<int>(v / divisor * divisor); }

int ceil_to(long long v, int divisor) { return static_cast<int>((v + divisor - 1) / divisor * divisor); }

// Unbiased draw from [0, hi] on top of mt19937_64, whose output sequence is
// fixed by the standard. std::uniform_int_distribution is not, so it would
// break replay across standard libraries.
int draw(std::mt19937_64& rng, int hi) {
  if (hi <= 0) return 0;
  const std::uint64_t range = static_cast<std::uint64_t>(hi) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<int>(v % range);
}

json shape_json(Shape s) { return {{"height", s.height}, {"width", s.width}}; }

Shape shape_from(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kData, "expected {\"height\", \"width\"} object");
  return {j.at("height").get<int>(), j.at("width").get<int>()};
}

}  // namespace

ResizeRule ResizeRule::fixed_size(int height, int width) {
  ResizeRule r;
  r.kind = ResizeKind::kFixedSize;
  r.fixed = Shape{height, width};
  return r;
}

ResizeRule ResizeRule::ratio_preserving(int max_side, bool upscale) {
  ResizeRule r;
  r.kind = ResizeKind::kRatioPreserving;
  r.max_side = max_side;
  r.upscale = upscale;
  return r;
}

void ResizeRule::validate() const {
  if (divisor < 1) fail(ErrorKind::kInvalidArgument, "resize rule: divisor must be >= 1");
  if (kind == ResizeKind::kFixedSize) {
    if (!fixed) fail(ErrorKind::kInvalidArgument, "resize rule: fixed-size rule without dimensions");
    if (fixed->height < divisor || fixed->width < divisor || fixed->height % divisor != 0 ||
        fixed->width % divisor != 0) {
      fail(ErrorKind::kInvalidArgument,
           "resize rule: fixed size " + shape_str(*fixed) + " not a positive multiple of " + std::to_string(divisor));
    }
  } else {
    if (!max_side) fail(ErrorKind::kInvalidArgument, "resize rule: ratio-preserving rule without max_side");
    if (*max_side < divisor) fail(ErrorKind::kInvalidArgument, "resize rule: max_side smaller than divisor");
  }
}

ResizePlan plan_resize(Shape src, const ResizeRule& rule) {
  rule.validate();
  if (src.height < 1 || src.width < 1) fail(ErrorKind::kInvalidArgument, "plan_resize: source " + shape_str(src) + " not positive");
  const int div = rule.divisor;

  ResizePlan plan;
  plan.src = src;
  if (rule.kind == ResizeKind::kFixedSize) {
    plan.dst = *rule.fixed;
  } else {
    const int longest = std::max(src.height, src.width);
    const int max_side = *rule.max_side;
    if (longest > max_side || rule.upscale) {
      // Integer arithmetic: the longer side lands exactly on max_side, the
      // other is floored, then both drop to a positive multiple of div.
      const long long h = static_cast<long long>(src.height) * max_side / longest;
      const long long w = static_cast<long long>(src.width) * max_side / longest;
      plan.dst = {std::max(div, floor_to(h, div)), std::max(div, floor_to(w, div))};
    } else {
      if (src.height < div || src.width < div) {
        fail(ErrorKind::kInvalidArgument, "plan_resize: source " + shape_str(src) + " smaller than " +
                                              std::to_string(div) + " and upscaling is disabled");
      }
      plan.dst = {floor_to(src.height, div), floor_to(src.width, div)};
    }
  }
  plan.scale_y = static_cast<double>(plan.dst.height) / src.height;
  plan.scale_x = static_cast<double>(plan.dst.width) / src.width;
  return plan;
}

AnnotationSet apply_resize(const AnnotationSet& ann, const ResizePlan& plan) {
  if (plan.src != Shape{ann.height, ann.width}) {
    fail(ErrorKind::kData, ann.image_id + ": resize plan source " + shape_str(plan.src) + " does not match annotation " +
                               shape_str({ann.height, ann.width}));
  }
  AnnotationSet out;
  out.image_id = ann.image_id;
  out.height = plan.dst.height;
  out.width = plan.dst.width;
  out.points.reserve(ann.points.size());
  for (const Point& p : ann.points) {
    Point q{p.x * plan.scale_x, p.y * plan.scale_y};
    // x < w implies x * (W / w) < W in exact arithmetic; rounding can land on W.
    clamp_coordinate(q.x, out.width);
    clamp_coordinate(q.y, out.height);
    out.points.push_back(q);
  }
  return out;
}

BatchPlan plan_batch(std::span<const Shape> sizes, int n, BatchStrategy strategy, std::optional<std::uint64_t> seed) {
  if (sizes.empty() || n < 1) fail(ErrorKind::kInvalidArgument, "plan_batch: empty batch");
  if (static_cast<std::size_t>(n) != sizes.size()) {
    fail(ErrorKind::kInvalidArgument, "plan_batch: n = " + std::to_string(n) + " but " + std::to_string(sizes.size()) + " sizes given");
  }
  constexpr int kDivisor = 16;
  for (const Shape& s : sizes) {
    if (s.height < kDivisor || s.width < kDivisor || s.height % kDivisor != 0 || s.width % kDivisor != 0) {
      fail(ErrorKind::kInvalidArgument, "plan_batch: size " + shape_str(s) + " is not a multiple of 16");
    }
  }

  BatchPlan plan;
  plan.strategy = strategy;
  plan.n = n;
  plan.per_image_offsets.reserve(sizes.size());
  if (strategy == BatchStrategy::kCropToMin) {
    plan.target = sizes[0];
    for (const Shape& s : sizes) {
      plan.target.height = std::min(plan.target.height, s.height);
      plan.target.width = std::min(plan.target.width, s.width);
    }
    std::optional<std::mt19937_64> rng;
    if (seed) rng.emplace(*seed);
    for (const Shape& s : sizes) {
      const int slack_r = s.height - plan.target.height;
      const int slack_c = s.width - plan.target.width;
      if (rng) {
        const int r = draw(*rng, slack_r);
        const int c = draw(*rng, slack_c);
        plan.per_image_offsets.push_back({r, c});
      } else {
        plan.per_image_offsets.push_back({slack_r / 2, slack_c / 2});
      }
    }
  } else {
    plan.target = {0, 0};
    for (const Shape& s : sizes) {
      plan.target.height = std::max(plan.target.height, s.height);
      plan.target.width = std::max(plan.target.width, s.width);
    }
    plan.target = {ceil_to(plan.target.height, kDivisor), ceil_to(plan.target.width, kDivisor)};
    plan.per_image_offsets.assign(sizes.size(), Offset{0, 0});
  }
  return plan;
}

AnnotationSet crop_annotations(const AnnotationSet& ann, Offset origin, Shape target) {
  if (origin.row < 0 || origin.col < 0 || target.height < 1 || target.width < 1 ||
      origin.row + target.height > ann.height || origin.col + target.width > ann.width) {
    fail(ErrorKind::kInvalidArgument, ann.image_id + ": crop window at (" + std::to_string(origin.row) + ", " +
                                          std::to_string(origin.col) + ") size " + shape_str(target) +
                                          " outside " + shape_str({ann.height, ann.width}));
  }
  AnnotationSet out;
  out.image_id = ann.image_id;
  out.height = target.height;
  out.width = target.width;
  const double x0 = origin.col;
  const double y0 = origin.row;
  const double x1 = x0 + target.width;
  const double y1 = y0 + target.height;
  for (const Point& p : ann.points) {
    if (p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1) out.points.push_back({p.x - x0, p.y - y0});
  }
  return out;
}

const char* to_string(BatchStrategy s) { return s == BatchStrategy::kCropToMin ? "crop_to_min" : "pad_to_max"; }

BatchStrategy parse_batch_strategy(const std::string& s) {
  if (s == "crop_to_min" || s == "crop") return BatchStrategy::kCropToMin;
  if (s == "pad_to_max" || s == "pad") return BatchStrategy::kPadToMax;
  fail(ErrorKind::kInvalidArgument, "unknown batch strategy '" + s + "'");
}

json to_json(const ResizeRule& rule) {
  json j;
  j["kind"] = rule.kind == ResizeKind::kFixedSize ? "fixed_size" : "ratio_preserving";
  j["fixed"] = rule.fixed ? shape_json(*rule.fixed) : json(nullptr);
  j["max_side"] = rule.max_side ? json(*rule.max_side) : json(nullptr);
  j["divisor"] = rule.divisor;
  j["upscale"] = rule.upscale;
  return j;
}

json to_json(const ResizePlan& plan) {
  return {{"src", shape_json(plan.src)}, {"dst", shape_json(plan.dst)}, {"scale_y", plan.scale_y}, {"scale_x", plan.scale_x}};
}

json to_json(const BatchPlan& plan) {
  json offsets = json::array();
  for (const Offset& o : plan.per_image_offsets) offsets.push_back({{"row", o.row}, {"col", o.col}});
  return {{"strategy", to_string(plan.strategy)},
          {"n", plan.n},
          {"target", shape_json(plan.target)},
          {"per_image_offsets", std::move(offsets)}};
}

ResizeRule resize_rule_from_json(const json& j) {
  try {
    ResizeRule r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "fixed_size") {
      r.kind = ResizeKind::kFixedSize;
    } else if (kind == "ratio_preserving") {
      r.kind = ResizeKind::kRatioPreserving;
    } else {
      fail(ErrorKind::kInvalidArgument, "resize rule: unknown kind '" + kind + "'");
    }
    if (j.contains("fixed") && !j["fixed"].is_null()) r.fixed = shape_from(j["fixed"]);
    if (j.contains("max_side") && !j["max_side"].is_null()) r.max_side = j["max_side"].get<int>();
    r.divisor = j.value("divisor", 16);
    r.upscale = j.value("upscale", false);
    r.validate();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("resize rule: ") + e.what());
  }
}

ResizePlan resize_plan_from_json(const json& j) {
  try {
    return {shape_from(j.at("src")), shape_from(j.at("dst")), j.at("scale_y").get<double>(), j.at("scale_x").get<double>()};
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, std::string("resize plan: ") + e.what());
  }
}

BatchPlan batch_plan_from_json(const json& j) {
  try {
    BatchPlan p;
    p.strategy = parse_batch_strategy(j.at("strategy").get<std::string>());
    p.n = j.at("n").get<int>();
    p.target = shape_from(j.at("target"));
    for (const json& o : j.at("per_image_offsets")) p.per_image_offsets.push_back({o.at("row").get<int>(), o.at("col").get<int>()});
    return p;
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, std::string("batch plan: ") + e.what());
  }
}

}  // namespace c3
