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

#include "c3/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "c3/error.hpp"

namespace c3 {

namespace {

constexpr std::size_t kLeafSize = 8;

inline double coord(const Point& p, int axis) { return axis == 0 ? p.x : p.y; }

inline double sq_distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

}  // namespace

KdTree::KdTree(std::span<const Point> points) : points_(points), order_(points.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
    build(0, points_.size(), 0);
  }
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  // split along the wider extent
  double lo[2] = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  double hi[2] = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (std::size_t i = begin; i < end; ++i) {
    const Point& p = points_[order_[i]];
    lo[0] = std::min(lo[0], p.x);
    hi[0] = std::max(hi[0], p.x);
    lo[1] = std::min(lo[1], p.y);
    hi[1] = std::max(hi[1], p.y);
  }
  const int axis = (hi[0] - lo[0]) >= (hi[1] - lo[1]) ? 0 : 1;
  if (hi[axis] == lo[axis]) return id;  // all coincident

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     return coord(points_[a], axis) < coord(points_[b], axis);
                   });
  const double split = coord(points_[order_[mid]], axis);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

std::vector<double> KdTree::nearest_sq_distances(std::size_t self, std::size_t k) const {
  if (self >= points_.size()) fail(ErrorKind::kInvalidArgument, "KdTree: query index out of range");
  const std::size_t want = std::min(k, points_.size() - 1);
  std::vector<double> result;
  if (want == 0) return result;

  const Point& q = points_[self];
  std::priority_queue<double> best;  // max-heap of the current k smallest
  auto bound = [&] { return best.size() < want ? std::numeric_limits<double>::infinity() : best.top(); };

  // Explicit stack of (node, lower bound on squared distance to its region).
  std::vector<std::pair<int, double>> stack;
  stack.emplace_back(0, 0.0);
  while (!stack.empty()) {
    const auto [id, min_sq] = stack.back();
    stack.pop_back();
    if (min_sq > bound()) continue;
    const Node& n = nodes_[id];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t j = order_[i];
        if (j == self) continue;
        const double d = sq_distance(q, points_[j]);
        if (best.size() < want) {
          best.push(d);
        } else if (d < best.top()) {
          best.pop();
          best.push(d);
        }
      }
      continue;
    }
    const double diff = coord(q, n.axis) - n.split;
    const int near = diff < 0.0 ? n.left : n.right;
    const int far = diff < 0.0 ? n.right : n.left;
    // far side first so the near side is popped next
    stack.emplace_back(far, std::max(min_sq, diff * diff));
    stack.emplace_back(near, min_sq);
  }

  result.resize(best.size());
  for (std::size_t i = result.size(); i-- > 0;) {
    result[i] = best.top();
    best.pop();
  }
  return result;
}

KnnDistances knn_mean_distance(std::span<const Point> points, std::size_t k) {
  if (k < 1) fail(ErrorKind::kInvalidArgument, "knn_mean_distance: k must be >= 1");
  KnnDistances out;
  out.mean_distance.assign(points.size(), 0.0);
  out.isolated.assign(points.size(), false);
  if (points.size() == 1) {
    out.isolated[0] = true;
    return out;
  }
  const KdTree tree(points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto sq = tree.nearest_sq_distances(i, k);
    double sum = 0.0;
    for (double d : sq) sum += std::sqrt(d);
    out.mean_distance[i] = sum / static_cast<double>(sq.size());
  }
  return out;
}

}  // namespace c3
