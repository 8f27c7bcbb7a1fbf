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

/// Static 2-D kd-tree over a borrowed point array. Queries are read-only
/// and may run concurrently once the tree is built.
class KdTree {
 public:
  explicit KdTree(std::span<const Point> points);

  /// Squared distances of the `k` nearest points other than `self`,
  /// ascending. Fewer are returned when the set is smaller.
  std::vector<double> nearest_sq_distances(std::size_t self, std::size_t k) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    std::size_t begin;  // range into order_
    std::size_t end;
    int axis;  // -1 for leaves
    double split;
    int left;
    int right;
  };

  int build(std::size_t begin, std::size_t end, int depth);

  std::span<const Point> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

struct KnnDistances {
  /// Mean Euclidean distance to the k nearest other points (fewer if not
  /// enough exist). 0.0 for an isolated point.
  std::vector<double> mean_distance;
  /// True where no other point exists and the value above is a placeholder.
  std::vector<bool> isolated;
};

/// Per-point mean distance to the `k` nearest other points. Distances are
/// summed in ascending order, so the result depends only on the multiset of
/// neighbor distances and not on the search structure.
KnnDistances knn_mean_distance(std::span<const Point> points, std::size_t k);

}  // namespace c3
