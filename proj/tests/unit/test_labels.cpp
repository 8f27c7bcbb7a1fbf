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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "c3/density.hpp"
#include "c3/error.hpp"
#include "c3/labels.hpp"
#include "support/oracles.hpp"

using namespace c3;

namespace {

DensityMap random_map(std::mt19937_64& rng, int h, int w) {
  std::uniform_real_distribution<double> u(0.0, 0.05);
  DensityMap m(h, w);
  for (double& v : m.values) v = u(rng);
  return m;
}

}  // namespace

TEST_CASE("downsample: identity and the 8x8 constant block") {
  std::mt19937_64 rng(1);
  const auto m = random_map(rng, 16, 24);
  CHECK(downsample_sum_preserving(m, {1}) == m);

  DensityMap c(8, 8);
  std::fill(c.values.begin(), c.values.end(), 0.01);
  const auto d = downsample_sum_preserving(c, {8});
  CHECK(d.height == 1);
  CHECK(d.width == 1);
  CHECK(d.values[0] == 0.64);
}

TEST_CASE("downsample: each cell is its block sum, mass and norm preserved") {
  std::mt19937_64 rng(2);
  auto m = random_map(rng, 32, 48);
  m.norm_factor = 100.0;
  const auto d = downsample_sum_preserving(m, {8});
  CHECK(d.norm_factor == 100.0);
  CHECK(d.at(1, 2) == doctest::Approx([&] {
          double s = 0;
          for (int r = 8; r < 16; ++r)
            for (int c = 16; c < 24; ++c) s += m.at(r, c);
          return s;
        }()).epsilon(1e-14));
  CHECK(std::fabs(count(d) - count(m)) <= 1e-12 * count(m));
  CHECK_THROWS_AS(downsample_sum_preserving(m, {5}), Error);
  CHECK_THROWS_AS(downsample_sum_preserving(m, {0}), Error);
}

TEST_CASE("downsample composes multiplicatively") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto m = random_map(rng, 48, 96);
    const auto twice = downsample_sum_preserving(downsample_sum_preserving(m, {2}), {4});
    const auto once = downsample_sum_preserving(m, {8});
    REQUIRE(twice.shape() == once.shape());
    for (std::size_t i = 0; i < once.values.size(); ++i) REQUIRE(std::fabs(twice.values[i] - once.values[i]) <= 1e-9);
  }
}

TEST_CASE("downsampled rendered maps keep the head count") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  AnnotationSet a{"d", 128, 64, {}};
  for (int i = 0; i < 57; ++i) a.points.push_back({u(rng) * 128, u(rng) * 64});
  const auto m = render(a, KernelSpec::adaptive(), {64, 128});
  const auto d = downsample_sum_preserving(m, {8});
  CHECK(std::fabs(count(d) - 57.0) <= 1e-4);
  CHECK(std::fabs(count(m) - 57.0) <= 1e-4);
  CHECK(std::fabs(count(normalize_labels(m, {100.0})) - 57.0) <= 1e-4);
}

TEST_CASE("normalize / denormalize") {
  DensityMap m(1, 3);
  m.values = {1.0, 0.5, 1.5};
  const auto n = normalize_labels(m, {100.0});
  CHECK(n.norm_factor == 100.0);
  CHECK(oracle::plain_sum(n.values) == doctest::Approx(300.0).epsilon(1e-15));
  CHECK(count(n) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK_THROWS_AS(normalize_labels(n, {100.0}), Error);
  CHECK_THROWS_AS(normalize_labels(m, {0.0}), Error);

  const auto ident = normalize_labels(m, {1.0});
  CHECK(ident == m);

  const auto back = denormalize_labels(n);
  CHECK(back.norm_factor == 1.0);
  for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(m.values[i]).epsilon(1e-9));
  CHECK(count(back) == doctest::Approx(3.0));

  DensityMap zero(4, 4, 100.0);
  const auto z = denormalize_labels(zero);
  CHECK(std::all_of(z.values.begin(), z.values.end(), [](double v) { return v == 0.0; }));
  DensityMap broken(1, 1, 0.0);
  CHECK_THROWS_AS(denormalize_labels(broken), Error);
}

TEST_CASE("count uses compensated summation") {
  DensityMap m(1000, 1000);
  std::fill(m.values.begin(), m.values.end(), 0.1);
  m.values[0] = 1e8;
  CHECK(count(m) == doctest::Approx(1e8 + 0.1 * 999999).epsilon(1e-15));
  CHECK(count(DensityMap(3, 3)) == 0.0);
}
