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

#include "c3/c3dm.hpp"
#include "c3/error.hpp"
#include "c3/labels.hpp"
#include "c3/metrics.hpp"
#include "support/oracles.hpp"
#include "support/tempdir.hpp"

using namespace c3;

namespace {

DensityMap random_map(std::mt19937_64& rng, int h, int w, double hi = 1.0) {
  std::uniform_real_distribution<double> u(0.0, hi);
  DensityMap m(h, w);
  for (double& v : m.values) v = u(rng);
  return m;
}

}  // namespace

TEST_CASE("mae and mse worked examples") {
  const std::vector<CountPair> perfect = {{"a", 10, 10}};
  CHECK(mae(perfect) == 0.0);
  CHECK(mse(perfect) == 0.0);

  const std::vector<CountPair> two = {{"a", 12, 10}, {"b", 9, 10}};
  CHECK(std::fabs(mae(two) - 1.5) <= 1e-12);
  CHECK(std::fabs(mse(two) - std::sqrt(2.5)) <= 1e-12);

  CHECK_THROWS_AS(mae(std::vector<CountPair>{}), Error);
  CHECK_THROWS_AS(mse(std::vector<CountPair>{}), Error);
}

TEST_CASE("mae/mse: homogeneity, permutation invariance, mse >= mae") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<CountPair> pairs(1 + t % 17);
    for (auto& p : pairs) p = {"x", u(rng), u(rng)};
    const double a = mae(pairs), s = mse(pairs);
    REQUIRE(s >= a * (1 - 1e-15));
    auto scaled = pairs;
    for (auto& p : scaled) p = {p.image_id, p.predicted * 3.0, p.actual * 3.0};
    REQUIRE(mae(scaled) == doctest::Approx(3.0 * a).epsilon(1e-12));
    std::shuffle(pairs.begin(), pairs.end(), rng);
    REQUIRE(mae(pairs) == doctest::Approx(a).epsilon(1e-15));
    REQUIRE(mse(pairs) == doctest::Approx(s).epsilon(1e-15));
  }
}

TEST_CASE("psnr worked examples") {
  std::mt19937_64 rng(20);
  auto gt = random_map(rng, 10, 10);
  gt.values[5] = 1.0;  // peak 1.0
  CHECK(psnr(gt, gt) == kPsnrCapDb);

  auto pred = gt;
  pred.values[42] += 0.1;
  CHECK(std::fabs(psnr(pred, gt) - 40.0) <= 1e-9);

  auto shifted = gt;
  for (double& v : shifted.values) v += 0.5;
  CHECK(psnr(shifted, gt) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));

  CHECK(psnr(DensityMap(4, 4), DensityMap(4, 4)) == kPsnrCapDb);
  DensityMap nz(4, 4);
  nz.values[3] = 2.0;
  const auto r = psnr_detailed(nz, DensityMap(4, 4));
  CHECK(r.zero_gt_peak);
  CHECK(r.db == doctest::Approx(10.0 * std::log10(16.0)));

  CHECK_THROWS_AS(psnr(DensityMap(4, 4), DensityMap(4, 5)), Error);
}

TEST_CASE("psnr and ssim ignore norm_factor") {
  std::mt19937_64 rng(21);
  const auto gt = random_map(rng, 24, 24, 0.02);
  const auto pred = random_map(rng, 24, 24, 0.02);
  const auto np = normalize_labels(pred, {100.0});
  CHECK(psnr(np, gt) == doctest::Approx(psnr(pred, gt)).epsilon(1e-12));
  CHECK(ssim(np, gt) == doctest::Approx(ssim(pred, gt)).epsilon(1e-12));
}

TEST_CASE("ssim: self-similarity, reference implementation, symmetry, range") {
  std::mt19937_64 rng(22);
  const auto gt = random_map(rng, 32, 40);
  CHECK(std::fabs(ssim(gt, gt) - 1.0) <= 1e-9);

  // pred = 1 - gt with gt spanning [0, 1]
  auto g = gt;
  g.values[0] = 0.0;
  g.values[1] = 1.0;
  auto inv = g;
  for (double& v : inv.values) v = 1.0 - v;
  const double s = ssim(inv, g);
  CHECK(s < 1.0);
  CHECK(std::fabs(s - oracle::reference_ssim(inv.values, g.values, 32, 40)) <= 1e-6);

  // same peak on both sides makes the scaling symmetric
  auto a = random_map(rng, 20, 20);
  auto b = random_map(rng, 20, 20);
  a.values[7] = b.values[7] = 1.0;
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(psnr(a, b) == doctest::Approx(psnr(b, a)).epsilon(1e-12));

  for (int t = 0; t < 30; ++t) {
    const auto x = random_map(rng, 12, 15);
    auto y = random_map(rng, 12, 15);
    if (t % 3 == 0) for (double& v : y.values) v = 1.0 - v;
    const double v = ssim(x, y);
    REQUIRE(v >= -1.0);
    REQUIRE(v <= 1.0);
    REQUIRE(v == doctest::Approx(oracle::reference_ssim(
                                     [&] {
                                       double p = *std::max_element(y.values.begin(), y.values.end());
                                       auto s2 = x.values;
                                       for (double& q : s2) q /= p;
                                       return s2;
                                     }(),
                                     [&] {
                                       double p = *std::max_element(y.values.begin(), y.values.end());
                                       auto s2 = y.values;
                                       for (double& q : s2) q /= p;
                                       return s2;
                                     }(),
                                     12, 15))
                     .epsilon(1e-6));
  }

  auto c2 = gt;
  for (double& v : c2.values) v *= 2.0;
  CHECK(ssim(c2, gt) < 1.0);

  CHECK_THROWS_AS(ssim(DensityMap(10, 20), DensityMap(10, 20)), Error);
  CHECK_THROWS_AS(ssim(DensityMap(12, 20), DensityMap(20, 12)), Error);
  CHECK(ssim(DensityMap(12, 12), DensityMap(12, 12)) == 1.0);
}

TEST_CASE("evaluate_run over C3DM directories") {
  testing::TempDir dir;
  std::mt19937_64 rng(23);
  auto with_count = [&](double n) {
    auto m = random_map(rng, 16, 16);
    const double s = count(m);
    for (double& v : m.values) v = static_cast<double>(static_cast<float>(v * n / s));
    return m;
  };
  const auto g1 = with_count(10.0), g2 = with_count(20.0);
  write_c3dm(dir / "gt/img1.c3dm", g1);
  write_c3dm(dir / "gt/img2.c3dm", g2);

  SUBCASE("self evaluation") {
    const auto r = evaluate_run(dir / "gt", dir / "gt", {.with_quality = true});
    CHECK(r.n_images == 2);
    CHECK(r.mae == 0.0);
    CHECK(r.mse == 0.0);
    CHECK(*r.ssim == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*r.psnr == kPsnrCapDb);
  }
  SUBCASE("two images with errors +2 and -1") {
    auto p1 = g1;
    auto p2 = g2;
    const double c1 = count(read_c3dm(dir / "gt/img1.c3dm"));
    const double c2 = count(read_c3dm(dir / "gt/img2.c3dm"));
    for (double& v : p1.values) v *= (c1 + 2.0) / c1;
    for (double& v : p2.values) v *= (c2 - 1.0) / c2;
    write_c3dm(dir / "pred/img1.c3dm", p1);
    write_c3dm(dir / "pred/img2.c3dm", p2);
    const auto r = evaluate_run(dir / "pred", dir / "gt", {.with_quality = false, .threads = 2, .flags = {"x"}});
    CHECK(r.mae == doctest::Approx(1.5).epsilon(1e-5));
    CHECK(r.mse == doctest::Approx(std::sqrt(2.5)).epsilon(1e-5));
    CHECK_FALSE(r.psnr.has_value());
    CHECK(r.flags == std::vector<std::string>{"x"});
    const auto csv = format_csv(r);
    CHECK(csv.rfind("image_id,predicted,actual,abs_err\nimg1,", 0) == 0);
    CHECK(to_json(r).at("n_images") == 2);
    CHECK(format_table(r).find("mae") != std::string::npos);
  }
  SUBCASE("disjoint ids name the missing images") {
    write_c3dm(dir / "other/img3.c3dm", g1);
    try {
      evaluate_run(dir / "other", dir / "gt", {});
      FAIL("expected throw");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("img1") != std::string::npos);
      CHECK(msg.find("img2") != std::string::npos);
      CHECK(msg.find("img3") != std::string::npos);
    }
  }
  SUBCASE("empty directories") {
    std::filesystem::create_directories(dir / "e1");
    std::filesystem::create_directories(dir / "e2");
    CHECK_THROWS_AS(evaluate_run(dir / "e1", dir / "e2", {}), Error);
    CHECK_THROWS_AS(evaluate_run(dir / "nope", dir / "e2", {}), Error);
  }
}
