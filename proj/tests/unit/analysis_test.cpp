// Copyright 2026 The mmtqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "mmtqa/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mmtqa/errors.hpp"

namespace mmtqa::analysis {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Collection, RaisedCosine) {
  EXPECT_DOUBLE_EQ(collection_efficiency(0.0), 1.0);
  EXPECT_DOUBLE_EQ(collection_efficiency(0.0, 0.87), 0.87);
  EXPECT_NEAR(collection_efficiency(kCollectionCutoff / 2), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(collection_efficiency(kCollectionCutoff), 0.0);
  EXPECT_DOUBLE_EQ(collection_efficiency(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(collection_efficiency(-0.001), collection_efficiency(0.001));
}

TEST(Linspace, Endpoints) {
  const auto v = linspace(-1.0, 1.0, 5);
  ASSERT_EQ(v.size(), 5u);
  EXPECT_DOUBLE_EQ(v.front(), -1.0);
  EXPECT_DOUBLE_EQ(v[2], 0.0);
  EXPECT_DOUBLE_EQ(v.back(), 1.0);
  EXPECT_EQ(linspace(2.0, 3.0, 1).size(), 1u);
}

TEST(Sweep, ThreadedMatchesSerialAndOrder) {
  geometry::InterferometerGeometry geom;
  FieldSpec spec;
  spec.grid_n = 256;
  const std::vector<double> alphas{1.5e-3, 0.0, -1e-3};
  const auto a = aoi_sweep(geom, spec, alphas, false, 1);
  const auto b = aoi_sweep(geom, spec, alphas, false, 3);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a[k].alpha, alphas[k]);
    EXPECT_EQ(a[k].visibility, b[k].visibility);
    EXPECT_NEAR(a[k].visibility, geometry::visibility(geom, alphas[k]), 2e-3);
    EXPECT_DOUBLE_EQ(a[k].collection, collection_efficiency(alphas[k]));
  }
}

TEST(Expectation, RelayIsFlat) {
  geometry::InterferometerGeometry geom;
  const auto alphas = linspace(-3e-3, 3e-3, 101);
  for (const auto& p : expectation_vs_aoi(geom, 0.8, alphas, true, 0.3)) {
    EXPECT_NEAR(p.expectation, 0.8 * std::cos(0.3), 1e-15);
  }
}

TEST(Expectation, NoRelayOscillatesAndAveragesOut) {
  geometry::InterferometerGeometry geom;
  const double half = 0.2 * kPi / 180;
  const auto pts = expectation_vs_aoi(geom, 0.8, linspace(-half, half, 20001), false);
  double mean = 0, lo = 1, hi = -1;
  for (const auto& p : pts) {
    mean += p.expectation;
    lo = std::min(lo, p.expectation);
    hi = std::max(hi, p.expectation);
  }
  mean /= static_cast<double>(pts.size());
  EXPECT_LT(lo, -0.5);
  EXPECT_GT(hi, 0.5);
  EXPECT_LT(std::abs(mean), 0.2);
  EXPECT_NEAR(pts[10000].expectation, 0.8, 1e-12);
}

TEST(Entanglement, OnlyXyFollowsOverlap) {
  geometry::InterferometerGeometry geom;
  const std::vector<double> alphas{0.0, 1.7e-3};
  const auto off = entanglement_visibility_vs_aoi(geom, {0.952, 0.804}, alphas, false);
  const auto on = entanglement_visibility_vs_aoi(geom, {0.952, 0.804}, alphas, true);
  EXPECT_DOUBLE_EQ(off[1].v_z, 0.952);
  EXPECT_NEAR(off[1].v_xy, 0.804 * geometry::visibility(geom, 1.7e-3) / geom.v0, 1e-15);
  EXPECT_DOUBLE_EQ(on[1].v_xy, 0.804);
}

TEST(Stability, NoiselessCombinedIsConstant) {
  StabilityOptions opt;
  const auto s = stability_series(0.804, opt);
  ASSERT_EQ(s.size(), 10u);
  for (const auto& p : s) EXPECT_NEAR(p.combined, 0.804, 1e-14);
  EXPECT_NEAR(s.back().phase - s.front().phase, 2 * kPi * (1800.0 - 180.0) / 7200.0, 1e-12);
  EXPECT_GT(std::abs(s.back().e1 - s.front().e1), 0.3);
}

TEST(Stability, PoissonStaysNear) {
  StabilityOptions opt;
  opt.poisson = true;
  opt.seed = 3;
  for (const auto& p : stability_series(0.804, opt)) EXPECT_NEAR(p.combined, 0.804, 0.03);
  opt.bucket = 0;
  EXPECT_THROW(stability_series(0.804, opt), InvalidArgument);
}

}  // namespace
}  // namespace mmtqa::analysis
