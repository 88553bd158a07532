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


#include "mmtqa/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mmtqa/errors.hpp"
#include "mmtqa/states.hpp"
#include "test_util.hpp"

namespace mmtqa::verify {
namespace {

using quantum::DensityMatrix;

DensityMatrix werner(double p) {
  const Matrix bell = states::hybrid_bell_state().matrix();
  return DensityMatrix(2, 2, p * bell + (1.0 - p) * quantum::identity(4) / 4.0);
}

TEST(PptOracle, WernerThreshold) {
  EXPECT_FALSE(ppt_oracle(werner(0.33)));
  EXPECT_TRUE(ppt_oracle(werner(0.34)));
  EXPECT_NEAR(quantum::min_eigenvalue(quantum::partial_transpose(werner(1.0).matrix(), 2, 2)), -0.5, 1e-14);
  EXPECT_NEAR(quantum::min_eigenvalue(quantum::partial_transpose(werner(1.0 / 3.0).matrix(), 2, 2)), 0.0, 1e-14);
}

TEST(PptOracle, ProductStatesArePpt) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto a = testing::random_state(rng, 2, 1);
    const auto b = testing::random_state(rng, 3, 1);
    EXPECT_FALSE(ppt_oracle(DensityMatrix(2, 3, quantum::kron(a.matrix(), b.matrix()))));
  }
}

TEST(Constraints, MeasuredStateSatisfiesThem) {
  const auto rho22 = states::depolarize(states::hybrid_bell_state(),
                                        states::DepolarizationParams::unbiased(states::kMeasuredPxy, states::kMeasuredPz));
  const auto rho = states::embed_2x3(rho22, kDefaultArrival);
  const auto c = build_constraints(0.952, 0.804);
  EXPECT_EQ(c.constraints.size(), 5u);
  EXPECT_EQ(c.rank, 5u);
  EXPECT_LT(c.residual(rho.matrix()), 1e-12);
  EXPECT_LT(c.residual(states::embed_2x3(rho22, 0.5).matrix()), 0.2);
  EXPECT_GT(c.residual(states::embed_2x3(rho22, 0.5).matrix()), 0.1);
}

TEST(Constraints, Validation) {
  EXPECT_THROW(build_constraints(1.2, 0.5), InvalidArgument);
  EXPECT_THROW(build_constraints(0.5, 0.5, {}, 1.5), InvalidArgument);
  EXPECT_EQ(build_constraints(0.5, 0.5, {}, std::nullopt).constraints.size(), 4u);
}

TEST(Sdp, MeasuredVisibilitiesAreEntangled) {
  const auto r = sdp_feasible(build_constraints(0.952, 0.804));
  EXPECT_FALSE(r.feasible());
  EXPECT_LT(r.margin_upper, -1e-8);
  EXPECT_LE(r.margin, r.margin_upper);
  EXPECT_NEAR(r.margin, -3.861e-2, 1e-4);
}

TEST(Sdp, ClassicalCorrelationsAreFeasibleWithWitness) {
  const auto c = build_constraints(1.0, 0.0);
  const auto r = sdp_feasible(c);
  ASSERT_TRUE(r.feasible());
  EXPECT_GE(r.margin, -1e-8);
  EXPECT_GE(r.min_eig_rho, -1e-8);
  EXPECT_GE(r.min_eig_pt, -1e-8);
  EXPECT_LT(c.residual(r.witness), 1e-9);
  EXPECT_NEAR(r.witness.trace().real(), 1.0, 1e-12);
}

TEST(Sdp, InteriorPointHasPositiveMargin) {
  const auto r = sdp_feasible(build_constraints(0.0, 0.0));
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(r.margin, 1.0 / 6.0, 1e-6);
}

TEST(Sdp, BracketsTheCircle) {
  // Threshold curve from an independent conic solver: v_xy = sqrt(1 - v_z^2).
  EXPECT_TRUE(sdp_feasible(build_constraints(0.6, 0.79)).feasible());
  EXPECT_FALSE(sdp_feasible(build_constraints(0.6, 0.81)).feasible());
  EXPECT_TRUE(sdp_feasible(build_constraints(0.952, 0.30)).feasible());
  EXPECT_FALSE(sdp_feasible(build_constraints(0.952, 0.31)).feasible());
}

TEST(Sdp, SwapOfArmEfficienciesLeavesMarginUnchanged) {
  const auto a = sdp_feasible(build_constraints(0.9, 0.6, {0.7, 0.9}));
  const auto b = sdp_feasible(build_constraints(0.9, 0.6, {0.9, 0.7}));
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_NEAR(a.margin, b.margin, 1e-6);
}

TEST(Sdp, CommonLossScalingLeavesVerdictUnchanged) {
  for (double eta : {1.0, 0.6, 0.3}) {
    EXPECT_FALSE(sdp_feasible(build_constraints(0.952, 0.804, {eta, eta})).feasible()) << eta;
    EXPECT_TRUE(sdp_feasible(build_constraints(0.952, 0.25, {eta, eta})).feasible()) << eta;
  }
}

TEST(Sdp, BlockRestrictionAgrees) {
  for (double vxy : {0.2, 0.5, 0.804}) {
    const auto full = build_constraints(0.8, vxy);
    const auto block = block_diagonal_restriction(full);
    EXPECT_TRUE(block.block_diagonal);
    const auto a = sdp_feasible(full);
    const auto b = sdp_feasible(block);
    EXPECT_EQ(a.verdict, b.verdict) << vxy;
    EXPECT_NEAR(a.margin, b.margin, 1e-6) << vxy;
  }
}

TEST(Sdp, AlternatingProjectionsAgree) {
  EXPECT_FALSE(alternating_projection_check(build_constraints(0.952, 0.804)).feasible);
  const auto p = alternating_projection_check(build_constraints(0.952, 0.25));
  EXPECT_TRUE(p.feasible);
  EXPECT_LT(p.violation, 1e-6);
}

TEST(Sdp, IterationBudgetEnforced) {
  SolverOptions opt;
  opt.max_iter = 3;
  EXPECT_THROW(sdp_feasible(build_constraints(0.6, 0.8), opt), NonConvergence);
}

TEST(Boundary, FollowsCircleAndIsMonotone) {
  BoundaryOptions opt;
  opt.jobs = 2;
  const std::vector<double> grid{0.0, 0.5, 0.8, 0.952};
  const auto pts = boundary_scan(grid, {}, opt);
  ASSERT_EQ(pts.size(), grid.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    EXPECT_DOUBLE_EQ(pts[k].v_z, grid[k]);
    EXPECT_NEAR(pts[k].threshold, std::sqrt(1.0 - grid[k] * grid[k]), 2e-3) << grid[k];
    if (k > 0) EXPECT_LE(pts[k].threshold, pts[k - 1].threshold);
  }
  std::ostringstream os;
  write_boundary_csv(os, pts, {});
  EXPECT_NE(os.str().find("v_xy_threshold"), std::string::npos);
}

TEST(Report, JsonCarriesVerdictAndWitness) {
  const auto c = build_constraints(1.0, 0.0);
  const auto j = report_to_json(c, sdp_feasible(c));
  EXPECT_EQ(j.at("verdict").get<std::string>(), "feasible");
  const auto w = quantum::matrix_from_json(j.at("witness"));
  EXPECT_EQ(w.rows(), 6);
}

}  // namespace
}  // namespace mmtqa::verify
