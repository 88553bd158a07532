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


#include "mmtqa/quantum.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "mmtqa/errors.hpp"
#include "test_util.hpp"

namespace mmtqa::quantum {
namespace {

using testing::random_hermitian;
using testing::random_state;

TEST(Eigen, JacobiMatchesLapackStyleSolver) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 7;
    const Matrix a = random_hermitian(rng, n, 1.0 + trial);
    const auto mine = eig_hermitian(a);
    Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
    for (Eigen::Index k = 0; k < n; ++k) {
      EXPECT_NEAR(mine.values(k), ref.eigenvalues()(k), 1e-12 * (1.0 + a.norm()));
    }
    // A V = V diag(lambda), V unitary.
    const Matrix resid = a * mine.vectors - mine.vectors * mine.values.cast<Complex>().asDiagonal();
    EXPECT_LT(resid.norm(), 1e-11 * (1.0 + a.norm()));
    EXPECT_LT((mine.vectors.adjoint() * mine.vectors - Matrix::Identity(n, n)).norm(), 1e-12);
  }
}

TEST(Eigen, SortedAscendingAndDegenerate) {
  Matrix a = Matrix::Identity(4, 4) * 2.0;
  a(0, 0) = -1.0;
  const auto e = eig_hermitian(a);
  EXPECT_DOUBLE_EQ(e.values(0), -1.0);
  for (int k = 1; k < 4; ++k) EXPECT_DOUBLE_EQ(e.values(k), 2.0);
  EXPECT_EQ(e.sweeps, 0);
}

TEST(Eigen, PauliSpectra) {
  for (const Matrix& p : {pauli_x(), pauli_y(), pauli_z()}) {
    const auto e = eig_hermitian(p);
    EXPECT_NEAR(e.values(0), -1.0, 1e-15);
    EXPECT_NEAR(e.values(1), 1.0, 1e-15);
  }
}

TEST(Eigen, RejectsNonHermitian) {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(eig_hermitian(a), NonHermitianError);
  EXPECT_THROW(HermitianOperator{a}, NonHermitianError);
  EXPECT_THROW(eig_hermitian(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST(Operators, KronAndPartialTrace) {
  std::mt19937_64 rng(3);
  const auto ra = random_state(rng, 2, 1);
  const auto rb = random_state(rng, 3, 1);
  const Matrix joint = kron(ra.matrix(), rb.matrix());
  EXPECT_EQ(joint.rows(), 6);
  EXPECT_LT((trace_out_b(joint, 2, 3) - ra.matrix()).norm(), 1e-14);
  EXPECT_NEAR(joint(1 * 3 + 2, 0 * 3 + 1).real(), (ra.matrix()(1, 0) * rb.matrix()(2, 1)).real(), 1e-15);
}

TEST(Operators, PartialTransposeOfProductIsTransposeOfFactor) {
  std::mt19937_64 rng(5);
  const auto ra = random_state(rng, 2, 1);
  const auto rb = random_state(rng, 3, 1);
  const Matrix pt = partial_transpose(kron(ra.matrix(), rb.matrix()), 2, 3);
  EXPECT_LT((pt - kron(ra.matrix().transpose(), rb.matrix())).norm(), 1e-14);
}

TEST(Operators, PartialTransposeIsInvolution) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto r = random_state(rng, 2, 3);
    const Matrix twice = partial_transpose(partial_transpose(r.matrix(), 2, 3), 2, 3);
    EXPECT_EQ((twice - r.matrix()).norm(), 0.0);
    EXPECT_NEAR(partial_transpose(r.matrix(), 2, 3).trace().real(), 1.0, 1e-14);
  }
}

TEST(Operators, BellStatePartialTransposeSpectrum) {
  Vector psi = Vector::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  const auto rho = DensityMatrix::from_pure(2, 2, psi);
  const auto e = eig_hermitian(partial_transpose(rho).matrix());
  EXPECT_NEAR(e.values(0), -0.5, 1e-15);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(e.values(k), 0.5, 1e-15);
}

TEST(DensityMatrixTest, Validation) {
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(2, 3));
  EXPECT_NEAR(DensityMatrix::maximally_mixed(2, 3).purity(), 1.0 / 6.0, 1e-15);
  Matrix m = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix(2, 1, m), InvalidStateError);
  m << 1.5, 0, 0, -0.5;
  EXPECT_THROW(DensityMatrix(2, 1, m), InvalidStateError);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(DensityMatrix(2, 1, m), InvalidStateError);
  EXPECT_THROW(DensityMatrix(2, 2, Matrix::Identity(2, 2) / 2.0), DimensionMismatch);
}

TEST(Expectation, PauliOnBasisStates) {
  Vector up = Vector::Zero(2);
  up(0) = 1.0;
  const auto rho = DensityMatrix::from_pure(2, 1, up);
  EXPECT_DOUBLE_EQ(expectation(rho.matrix(), pauli_z()), 1.0);
  EXPECT_DOUBLE_EQ(expectation(rho.matrix(), pauli_x()), 0.0);
  EXPECT_THROW(expectation(rho.matrix(), identity(3)), DimensionMismatch);
  Matrix skew = Matrix::Zero(2, 2);
  skew(0, 0) = Complex(0, 1);
  EXPECT_THROW(expectation(rho.matrix(), skew), InvalidStateError);
}

TEST(Json, RoundTrip) {
  std::mt19937_64 rng(8);
  const auto r = random_state(rng, 2, 3);
  const auto j = to_json(r);
  const auto back = density_from_json(j);
  EXPECT_EQ(back.dim_a(), 2u);
  EXPECT_EQ(back.dim_b(), 3u);
  EXPECT_EQ((back.matrix() - r.matrix()).norm(), 0.0);
  std::size_t da = 0, db = 0;
  matrix_from_json(j, &da, &db);
  EXPECT_EQ(da * db, 6u);
}

TEST(Json, SchemaErrors) {
  EXPECT_THROW(matrix_from_json(nlohmann::json::object()), InvalidArgument);
  nlohmann::json j = {{"dim_a", 1}, {"dim_b", 2}, {"re", {{1, 0}}}, {"im", {{0, 0}, {0, 0}}}};
  EXPECT_THROW(matrix_from_json(j), InvalidArgument);
}

}  // namespace
}  // namespace mmtqa::quantum
