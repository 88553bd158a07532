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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mmtqa/errors.hpp"

namespace mmtqa::quantum {

double hermiticity_defect(const Matrix& m) { return (m - m.adjoint()).norm(); }

HermitianOperator::HermitianOperator(Matrix m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionMismatch("operator must be square");
  if (hermiticity_defect(m_) > tol * std::max(1.0, m_.norm())) {
    throw NonHermitianError("operator is not Hermitian (defect " +
                            std::to_string(hermiticity_defect(m_)) + ")");
  }
}

DensityMatrix::DensityMatrix(std::size_t dim_a, std::size_t dim_b, Matrix m)
    : dim_a_(dim_a), dim_b_(dim_b), m_(std::move(m)) {
  const auto n = static_cast<Eigen::Index>(dim_a * dim_b);
  if (dim_a == 0 || dim_b == 0 || m_.rows() != n || m_.cols() != n) {
    throw DimensionMismatch("density matrix shape does not match dim_a * dim_b");
  }
  if (hermiticity_defect(m_) > 1e-12) throw InvalidStateError("density matrix is not Hermitian");
  const Complex tr = m_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > 1e-10) {
    throw InvalidStateError("density matrix trace is " + std::to_string(tr.real()));
  }
  const double lo = min_eigenvalue(m_);
  if (lo < -1e-9) {
    throw InvalidStateError("density matrix has negative eigenvalue " + std::to_string(lo));
  }
}

DensityMatrix DensityMatrix::from_pure(std::size_t dim_a, std::size_t dim_b, const Vector& psi) {
  const Vector unit = psi / psi.norm();
  return DensityMatrix(dim_a, dim_b, unit * unit.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim_a, std::size_t dim_b) {
  const auto n = dim_a * dim_b;
  return DensityMatrix(dim_a, dim_b, identity(n) / static_cast<double>(n));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

// Each rotation zeroes one off-diagonal pair. The 2x2 block
// [[app, apq], [conj(apq), aqq]] is first made real by a phase on column q,
// then diagonalised by the classic real Jacobi rotation.
EigenDecomposition eig_hermitian(const Matrix& input) {
  if (input.rows() != input.cols()) throw DimensionMismatch("eig_hermitian needs a square matrix");
  const double scale = std::max(1.0, input.norm());
  if (hermiticity_defect(input) > 1e-10 * scale) {
    throw NonHermitianError("eig_hermitian: input is not Hermitian");
  }
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.adjoint());
  Matrix v = Matrix::Identity(n, n);

  auto off_norm = [&]() {
    double s = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += std::norm(a(p, q));
    return std::sqrt(2.0 * s);
  };

  const double target = 1e-15 * std::max(a.norm(), 1e-300);
  int sweep = 0;
  constexpr int kMaxSweeps = 100;
  for (; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const Complex ph = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex phc = std::conj(ph);
        // Column update: A <- A J with J = [[c, s], [-s e^{-i th}, c e^{-i th}]].
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = c * akp - s * phc * akq;
          a(k, q) = s * akp + c * phc * akq;
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * phc * vkq;
          v(k, q) = s * vkp + c * phc * vkq;
        }
        // Row update: A <- J^dagger A.
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = c * apk - s * ph * aqk;
          a(q, k) = s * apk + c * ph * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }
  if (off_norm() > 1e-12 * std::max(a.norm(), 1e-300)) {
    throw NonConvergence("eig_hermitian: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  out.sweeps = sweep;
  return out;
}

EigenDecomposition eig_hermitian(const HermitianOperator& op) { return eig_hermitian(op.matrix()); }

double min_eigenvalue(const Matrix& m) { return eig_hermitian(m).values(0); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

Matrix partial_transpose(const Matrix& m, std::size_t dim_a, std::size_t dim_b) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (m.rows() != da * db || m.cols() != da * db) {
    throw DimensionMismatch("partial_transpose: shape does not match dim_a * dim_b");
  }
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index a2 = 0; a2 < da; ++a2)
      out.block(a * db, a2 * db, db, db) = m.block(a2 * db, a * db, db, db);
  return out;
}

HermitianOperator partial_transpose(const DensityMatrix& rho) {
  return HermitianOperator(partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b()));
}

Matrix trace_out_b(const Matrix& m, std::size_t dim_a, std::size_t dim_b) {
  const auto da = static_cast<Eigen::Index>(dim_a);
  const auto db = static_cast<Eigen::Index>(dim_b);
  if (m.rows() != da * db) throw DimensionMismatch("trace_out_b: shape mismatch");
  Matrix out = Matrix::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index a2 = 0; a2 < da; ++a2) out(a, a2) = m.block(a * db, a2 * db, db, db).trace();
  return out;
}

double expectation(const Matrix& rho, const Matrix& obs) {
  if (rho.rows() != obs.rows() || rho.cols() != obs.cols()) {
    throw DimensionMismatch("expectation: state is " + std::to_string(rho.rows()) +
                            "-dimensional, observable " + std::to_string(obs.rows()));
  }
  const Complex v = (rho * obs).trace();
  if (std::abs(v.imag()) > 1e-10) {
    throw InvalidStateError("expectation has imaginary residue " + std::to_string(v.imag()));
  }
  return v.real();
}

double expectation(const DensityMatrix& rho, const HermitianOperator& obs) {
  return expectation(rho.matrix(), obs.matrix());
}

Matrix identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return Matrix::Identity(n, n);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

nlohmann::json to_json(const Matrix& m, std::size_t dim_a, std::size_t dim_b) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rr = nlohmann::json::array();
    nlohmann::json ri = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim_a", dim_a}, {"dim_b", dim_b}, {"re", std::move(re)}, {"im", std::move(im)}};
}

nlohmann::json to_json(const DensityMatrix& rho) {
  return to_json(rho.matrix(), rho.dim_a(), rho.dim_b());
}

Matrix matrix_from_json(const nlohmann::json& j, std::size_t* dim_a, std::size_t* dim_b) {
  try {
    const auto da = j.at("dim_a").get<std::size_t>();
    const auto db = j.at("dim_b").get<std::size_t>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto n = static_cast<Eigen::Index>(da * db);
    if (static_cast<Eigen::Index>(re.size()) != n || static_cast<Eigen::Index>(im.size()) != n) {
      throw InvalidArgument("operator JSON: row count does not match dim_a * dim_b");
    }
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto& rr = re.at(static_cast<std::size_t>(r));
      const auto& ri = im.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(rr.size()) != n || static_cast<Eigen::Index>(ri.size()) != n) {
        throw InvalidArgument("operator JSON: ragged row " + std::to_string(r));
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        m(r, c) = Complex(rr.at(static_cast<std::size_t>(c)).get<double>(),
                          ri.at(static_cast<std::size_t>(c)).get<double>());
      }
    }
    if (dim_a) *dim_a = da;
    if (dim_b) *dim_b = db;
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("operator JSON: ") + e.what());
  }
}

DensityMatrix density_from_json(const nlohmann::json& j) {
  std::size_t da = 0;
  std::size_t db = 0;
  Matrix m = matrix_from_json(j, &da, &db);
  return DensityMatrix(da, db, std::move(m));
}

}  // namespace mmtqa::quantum
