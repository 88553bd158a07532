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

// Small dense complex operators for a polarization qubit (Alice) paired with
// a time-bin system (Bob). Basis conventions used throughout the library:
//   Alice:           {H, V}
//   Bob, qubit:      {E, L}
//   Bob, with loss:  {vacuum, E, L}
// Bipartite index = a * dim_b + b (Alice is the left Kronecker factor).

#ifndef MMTQA_QUANTUM_HPP
#define MMTQA_QUANTUM_HPP

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace mmtqa::quantum {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Frobenius norm of (m - m^dagger).
double hermiticity_defect(const Matrix& m);

class HermitianOperator {
 public:
  /// Throws NonHermitianError when |m - m^dagger|_F > tol * max(1, |m|_F).
  explicit HermitianOperator(Matrix m, double tol = 1e-12);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

/// A trace-one positive operator on C^dim_a (x) C^dim_b. Single-party states
/// use dim_b = 1.
class DensityMatrix {
 public:
  /// Throws InvalidStateError unless Hermitian within 1e-12, trace 1 within
  /// 1e-10 and minimum eigenvalue >= -1e-9.
  DensityMatrix(std::size_t dim_a, std::size_t dim_b, Matrix m);

  static DensityMatrix from_pure(std::size_t dim_a, std::size_t dim_b, const Vector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim_a, std::size_t dim_b);

  std::size_t dim_a() const { return dim_a_; }
  std::size_t dim_b() const { return dim_b_; }
  std::size_t dim() const { return dim_a_ * dim_b_; }
  const Matrix& matrix() const { return m_; }

  double purity() const;

 private:
  std::size_t dim_a_;
  std::size_t dim_b_;
  Matrix m_;
};

struct EigenDecomposition {
  RealVector values;  ///< ascending
  Matrix vectors;     ///< orthonormal columns, vectors.col(k) <-> values(k)
  int sweeps = 0;
};

/// Cyclic complex Jacobi rotations. Throws NonHermitianError on input that is
/// not Hermitian within 1e-10 relative.
EigenDecomposition eig_hermitian(const Matrix& m);
EigenDecomposition eig_hermitian(const HermitianOperator& op);

double min_eigenvalue(const Matrix& m);

/// Kronecker product, `a` leftmost.
Matrix kron(const Matrix& a, const Matrix& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);

/// Transpose of the first (Alice) factor of an operator on C^dim_a (x) C^dim_b.
Matrix partial_transpose(const Matrix& m, std::size_t dim_a, std::size_t dim_b);
HermitianOperator partial_transpose(const DensityMatrix& rho);

/// Partial trace over Bob.
Matrix trace_out_b(const Matrix& m, std::size_t dim_a, std::size_t dim_b);

/// Tr(rho obs). Throws DimensionMismatch, and InvalidStateError if the
/// imaginary residue exceeds 1e-10.
double expectation(const DensityMatrix& rho, const HermitianOperator& obs);
double expectation(const Matrix& rho, const Matrix& obs);

Matrix identity(std::size_t dim);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();

// JSON fixture schema: {"dim_a": n, "dim_b": m, "re": [[...]], "im": [[...]]}.
nlohmann::json to_json(const Matrix& m, std::size_t dim_a, std::size_t dim_b);
nlohmann::json to_json(const DensityMatrix& rho);
/// Returns the matrix and fills dims. Throws InvalidArgument on schema errors.
Matrix matrix_from_json(const nlohmann::json& j, std::size_t* dim_a = nullptr,
                        std::size_t* dim_b = nullptr);
DensityMatrix density_from_json(const nlohmann::json& j);

}  // namespace mmtqa::quantum

#endif  // MMTQA_QUANTUM_HPP
