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


// Seeded generators for property tests.

#ifndef MMTQA_TESTS_TEST_UTIL_HPP
#define MMTQA_TESTS_TEST_UTIL_HPP

#include <random>

#include "mmtqa/quantum.hpp"

namespace mmtqa::testing {

using quantum::Complex;
using quantum::Matrix;

inline Matrix ginibre(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  const Matrix g = ginibre(rng, n, n);
  return scale * 0.5 * (g + g.adjoint());
}

/// Full-rank random state (Ginibre ensemble) unless rank is given.
inline quantum::DensityMatrix random_state(std::mt19937_64& rng, std::size_t da, std::size_t db,
                                           Eigen::Index rank = 0) {
  const auto n = static_cast<Eigen::Index>(da * db);
  const Matrix g = ginibre(rng, n, rank > 0 ? rank : n);
  Matrix r = g * g.adjoint();
  r /= r.trace().real();
  r = 0.5 * (r + r.adjoint()).eval();
  return quantum::DensityMatrix(da, db, r);
}

inline quantum::Vector random_unit(std::mt19937_64& rng, Eigen::Index n) {
  quantum::Vector v = ginibre(rng, n, 1);
  return v / v.norm();
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace mmtqa::testing

#endif  // MMTQA_TESTS_TEST_UTIL_HPP
