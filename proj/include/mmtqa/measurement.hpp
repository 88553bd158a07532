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

#ifndef MMTQA_MEASUREMENT_HPP
#define MMTQA_MEASUREMENT_HPP

#include <span>
#include <string>
#include <vector>

#include "mmtqa/quantum.hpp"

namespace mmtqa::measurement {

using quantum::Matrix;

/// Transmission of the long and short analyzer arms.
struct AnalyzerEfficiencies {
  double eta_l = 0.9;
  double eta_s = 0.9;

  void validate() const;
};

struct AlicePovm {
  Matrix h, v, d, a;
};

/// Projective polarization measurements in the H/V and D/A bases.
AlicePovm alice_povm();

/// Projector onto (|H> + sign e^{i phi} |V>) / sqrt(2); sign is +1 or -1.
Matrix alice_phase_projector(double phi, int sign);

/// Projector onto the +/- eigenvector of cos(theta) sigma_z + sin(theta) sigma_x.
Matrix alice_xz_projector(double theta, int sign);

/// Lossy one-output time-bin analyzer in the basis {vacuum, E, L}.
struct BobPovm {
  Matrix early;      ///< M_E
  Matrix late;       ///< M_L
  Matrix middle;     ///< M_X, the interfering middle bin
  Matrix no_click;   ///< I - M_E - M_L - M_X
};

/// The ideal analyzer has `phase` = 0; a nonzero value rotates the
/// early/late coherence of M_X by e^{-i phase}.
BobPovm bob_povm(const AnalyzerEfficiencies& eff, double phase = 0.0);

/// Early, late and middle-bin elements of a time-bin analyzer acting on a
/// 2-dim ({E, L}) or 3-dim ({vacuum, E, L}) Bob space.
struct TimeBinMeasurement {
  Matrix early;
  Matrix late;
  Matrix middle;

  std::size_t dim() const { return static_cast<std::size_t>(early.rows()); }
};

/// Lossless analyzer restricted to the qubit: E/4, L/4 and |phi><phi|/2.
TimeBinMeasurement ideal_timebin_measurement(double phase = 0.0);

/// bob_povm elements on the 3-dim space.
TimeBinMeasurement lossy_timebin_measurement(const AnalyzerEfficiencies& eff, double phase = 0.0);

struct PovmElementReport {
  double min_eigenvalue = 0.0;  ///< >= -tol for a positive element
  double max_eigenvalue = 0.0;  ///< <= 1 + tol for an element below identity
};

struct PovmDiagnostics {
  bool valid = true;
  std::vector<PovmElementReport> elements;
  double completeness_residual = 0.0;  ///< max |sum - I| entry
  std::vector<std::string> failures;
};

/// Checks positivity, E <= I and completeness of a measurement.
PovmDiagnostics validate_povm(std::span<const Matrix> elements, double tol = 1e-12);

}  // namespace mmtqa::measurement

#endif  // MMTQA_MEASUREMENT_HPP
