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


// Entanglement verification from measured visibilities: is there any PPT
// state on C^2 (x) C^3 (Bob's vacuum, early, late) that reproduces the
// observed correlations through the lossy analyzer? For 2x3 systems PPT is
// equivalent to separability, so infeasibility certifies entanglement.

#ifndef MMTQA_VERIFY_HPP
#define MMTQA_VERIFY_HPP

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtqa/measurement.hpp"
#include "mmtqa/quantum.hpp"

namespace mmtqa::verify {

using quantum::Matrix;

/// Tr(rho op) = target.
struct LinearConstraint {
  Matrix op;
  double target = 0.0;
  std::string label;
};

/// Default probability that Bob's photon is present.
inline constexpr double kDefaultArrival = 2.0 / 3.0;

struct ConstraintSet {
  std::size_t dim_a = 2;
  std::size_t dim_b = 3;
  double v_z = 0.0;
  double v_xy = 0.0;
  measurement::AnalyzerEfficiencies eff{};
  std::optional<double> arrival;
  std::vector<LinearConstraint> constraints;  ///< trace first, then arrival, then the three visibility forms
  std::size_t rank = 0;                       ///< rank of the constraint map
  std::vector<std::string> warnings;
  bool block_diagonal = false;                ///< restrict rho to vacuum (+) qubit blocks

  std::size_t dim() const { return dim_a * dim_b; }
  /// max_k |Tr(rho C_k) - target_k|.
  double residual(const Matrix& rho) const;
};

/// Three homogeneous forms Tr[rho (D_k - v S_k)] = 0 built from the analyzer
/// POVM, with V+z = V-z = v_z, plus Tr rho = 1 and, when `arrival` is set,
/// Tr[rho (1 (x) P_photon)] = arrival. Without the arrival constraint any
/// vacuum-only state satisfies the homogeneous forms.
ConstraintSet build_constraints(double v_z, double v_xy,
                                const measurement::AnalyzerEfficiencies& eff = {},
                                std::optional<double> arrival = kDefaultArrival);

struct SolverOptions {
  double tol = 1e-8;        ///< verdict threshold on the margin
  double gap_tol = 1e-7;    ///< required certified bracket width
  int max_iter = 600;       ///< Newton steps
};

enum class Verdict { kFeasible, kInfeasible };

struct FeasibilityReport {
  Verdict verdict = Verdict::kInfeasible;
  double margin = 0.0;          ///< certified lower bound on t*
  double margin_upper = 0.0;    ///< certified upper bound on t*
  int iterations = 0;           ///< Newton steps
  int outer_iterations = 0;
  double constraint_residual = 0.0;
  double min_eig_rho = 0.0;
  double min_eig_pt = 0.0;
  Matrix witness;               ///< final iterate; a valid PPT state when feasible

  bool feasible() const { return verdict == Verdict::kFeasible; }
};

/// Maximizes t subject to rho >= t I, rho^T_A >= t I on the affine constraint
/// set with a primal log-barrier interior-point method. Feasible iff the
/// certified margin reaches -tol; infeasible iff the dual bound falls below
/// -tol. Throws NonConvergence when neither is certified within max_iter.
FeasibilityReport sdp_feasible(const ConstraintSet& c, const SolverOptions& opt = {});

/// Same problem restricted to block-diagonal rho (vacuum (+) qubit). Throws
/// StructureError if a constraint couples the blocks.
ConstraintSet block_diagonal_restriction(const ConstraintSet& c);

struct ProjectionResult {
  bool feasible = false;
  double violation = 0.0;   ///< max of the three set distances at the end
  int iterations = 0;
  Matrix point;
};

/// Dykstra alternating projections between the PSD cone, the PPT image of
/// the PSD cone and the affine set.
ProjectionResult alternating_projection_check(const ConstraintSet& c, int max_iter = 20000,
                                              double tol = 1e-7);

/// True iff rho^T_A has an eigenvalue below -1e-10. Throws InvalidStateError
/// on an invalid state.
bool ppt_oracle(const quantum::DensityMatrix& rho);

struct BoundaryPoint {
  double v_z = 0.0;
  double threshold = 0.0;     ///< smallest certified-infeasible v_xy found, 1 if none
  bool feasible_at_one = false;
  double margin = 0.0;        ///< margin at the reported threshold
  int iterations = 0;         ///< Newton steps over the bisection
};

struct BoundaryOptions {
  double resolution = 1e-3;
  SolverOptions solver{};
  std::optional<double> arrival = kDefaultArrival;
  bool block_diagonal = false;
  int jobs = 1;
};

/// Bisection on v_xy in [0, 1] for every v_z. Midpoints the solver cannot
/// certify either way count as not entangled. Output order follows the grid.
std::vector<BoundaryPoint> boundary_scan(const std::vector<double>& v_z_grid,
                                         const measurement::AnalyzerEfficiencies& eff = {},
                                         const BoundaryOptions& opt = {});

/// Columns v_z, v_xy_threshold, margin, iterations.
void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& pts,
                        const std::vector<std::pair<std::string, std::string>>& meta);

/// Report plus witness in the operator schema.
nlohmann::json report_to_json(const ConstraintSet& c, const FeasibilityReport& r);

}  // namespace mmtqa::verify

#endif  // MMTQA_VERIFY_HPP
