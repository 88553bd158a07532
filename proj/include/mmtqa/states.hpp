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

#ifndef MMTQA_STATES_HPP
#define MMTQA_STATES_HPP

#include <span>

#include "mmtqa/measurement.hpp"
#include "mmtqa/quantum.hpp"

namespace mmtqa::states {

using quantum::DensityMatrix;
using quantum::Matrix;

/// Pauli depolarization probabilities.
struct DepolarizationParams {
  double p_x = 0.0;
  double p_y = 0.0;
  double p_z = 0.0;

  /// p_x = p_y = p_xy.
  static DepolarizationParams unbiased(double p_xy, double p_z) { return {p_xy, p_xy, p_z}; }

  void validate() const;
};

/// Correlation visibilities in the computational basis and the xy-plane.
struct VisibilityPair {
  double v_z = 0.0;
  double v_xy = 0.0;

  void validate() const;
};

/// Channel parameters that reproduce the measured visibilities 0.952 / 0.804.
inline constexpr double kMeasuredPxy = 0.012;
inline constexpr double kMeasuredPz = 0.086;

/// (|H>|E> + |V>|L>) / sqrt(2) in the basis {H, V} (x) {E, L}.
DensityMatrix hybrid_bell_state();

/// Lift a 2x2 state into 2x3 by adding Bob's vacuum. With probability
/// `arrival_prob` Bob holds the photon; otherwise Alice keeps her reduced
/// state and Bob is in the vacuum.
DensityMatrix embed_2x3(const DensityMatrix& rho22, double arrival_prob);

/// Polarizer transmission paid to erase which-path polarization.
inline constexpr double kPolarizerThroughput = 0.5;
/// End-to-end transmission of the polarization-to-time-bin converter.
inline constexpr double kConverterTransmission = 0.24;

struct TimeBinConversion {
  DensityMatrix state;  ///< in the basis {E, L}
  double throughput = kPolarizerThroughput;
};

/// Relabels H -> L and V -> E. Note that the hybrid state pairs H with E;
/// the two conventions differ by an E <-> L relabeling and are kept separate.
TimeBinConversion pol_to_timebin_map(const DensityMatrix& pol_state);

enum class ChannelTarget { kTimeBin, kPolarization };

/// rho_out = (1 - sum p_j) rho + sum_j p_j (1 (x) s_j) rho (1 (x) s_j), on a
/// 2x2 state. `target` selects which qubit the Paulis act on.
DensityMatrix depolarize(const DensityMatrix& rho, const DepolarizationParams& p,
                         ChannelTarget target = ChannelTarget::kTimeBin);

struct ZVisibility {
  double v_plus_z = 0.0;
  double v_minus_z = 0.0;
  double v_z = 0.0;
};

/// Conditional visibilities on Bob's early (+z) and late (-z) outcomes.
/// Works on 2x2 states with a 2-dim measurement and on 2x3 states with a
/// 3-dim one. Throws ZeroDenominatorError when a conditional has no counts.
ZVisibility visibility_z(const DensityMatrix& rho, const measurement::TimeBinMeasurement& bob);

struct XyVisibility {
  double v_plus_xy = 0.0;
  double v_minus_xy = 0.0;
  double v_xy = 0.0;
  double fitted_phase = 0.0;   ///< phase of the '+' branch fringe
  double max_residual = 0.0;   ///< largest |rate - fit| over both branches
};

/// Scan Alice's relative phase phi' over `phase_grid` with Bob on the middle
/// bin, fit A + B cos(phi' - phi0) to both Alice outcomes by linear least
/// squares and report |B| / A. The grid needs >= 8 points covering a period.
XyVisibility visibility_xy(const DensityMatrix& rho, const measurement::TimeBinMeasurement& bob,
                           std::span<const double> phase_grid);

/// Closed forms for the hybrid state under the channel: 1 - 2(p_x + p_y) and
/// 1 - 2(p_y + p_z).
VisibilityPair channel_visibilities(const DepolarizationParams& p);

/// n equally spaced phases in [0, 2 pi).
std::vector<double> uniform_phase_grid(int n, double offset = 0.0);

}  // namespace mmtqa::states

#endif  // MMTQA_STATES_HPP
