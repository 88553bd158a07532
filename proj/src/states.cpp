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

#include "mmtqa/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmtqa/errors.hpp"

namespace mmtqa::states {

using quantum::Complex;
using quantum::kron;

namespace {

constexpr double kPi = std::numbers::pi;

// Tr[rho (alice (x) bob)].
double joint_rate(const DensityMatrix& rho, const Matrix& alice, const Matrix& bob) {
  return quantum::expectation(rho.matrix(), kron(alice, bob));
}

void check_measurement(const DensityMatrix& rho, const measurement::TimeBinMeasurement& bob) {
  if (rho.dim_a() != 2 || rho.dim_b() != bob.dim()) {
    throw DimensionMismatch("state is 2x" + std::to_string(rho.dim_b()) +
                            " but the time-bin measurement acts on dimension " +
                            std::to_string(bob.dim()));
  }
}

struct SinusoidFit {
  double offset;
  double cos_coeff;
  double sin_coeff;
  double max_residual;
};

SinusoidFit fit_sinusoid(std::span<const double> phases, std::span<const double> values) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double p = phases[static_cast<std::size_t>(k)];
    design(k, 0) = 1.0;
    design(k, 1) = std::cos(p);
    design(k, 2) = std::sin(p);
    y(k) = values[static_cast<std::size_t>(k)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) throw FitDegenerateError("phase grid does not determine a sinusoid");
  const Eigen::Vector3d coef = qr.solve(y);
  const double resid = (design * coef - y).cwiseAbs().maxCoeff();
  return {coef(0), coef(1), coef(2), resid};
}

}  // namespace

void DepolarizationParams::validate() const {
  for (double p : {p_x, p_y, p_z}) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarization probabilities must lie in [0, 1]");
  }
  if (p_x + p_y + p_z > 1.0 + 1e-15) throw InvalidArgument("depolarization probabilities sum above 1");
}

void VisibilityPair::validate() const {
  if (!(std::abs(v_z) <= 1.0) || !(std::abs(v_xy) <= 1.0)) {
    throw InvalidArgument("visibilities must lie in [-1, 1]");
  }
}

DensityMatrix hybrid_bell_state() {
  quantum::Vector psi = quantum::Vector::Zero(4);
  psi(0) = 1.0 / std::sqrt(2.0);  // |H E>
  psi(3) = 1.0 / std::sqrt(2.0);  // |V L>
  return DensityMatrix(2, 2, psi * psi.adjoint());
}

DensityMatrix embed_2x3(const DensityMatrix& rho22, double arrival_prob) {
  if (rho22.dim_a() != 2 || rho22.dim_b() != 2) throw DimensionMismatch("embed_2x3 needs a 2x2 state");
  if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0)) {
    throw InvalidArgument("arrival probability must lie in [0, 1]");
  }
  const Matrix& src = rho22.matrix();
  Matrix out = Matrix::Zero(6, 6);
  // Bob qubit index b in {E, L} -> 3-dim index b + 1.
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          out(a * 3 + b + 1, a2 * 3 + b2 + 1) = arrival_prob * src(a * 2 + b, a2 * 2 + b2);
  const Matrix alice = quantum::trace_out_b(src, 2, 2);
  for (int a = 0; a < 2; ++a)
    for (int a2 = 0; a2 < 2; ++a2) out(a * 3, a2 * 3) = (1.0 - arrival_prob) * alice(a, a2);
  return DensityMatrix(2, 3, out);
}

TimeBinConversion pol_to_timebin_map(const DensityMatrix& pol_state) {
  if (pol_state.dim() != 2) throw DimensionMismatch("pol_to_timebin_map needs a single qubit");
  // Columns are the images of H and V in the basis {E, L}: H -> L, V -> E.
  Matrix u(2, 2);
  u << 0, 1, 1, 0;
  Matrix out = u * pol_state.matrix() * u.adjoint();
  return {DensityMatrix(2, 1, out), kPolarizerThroughput};
}

DensityMatrix depolarize(const DensityMatrix& rho, const DepolarizationParams& p,
                         ChannelTarget target) {
  p.validate();
  if (rho.dim_a() != 2 || rho.dim_b() != 2) throw DimensionMismatch("depolarize needs a 2x2 state");
  const Matrix id = quantum::identity(2);
  auto lift = [&](const Matrix& pauli) {
    return target == ChannelTarget::kTimeBin ? kron(id, pauli) : kron(pauli, id);
  };
  const Matrix& r = rho.matrix();
  Matrix out = (1.0 - p.p_x - p.p_y - p.p_z) * r;
  const Matrix sx = lift(quantum::pauli_x());
  const Matrix sy = lift(quantum::pauli_y());
  const Matrix sz = lift(quantum::pauli_z());
  out += p.p_x * sx * r * sx;
  out += p.p_y * sy * r * sy;
  out += p.p_z * sz * r * sz;
  // Hermitian by construction; strip rounding asymmetry before validation.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(2, 2, out);
}

ZVisibility visibility_z(const DensityMatrix& rho, const measurement::TimeBinMeasurement& bob) {
  check_measurement(rho, bob);
  const auto alice = measurement::alice_povm();
  const double he = joint_rate(rho, alice.h, bob.early);
  const double ve = joint_rate(rho, alice.v, bob.early);
  const double vl = joint_rate(rho, alice.v, bob.late);
  const double hl = joint_rate(rho, alice.h, bob.late);
  if (he + ve <= 0.0) throw ZeroDenominatorError("no coincidences conditioned on the early bin");
  if (vl + hl <= 0.0) throw ZeroDenominatorError("no coincidences conditioned on the late bin");
  ZVisibility out;
  out.v_plus_z = (he - ve) / (he + ve);
  out.v_minus_z = (vl - hl) / (vl + hl);
  out.v_z = 0.5 * (out.v_plus_z + out.v_minus_z);
  return out;
}

XyVisibility visibility_xy(const DensityMatrix& rho, const measurement::TimeBinMeasurement& bob,
                           std::span<const double> phase_grid) {
  check_measurement(rho, bob);
  const std::size_t n = phase_grid.size();
  if (n < 8) throw FitDegenerateError("phase grid needs at least 8 points, got " + std::to_string(n));
  const auto [lo, hi] = std::minmax_element(phase_grid.begin(), phase_grid.end());
  const double span = (*hi - *lo) * static_cast<double>(n) / static_cast<double>(n - 1);
  if (span < 2.0 * kPi * (1.0 - 1e-9)) throw FitDegenerateError("phase grid must cover a full period");

  std::vector<double> plus(n);
  std::vector<double> minus(n);
  for (std::size_t k = 0; k < n; ++k) {
    plus[k] = joint_rate(rho, measurement::alice_phase_projector(phase_grid[k], +1), bob.middle);
    minus[k] = joint_rate(rho, measurement::alice_phase_projector(phase_grid[k], -1), bob.middle);
  }
  const SinusoidFit fp = fit_sinusoid(phase_grid, plus);
  const SinusoidFit fm = fit_sinusoid(phase_grid, minus);
  if (fp.offset <= 0.0 || fm.offset <= 0.0) {
    throw FitDegenerateError("fringe offset is not positive; no middle-bin coincidences");
  }
  XyVisibility out;
  out.v_plus_xy = std::hypot(fp.cos_coeff, fp.sin_coeff) / fp.offset;
  out.v_minus_xy = std::hypot(fm.cos_coeff, fm.sin_coeff) / fm.offset;
  out.v_xy = 0.5 * (out.v_plus_xy + out.v_minus_xy);
  out.fitted_phase = std::atan2(fp.sin_coeff, fp.cos_coeff);
  out.max_residual = std::max(fp.max_residual, fm.max_residual);
  return out;
}

VisibilityPair channel_visibilities(const DepolarizationParams& p) {
  return {1.0 - 2.0 * (p.p_x + p.p_y), 1.0 - 2.0 * (p.p_y + p.p_z)};
}

std::vector<double> uniform_phase_grid(int n, double offset) {
  std::vector<double> g(static_cast<std::size_t>(std::max(n, 0)));
  for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = offset + 2.0 * kPi * k / n;
  return g;
}

}  // namespace mmtqa::states
