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

// Ray model of an unbalanced Michelson time-bin analyzer illuminated at an
// angle of incidence (AOI) alpha.
//
// Beam-width convention: `sigma` is the 1/e radius of the field amplitude,
// E(r) = a exp(-r^2 / sigma^2), which is also the 1/e^2 intensity radius.
// Under this convention the two-beam output intensity is
//   I(delta, phi) = pi a^2 sigma^2 (1 + exp(-delta^2 / (2 sigma^2)) cos phi)
// exactly, and the visibility curve follows from it. Helpers below convert
// from other common width conventions.

#ifndef MMTQA_GEOMETRY_HPP
#define MMTQA_GEOMETRY_HPP

#include <array>

namespace mmtqa::geometry {

struct InterferometerGeometry {
  double delta_l0 = 0.60;       ///< path difference 2(L1 - L2) at normal incidence [m]
  double sigma = 1.49e-3;       ///< beam radius, see file comment [m]
  double v0 = 0.91;             ///< visibility at zero angle
  double wavelength = 776e-9;   ///< [m]
  double focal_length = 0.1;    ///< relay lens focal length [m]

  /// Throws DomainError when any field is out of range.
  void validate() const;
};

/// Paraxial ray-transfer matrix [[a, b], [c, d]]; b in metres, c in 1/m.
struct RayTransferMatrix {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  double determinant() const { return a * d - b * c; }
  /// Largest absolute entry-wise deviation from the 2x2 identity.
  double identity_residual() const;

  friend RayTransferMatrix operator*(const RayTransferMatrix& lhs, const RayTransferMatrix& rhs);
};

RayTransferMatrix free_space(double distance);
RayTransferMatrix thin_lens(double focal_length);

/// FS(f) L(f) FS(2f) L(f) FS(f), multiplied left to right. Equals -1.
RayTransferMatrix relay_single_pass(double focal_length);

/// The squared relay product (one double pass through the long arm). Equals 1.
RayTransferMatrix relay_matrix(double focal_length);

/// delta(alpha) = dL0 tan(alpha) / (1 + tan(alpha)). Requires |alpha| < pi/4.
double lateral_offset(const InterferometerGeometry& geom, double alpha);

/// Angle-dependent round-trip path difference, evaluated term by term.
double path_difference(const InterferometerGeometry& geom, double alpha);

/// path_difference(alpha) - delta_l0 in a form free of cancellation.
double path_difference_excess(const InterferometerGeometry& geom, double alpha);

/// Analytic d(path_difference)/d(alpha). Equals -2 dL0 at alpha = 0.
double path_difference_slope(const InterferometerGeometry& geom, double alpha);

/// Output intensity of the two interfering Gaussian beams.
double fringe_intensity(const InterferometerGeometry& geom, double alpha, double phi,
                        double amplitude);

/// V(alpha) = v0 exp(-[dL0 tan(alpha) / (sqrt(2) sigma (1 + tan(alpha)))]^2).
double visibility(const InterferometerGeometry& geom, double alpha);

/// Fringe contrast (Imax - Imin) / (Imax + Imin) extracted from
/// fringe_intensity sampled on `phase_points` phases in [0, 2 pi), scaled by v0.
double visibility_from_fringes(const InterferometerGeometry& geom, double alpha,
                               int phase_points = 360);

struct Phase {
  double unwrapped;  ///< 2 pi path_difference / wavelength
  double wrapped;    ///< same value reduced to (-pi, pi]
};

Phase phase(const InterferometerGeometry& geom, double alpha);

/// phase(alpha_to) - phase(alpha_from), computed from path_difference_excess
/// so that nanoradian steps do not drown in rounding of the 5e6 rad total.
double phase_shift(const InterferometerGeometry& geom, double alpha_from, double alpha_to);

/// Angle change that advances the phase by pi near `alpha`, from the
/// analytic slope: wavelength / (2 |d path_difference / d alpha|).
double aoi_per_pi(const InterferometerGeometry& geom, double alpha = 0.0);

/// Smallest step |d| > 0 from `alpha` (in the direction of `sign`) at which
/// |phase_shift(alpha, alpha + d)| reaches `target`, found by bracketing and
/// bisection on the exact path difference.
double aoi_for_phase(const InterferometerGeometry& geom, double target, double alpha = 0.0,
                     int sign = +1);

/// Reduce an angle to (-pi, pi].
double wrap_phase(double angle);

// Width conversions into the `sigma` used here.
double sigma_from_amplitude_std(double amplitude_std);   // E ~ exp(-r^2 / (2 s^2))
double sigma_from_intensity_std(double intensity_std);   // |E|^2 ~ exp(-r^2 / (2 s^2))
double sigma_from_intensity_radius(double radius_1e2);   // 1/e^2 intensity radius
double intensity_std_from_sigma(double sigma);

}  // namespace mmtqa::geometry

#endif  // MMTQA_GEOMETRY_HPP
