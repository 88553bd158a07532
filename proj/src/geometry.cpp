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

#include "mmtqa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mmtqa/errors.hpp"

namespace mmtqa::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

void check_angle(double alpha) {
  if (!std::isfinite(alpha) || std::abs(alpha) >= kPi / 4) {
    throw DomainError("angle of incidence must satisfy |alpha| < pi/4, got " +
                      std::to_string(alpha));
  }
}

}  // namespace

void InterferometerGeometry::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(delta_l0)) throw DomainError("delta_l0 must be > 0");
  if (!positive(sigma)) throw DomainError("sigma must be > 0");
  if (!positive(wavelength)) throw DomainError("wavelength must be > 0");
  if (!positive(focal_length)) throw DomainError("focal_length must be > 0");
  if (!(v0 >= 0.0 && v0 <= 1.0)) throw DomainError("v0 must lie in [0, 1]");
}

double RayTransferMatrix::identity_residual() const {
  return std::max({std::abs(a - 1.0), std::abs(b), std::abs(c), std::abs(d - 1.0)});
}

RayTransferMatrix operator*(const RayTransferMatrix& lhs, const RayTransferMatrix& rhs) {
  return {lhs.a * rhs.a + lhs.b * rhs.c, lhs.a * rhs.b + lhs.b * rhs.d,
          lhs.c * rhs.a + lhs.d * rhs.c, lhs.c * rhs.b + lhs.d * rhs.d};
}

RayTransferMatrix free_space(double distance) { return {1.0, distance, 0.0, 1.0}; }

RayTransferMatrix thin_lens(double focal_length) {
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) {
    throw DomainError("focal length must be > 0");
  }
  return {1.0, 0.0, -1.0 / focal_length, 1.0};
}

RayTransferMatrix relay_single_pass(double focal_length) {
  const double f = focal_length;
  return free_space(f) * thin_lens(f) * free_space(2.0 * f) * thin_lens(f) * free_space(f);
}

RayTransferMatrix relay_matrix(double focal_length) {
  const RayTransferMatrix pass = relay_single_pass(focal_length);
  return pass * pass;
}

double lateral_offset(const InterferometerGeometry& geom, double alpha) {
  check_angle(alpha);
  const double t = std::tan(alpha);
  return geom.delta_l0 * t / (1.0 + t);
}

double path_difference(const InterferometerGeometry& geom, double alpha) {
  check_angle(alpha);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const double t = std::tan(alpha);
  const double bracket = 1.0 / c + (1.0 - t) / (c + s);
  return 0.5 * geom.delta_l0 * bracket + lateral_offset(geom, alpha) * std::tan(alpha - kPi / 4);
}

// The bracket collapses to 2 / (cos + sin) and the offset term to
// t (t - 1) / (1 + t)^2, so dL / dL0 = [sec (1 + t) + t^2 - t] / (1 + t)^2.
// Subtracting 1 and writing sec - 1 = 2 sin^2(alpha/2) / cos leaves no
// cancellation for small angles.
double path_difference_excess(const InterferometerGeometry& geom, double alpha) {
  check_angle(alpha);
  const double t = std::tan(alpha);
  const double half = std::sin(0.5 * alpha);
  const double sec_minus_one = 2.0 * half * half / std::cos(alpha);
  const double one_t = 1.0 + t;
  return geom.delta_l0 * (sec_minus_one * one_t - 2.0 * t) / (one_t * one_t);
}

double path_difference_slope(const InterferometerGeometry& geom, double alpha) {
  check_angle(alpha);
  const double t = std::tan(alpha);
  const double sec = 1.0 / std::cos(alpha);
  const double sec2 = sec * sec;
  const double num = sec * (1.0 + t) + t * t - t;
  const double num_d = sec * t * (1.0 + t) + sec * sec2 + (2.0 * t - 1.0) * sec2;
  const double den = (1.0 + t) * (1.0 + t);
  const double den_d = 2.0 * (1.0 + t) * sec2;
  return geom.delta_l0 * (num_d * den - num * den_d) / (den * den);
}

double fringe_intensity(const InterferometerGeometry& geom, double alpha, double phi,
                        double amplitude) {
  const double delta = lateral_offset(geom, alpha);
  const double s2 = geom.sigma * geom.sigma;
  return kPi * amplitude * amplitude * s2 *
         (1.0 + std::exp(-delta * delta / (2.0 * s2)) * std::cos(phi));
}

double visibility(const InterferometerGeometry& geom, double alpha) {
  check_angle(alpha);
  const double t = std::tan(alpha);
  const double x = geom.delta_l0 * t / (std::sqrt(2.0) * geom.sigma * (1.0 + t));
  return geom.v0 * std::exp(-x * x);
}

double visibility_from_fringes(const InterferometerGeometry& geom, double alpha,
                               int phase_points) {
  if (phase_points < 2) throw DomainError("need at least two phase samples");
  double lo = fringe_intensity(geom, alpha, 0.0, 1.0);
  double hi = lo;
  for (int k = 1; k < phase_points; ++k) {
    const double v = fringe_intensity(geom, alpha, 2.0 * kPi * k / phase_points, 1.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return geom.v0 * (hi - lo) / (hi + lo);
}

double wrap_phase(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

Phase phase(const InterferometerGeometry& geom, double alpha) {
  const double unwrapped = 2.0 * kPi * path_difference(geom, alpha) / geom.wavelength;
  return {unwrapped, wrap_phase(unwrapped)};
}

double phase_shift(const InterferometerGeometry& geom, double alpha_from, double alpha_to) {
  const double dl = path_difference_excess(geom, alpha_to) - path_difference_excess(geom, alpha_from);
  return 2.0 * kPi * dl / geom.wavelength;
}

double aoi_per_pi(const InterferometerGeometry& geom, double alpha) {
  return geom.wavelength / (2.0 * std::abs(path_difference_slope(geom, alpha)));
}

double aoi_for_phase(const InterferometerGeometry& geom, double target, double alpha, int sign) {
  geom.validate();
  if (!(target > 0.0)) throw InvalidArgument("target phase must be positive");
  const double dir = sign < 0 ? -1.0 : 1.0;
  auto reached = [&](double d) { return std::abs(phase_shift(geom, alpha, alpha + dir * d)) >= target; };
  double hi = 0.5 * aoi_per_pi(geom, alpha) * target / kPi;
  double lo = 0.0;
  while (!reached(hi)) {
    lo = hi;
    hi *= 2.0;
    if (std::abs(alpha) + hi >= 0.25 * kPi) throw DomainError("phase target not reached inside the angle domain");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (reached(mid) ? hi : lo) = mid;
  }
  return hi;
}

double sigma_from_amplitude_std(double amplitude_std) { return std::sqrt(2.0) * amplitude_std; }
double sigma_from_intensity_std(double intensity_std) { return 2.0 * intensity_std; }
double sigma_from_intensity_radius(double radius_1e2) { return radius_1e2; }
double intensity_std_from_sigma(double sigma) { return 0.5 * sigma; }

}  // namespace mmtqa::geometry
