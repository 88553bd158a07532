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


// Scalar paraxial-free wave optics on a square grid. Sample (i, j) sits at
// x = (j - n/2) dx, y = (i - n/2) dx with dx = extent / n; storage is
// row-major in y.

#ifndef MMTQA_WAVEOPTICS_HPP
#define MMTQA_WAVEOPTICS_HPP

#include <complex>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mmtqa/geometry.hpp"

namespace mmtqa::waveoptics {

using Complex = std::complex<double>;

struct ScalarField {
  std::size_t n = 0;
  double extent = 0.0;      ///< side length [m]
  double wavelength = 0.0;  ///< [m]
  std::vector<Complex> data;

  double dx() const { return extent / static_cast<double>(n); }
  double coordinate(std::size_t i) const {
    return (static_cast<double>(i) - static_cast<double>(n / 2)) * dx();
  }
  Complex& at(std::size_t iy, std::size_t ix) { return data[iy * n + ix]; }
  const Complex& at(std::size_t iy, std::size_t ix) const { return data[iy * n + ix]; }

  /// sum |E|^2 dx^2
  double power() const;
  /// Throws InvalidArgument unless n >= 64 is a power of two, extent and
  /// wavelength are positive and the data size matches.
  void validate() const;
};

/// sum conj(a) b dx^2. Grids must match.
Complex inner_product(const ScalarField& a, const ScalarField& b);

/// Unit-power E ~ exp(-r^2 / sigma^2) (sigma as in geometry.hpp).
/// Throws InvalidArgument if extent < 12 sigma and GridResolutionError if
/// sigma spans fewer than 3 cells.
ScalarField make_gaussian(double sigma, std::size_t grid_n, double extent, double wavelength);

struct SpeckleOptions {
  double basis_waist = 0.5e-3;  ///< waist of the Hermite-Gauss basis [m]
};

/// Unit-power superposition of the first `mode_count` Hermite-Gauss modes,
/// ordered by m + n then m, with complex-normal coefficients drawn from
/// mt19937_64(seed). Throws GridResolutionError when the finest lobe of the
/// highest mode spans fewer than 3 cells.
ScalarField make_speckle(std::size_t mode_count, std::uint64_t seed, std::size_t grid_n, double extent,
                         double wavelength, const SpeckleOptions& opt = {});

/// Translates by `shift` along x (spectral phase ramp) and applies the tilt
/// exp(i 2 pi sin(alpha) x / lambda). Throws ShiftTooLargeError if
/// |shift| >= extent / 4.
ScalarField shift_and_tilt(const ScalarField& field, double shift, double alpha);

/// Angular-spectrum propagation over `distance`, omitting the global phase
/// exp(i 2 pi distance / lambda); evanescent components are dropped. Throws
/// AliasingError when the spectrum exceeds the grid's band limit for this
/// distance or the result reaches the grid boundary.
ScalarField propagate(const ScalarField& field, double distance);

/// v0 |<Es|El>| / ((|Es|^2 + |El|^2) / 2): the short arm carries the tilted
/// input, the long arm additionally propagates over delta_l0 unless the
/// relay images it back onto itself.
double interfere(const ScalarField& field, const geometry::InterferometerGeometry& geom, double alpha,
                 bool relay);

/// Default grid: 512 points over 16 sigma.
inline constexpr std::size_t kDefaultGrid = 512;
inline constexpr double kDefaultExtentSigmas = 16.0;

/// Columns x, y, magnitude, phase; every `stride`-th sample per axis.
void write_field_csv(std::ostream& out, const ScalarField& f,
                     const std::vector<std::pair<std::string, std::string>>& meta,
                     std::size_t stride = 1);

}  // namespace mmtqa::waveoptics

#endif  // MMTQA_WAVEOPTICS_HPP
