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


#include "mmtqa/waveoptics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "mmtqa/errors.hpp"
#include "mmtqa/io.hpp"

namespace mmtqa::waveoptics {

namespace {

constexpr double kPi = std::numbers::pi;

// Planning is not thread-safe in FFTW; execution on fresh arrays is.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans p;
    return p;
  }

  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<Complex> scratch(n * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw Error("FFTW planning failed");
    plans_.emplace(key, p);
    return p;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mu_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void fft(std::vector<Complex>& data, std::size_t n, int sign) {
  fftw_plan p = FftPlans::instance().get(n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(p, buf, buf);
  if (sign == FFTW_BACKWARD) {
    const double scale = 1.0 / static_cast<double>(n * n);
    for (auto& v : data) v *= scale;
  }
}

double frequency(std::size_t k, std::size_t n, double extent) {
  const auto kk = static_cast<double>(k);
  return (k < n / 2 ? kk : kk - static_cast<double>(n)) / extent;
}

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

ScalarField blank(std::size_t n, double extent, double wavelength) {
  ScalarField f;
  f.n = n;
  f.extent = extent;
  f.wavelength = wavelength;
  f.data.assign(n * n, Complex(0.0, 0.0));
  return f;
}

void check_grid(std::size_t n, double extent, double wavelength) {
  if (n < 64 || !power_of_two(n)) throw InvalidArgument("grid size must be a power of two >= 64");
  if (!(extent > 0.0) || !std::isfinite(extent)) throw InvalidArgument("extent must be positive");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw InvalidArgument("wavelength must be positive");
}

void normalize(ScalarField& f) {
  const double p = f.power();
  if (!(p > 0.0)) throw InvalidArgument("field has zero power");
  const double s = 1.0 / std::sqrt(p);
  for (auto& v : f.data) v *= s;
}

// Normalized Hermite functions psi_0..psi_m at xi.
void hermite_functions(double xi, std::size_t m, std::vector<double>& out) {
  out.assign(m + 1, 0.0);
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * xi * xi);
  if (m >= 1) out[1] = std::sqrt(2.0) * xi * out[0];
  for (std::size_t k = 1; k < m; ++k) {
    const auto kd = static_cast<double>(k);
    out[k + 1] = std::sqrt(2.0 / (kd + 1.0)) * xi * out[k] - std::sqrt(kd / (kd + 1.0)) * out[k - 1];
  }
}

double border_fraction(const ScalarField& f) {
  const std::size_t band = std::max<std::size_t>(1, f.n / 32);
  double edge = 0.0, total = 0.0;
  for (std::size_t iy = 0; iy < f.n; ++iy) {
    for (std::size_t ix = 0; ix < f.n; ++ix) {
      const double p = std::norm(f.at(iy, ix));
      total += p;
      if (iy < band || ix < band || iy >= f.n - band || ix >= f.n - band) edge += p;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

}  // namespace

double ScalarField::power() const {
  double acc = 0.0;
  for (const auto& v : data) acc += std::norm(v);
  return acc * dx() * dx();
}

void ScalarField::validate() const {
  check_grid(n, extent, wavelength);
  if (data.size() != n * n) throw DimensionMismatch("field data does not match the grid size");
}

Complex inner_product(const ScalarField& a, const ScalarField& b) {
  if (a.n != b.n || a.extent != b.extent) throw DimensionMismatch("fields live on different grids");
  Complex acc(0.0, 0.0);
  for (std::size_t k = 0; k < a.data.size(); ++k) acc += std::conj(a.data[k]) * b.data[k];
  return acc * a.dx() * a.dx();
}

ScalarField make_gaussian(double sigma, std::size_t grid_n, double extent, double wavelength) {
  check_grid(grid_n, extent, wavelength);
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (extent < 12.0 * sigma) throw InvalidArgument("extent must be at least 12 sigma");
  ScalarField f = blank(grid_n, extent, wavelength);
  if (sigma < 3.0 * f.dx()) throw GridResolutionError("sigma spans fewer than 3 grid cells");
  std::vector<double> g(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i) {
    const double x = f.coordinate(i);
    g[i] = std::exp(-x * x / (sigma * sigma));
  }
  for (std::size_t iy = 0; iy < grid_n; ++iy)
    for (std::size_t ix = 0; ix < grid_n; ++ix) f.at(iy, ix) = g[iy] * g[ix];
  normalize(f);
  return f;
}

ScalarField make_speckle(std::size_t mode_count, std::uint64_t seed, std::size_t grid_n, double extent,
                         double wavelength, const SpeckleOptions& opt) {
  check_grid(grid_n, extent, wavelength);
  if (mode_count < 1) throw InvalidArgument("mode_count must be at least 1");
  const double w = opt.basis_waist;
  if (!(w > 0.0)) throw InvalidArgument("basis waist must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> modes;
  for (std::size_t order = 0; modes.size() < mode_count; ++order)
    for (std::size_t m = 0; m <= order && modes.size() < mode_count; ++m) modes.emplace_back(m, order - m);
  std::size_t top = 0;
  for (auto [m, n] : modes) top = std::max({top, m, n});

  ScalarField f = blank(grid_n, extent, wavelength);
  const double lobe = kPi * w / (std::sqrt(2.0) * std::sqrt(2.0 * static_cast<double>(top) + 1.0));
  if (lobe < 3.0 * f.dx()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "order-%zu lobes span %.2f cells; need at least 3", top, lobe / f.dx());
    throw GridResolutionError(buf);
  }
  // Turning point of the highest mode must sit well inside the grid.
  if (w * std::sqrt(2.0 * static_cast<double>(top) + 1.0) / std::sqrt(2.0) * 2.0 > 0.5 * extent) {
    throw InvalidArgument("highest speckle mode does not fit the grid extent");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<Complex> coef(modes.size());
  for (auto& c : coef) {
    const double re = normal(rng);
    const double im = normal(rng);
    c = Complex(re, im);
  }

  // psi tables per axis; xi = sqrt(2) x / w gives psi_0 ~ exp(-x^2 / w^2).
  std::vector<std::vector<double>> table(grid_n);
  for (std::size_t i = 0; i < grid_n; ++i)
    hermite_functions(std::sqrt(2.0) * f.coordinate(i) / w, top, table[i]);
  for (std::size_t iy = 0; iy < grid_n; ++iy) {
    for (std::size_t ix = 0; ix < grid_n; ++ix) {
      Complex acc(0.0, 0.0);
      for (std::size_t k = 0; k < modes.size(); ++k)
        acc += coef[k] * (table[ix][modes[k].first] * table[iy][modes[k].second]);
      f.at(iy, ix) = acc;
    }
  }
  normalize(f);
  return f;
}

ScalarField shift_and_tilt(const ScalarField& field, double shift, double alpha) {
  field.validate();
  if (!(std::abs(shift) < 0.25 * field.extent)) {
    throw ShiftTooLargeError("shift must stay below a quarter of the grid extent");
  }
  if (!(std::abs(alpha) < 0.5 * kPi)) throw DomainError("tilt angle must lie in (-pi/2, pi/2)");
  ScalarField out = field;
  const std::size_t n = field.n;
  if (shift != 0.0) {
    fft(out.data, n, FFTW_FORWARD);
    std::vector<Complex> ramp(n);
    for (std::size_t k = 0; k < n; ++k) {
      // Nyquist bin has no unique sign; leave its phase alone.
      ramp[k] = (k == n / 2) ? Complex(1.0, 0.0)
                             : std::polar(1.0, -2.0 * kPi * frequency(k, n, field.extent) * shift);
    }
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) out.at(iy, ix) *= ramp[ix];
    fft(out.data, n, FFTW_BACKWARD);
  }
  if (alpha != 0.0) {
    const double kx = 2.0 * kPi * std::sin(alpha) / field.wavelength;
    std::vector<Complex> tilt(n);
    for (std::size_t ix = 0; ix < n; ++ix) tilt[ix] = std::polar(1.0, kx * field.coordinate(ix));
    for (std::size_t iy = 0; iy < n; ++iy)
      for (std::size_t ix = 0; ix < n; ++ix) out.at(iy, ix) *= tilt[ix];
  }
  return out;
}

ScalarField propagate(const ScalarField& field, double distance) {
  field.validate();
  if (!std::isfinite(distance)) throw InvalidArgument("distance must be finite");
  if (distance == 0.0) return field;
  const std::size_t n = field.n;
  const double lam = field.wavelength;
  const double inv = 1.0 / lam;
  // Band limit beyond which the sampled transfer function aliases.
  const double ratio = 2.0 * std::abs(distance) / field.extent;
  const double u_lim = 1.0 / (lam * std::sqrt(ratio * ratio + 1.0));

  ScalarField out = field;
  fft(out.data, n, FFTW_FORWARD);
  double total = 0.0, outside = 0.0, f_needed = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double fy = frequency(iy, n, field.extent);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double fx = frequency(ix, n, field.extent);
      const double p = std::norm(out.at(iy, ix));
      total += p;
      if (std::abs(fx) > u_lim || std::abs(fy) > u_lim) {
        outside += p;
        f_needed = std::max({f_needed, std::abs(fx), std::abs(fy)});
      }
    }
  }
  if (total > 0.0 && outside / total > 1e-10) {
    const double s = std::min(lam * f_needed, 0.999999);
    const double needed = 2.0 * std::abs(distance) * s / std::sqrt(1.0 - s * s);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "angular spectrum exceeds the band limit for %.4g m (fraction %.3e); "
                  "grid extent must be at least %.4g m at this sampling",
                  distance, outside / total, needed);
    throw AliasingError(buf);
  }
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double fy = frequency(iy, n, field.extent);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double fx = frequency(ix, n, field.extent);
      const double f2 = fx * fx + fy * fy;
      if (f2 >= inv * inv) {
        out.at(iy, ix) = 0.0;
        continue;
      }
      // kz - k written without cancellation.
      const double dk = -2.0 * kPi * f2 / (std::sqrt(inv * inv - f2) + inv);
      out.at(iy, ix) *= std::polar(1.0, dk * distance);
    }
  }
  fft(out.data, n, FFTW_BACKWARD);
  const double edge = border_fraction(out);
  if (edge > 1e-8) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "propagated field reaches the grid boundary (edge power fraction %.3e); "
                  "increase the extent beyond %.4g m",
                  edge, field.extent);
    throw AliasingError(buf);
  }
  return out;
}

double interfere(const ScalarField& field, const geometry::InterferometerGeometry& geom, double alpha,
                 bool relay) {
  geom.validate();
  field.validate();
  if (!(field.power() > 0.0)) throw InvalidArgument("field has zero power");
  const ScalarField es = shift_and_tilt(field, 0.0, alpha);
  const ScalarField el = relay ? es : propagate(es, geom.delta_l0);
  const double denom = 0.5 * (es.power() + el.power());
  return geom.v0 * std::abs(inner_product(es, el)) / denom;
}

void write_field_csv(std::ostream& out, const ScalarField& f,
                     const std::vector<std::pair<std::string, std::string>>& meta, std::size_t stride) {
  f.validate();
  if (stride == 0) throw InvalidArgument("stride must be positive");
  io::CsvWriter w(out, meta, {"x", "y", "magnitude", "phase"});
  for (std::size_t iy = 0; iy < f.n; iy += stride)
    for (std::size_t ix = 0; ix < f.n; ix += stride)
      w.row({f.coordinate(ix), f.coordinate(iy), std::abs(f.at(iy, ix)), std::arg(f.at(iy, ix))});
}

}  // namespace mmtqa::waveoptics
