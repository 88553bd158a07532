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


#include "mmtqa/analysis.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include "mmtqa/errors.hpp"

namespace mmtqa::analysis {

namespace {
constexpr double kPi = std::numbers::pi;
}

waveoptics::ScalarField make_field(const geometry::InterferometerGeometry& geom, const FieldSpec& spec) {
  geom.validate();
  const double extent = spec.extent > 0.0 ? spec.extent : waveoptics::kDefaultExtentSigmas * geom.sigma;
  if (spec.kind == FieldKind::kGaussian) {
    return waveoptics::make_gaussian(geom.sigma, spec.grid_n, extent, geom.wavelength);
  }
  waveoptics::SpeckleOptions so;
  so.basis_waist = spec.basis_waist;
  return waveoptics::make_speckle(spec.mode_count, spec.seed, spec.grid_n, extent, geom.wavelength, so);
}

double collection_efficiency(double alpha, double peak, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("collection cutoff must be positive");
  if (!(peak >= 0.0 && peak <= 1.0)) throw InvalidArgument("collection peak must lie in [0, 1]");
  if (std::abs(alpha) >= cutoff) return 0.0;
  return peak * 0.5 * (1.0 + std::cos(kPi * alpha / cutoff));
}

std::vector<AoiPoint> aoi_sweep(const geometry::InterferometerGeometry& geom, const FieldSpec& spec,
                                const std::vector<double>& alphas, bool relay, int jobs) {
  const waveoptics::ScalarField field = make_field(geom, spec);
  std::vector<AoiPoint> out(alphas.size());
  auto eval = [&](std::size_t i) {
    out[i].alpha = alphas[i];
    out[i].visibility = waveoptics::interfere(field, geom, alphas[i], relay);
    out[i].collection = collection_efficiency(alphas[i]);
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), alphas.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < alphas.size(); ++i) eval(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(alphas.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < alphas.size(); i = next++) {
        try {
          eval(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<ExpectationPoint> expectation_vs_aoi(const geometry::InterferometerGeometry& geom, double v_xy,
                                                 const std::vector<double>& alphas, bool relay,
                                                 double phase_fixed) {
  geom.validate();
  if (!(std::abs(v_xy) <= 1.0)) throw InvalidArgument("v_xy must lie in [-1, 1]");
  std::vector<ExpectationPoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    double e;
    if (relay) {
      e = v_xy * std::cos(phase_fixed);
    } else {
      const double overlap = geometry::visibility(geom, a) / geom.v0;
      e = overlap * v_xy * std::cos(geometry::phase_shift(geom, 0.0, a) + phase_fixed);
    }
    out.push_back({a, e});
  }
  return out;
}

std::vector<EntanglementPoint> entanglement_visibility_vs_aoi(const geometry::InterferometerGeometry& geom,
                                                              const states::VisibilityPair& v,
                                                              const std::vector<double>& alphas, bool relay) {
  geom.validate();
  v.validate();
  std::vector<EntanglementPoint> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    const double overlap = relay ? 1.0 : geometry::visibility(geom, a) / geom.v0;
    out.push_back({a, v.v_z, v.v_xy * overlap});
  }
  return out;
}

void StabilityOptions::validate() const {
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");
  if (!(bucket > 0.0) || bucket > duration) throw InvalidArgument("bucket must lie in (0, duration]");
  if (poisson && !(rate > 0.0)) throw InvalidArgument("rate must be positive");
  drift.validate();
}

std::vector<StabilityPoint> stability_series(double v_xy, const StabilityOptions& opt) {
  opt.validate();
  if (!(std::abs(v_xy) <= 1.0)) throw InvalidArgument("v_xy must lie in [-1, 1]");
  const auto n = static_cast<std::size_t>(std::floor(opt.duration / opt.bucket + 1e-9));
  std::mt19937_64 rng(opt.seed);
  auto estimate = [&](double e) {
    const double lam = opt.rate * opt.bucket;
    std::poisson_distribution<long long> plus(lam * 0.5 * (1.0 + e));
    std::poisson_distribution<long long> minus(lam * 0.5 * (1.0 - e));
    const auto np = static_cast<double>(plus(rng));
    const auto nm = static_cast<double>(minus(rng));
    if (np + nm <= 0.0) throw ZeroDenominatorError("empty stability bucket");
    return (np - nm) / (np + nm);
  };
  std::vector<StabilityPoint> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    StabilityPoint& p = out[k];
    p.t = static_cast<double>(k) * opt.bucket;
    p.phase = opt.drift.phase(p.t);
    p.e1 = v_xy * std::cos(p.phase);
    p.e2 = v_xy * std::sin(p.phase);
    if (opt.poisson) {
      p.e1 = estimate(p.e1);
      p.e2 = estimate(p.e2);
    }
    p.combined = chsh::combined_expectation(p.e1, p.e2);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < count; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return v;
}

}  // namespace mmtqa::analysis
