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


#ifndef MMTQA_ANALYSIS_HPP
#define MMTQA_ANALYSIS_HPP

#include <cstdint>
#include <vector>

#include "mmtqa/chsh.hpp"
#include "mmtqa/geometry.hpp"
#include "mmtqa/states.hpp"
#include "mmtqa/waveoptics.hpp"

namespace mmtqa::analysis {

enum class FieldKind { kGaussian, kSpeckle };

struct FieldSpec {
  FieldKind kind = FieldKind::kGaussian;
  std::size_t grid_n = waveoptics::kDefaultGrid;
  double extent = 0.0;            ///< 0 selects 16 sigma
  std::size_t mode_count = 50;    ///< speckle only
  std::uint64_t seed = 0;         ///< speckle only
  double basis_waist = 0.5e-3;    ///< speckle only
};

waveoptics::ScalarField make_field(const geometry::InterferometerGeometry& geom, const FieldSpec& spec);

/// Raised-cosine surrogate for the photon-collection falloff with AOI:
/// peak (1 + cos(pi alpha / cutoff)) / 2 inside |alpha| < cutoff, else 0.
/// Applies to rates only.
inline constexpr double kCollectionCutoff = 0.24 * 3.14159265358979323846 / 180.0;
double collection_efficiency(double alpha, double peak = 1.0, double cutoff = kCollectionCutoff);

struct AoiPoint {
  double alpha = 0.0;
  double visibility = 0.0;
  double collection = 0.0;
};

/// waveoptics::interfere at every angle; output order follows `alphas`.
std::vector<AoiPoint> aoi_sweep(const geometry::InterferometerGeometry& geom, const FieldSpec& spec,
                                const std::vector<double>& alphas, bool relay, int jobs = 1);

struct ExpectationPoint {
  double alpha = 0.0;
  double expectation = 0.0;
};

/// relay: v_xy cos(phase_fixed) at every angle. No relay:
/// (V(alpha) / v0) v_xy cos(dphi(0 -> alpha) + phase_fixed), i.e. phase_fixed is
/// the analyzer phase at normal incidence.
std::vector<ExpectationPoint> expectation_vs_aoi(const geometry::InterferometerGeometry& geom, double v_xy,
                                                 const std::vector<double>& alphas, bool relay,
                                                 double phase_fixed = 0.0);

struct EntanglementPoint {
  double alpha = 0.0;
  double v_z = 0.0;
  double v_xy = 0.0;
};

/// Early/late bins do not interfere, so only v_xy follows the spatial
/// overlap V(alpha) / v0 when the relay is absent.
std::vector<EntanglementPoint> entanglement_visibility_vs_aoi(const geometry::InterferometerGeometry& geom,
                                                              const states::VisibilityPair& v,
                                                              const std::vector<double>& alphas, bool relay);

struct StabilityOptions {
  double duration = 1800.0;   ///< s
  double bucket = 180.0;      ///< s
  chsh::DriftModel drift{chsh::DriftKind::kLinear, 0.0, 7200.0, 0.0};
  bool poisson = false;
  double rate = 50.0;         ///< coincidences per second per setting
  std::uint64_t seed = 0;

  void validate() const;
};

struct StabilityPoint {
  double t = 0.0;
  double phase = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double combined = 0.0;
};

/// E1 = v_xy cos phi(t), E2 = v_xy sin phi(t) for the two quadrature settings,
/// or their estimates from Poisson counts.
std::vector<StabilityPoint> stability_series(double v_xy, const StabilityOptions& opt);

/// Evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace mmtqa::analysis

#endif  // MMTQA_ANALYSIS_HPP
