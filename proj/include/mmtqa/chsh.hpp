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


#ifndef MMTQA_CHSH_HPP
#define MMTQA_CHSH_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "mmtqa/measurement.hpp"
#include "mmtqa/quantum.hpp"
#include "mmtqa/states.hpp"

namespace mmtqa::chsh {

using quantum::DensityMatrix;
using quantum::Matrix;

/// Coincidences for one setting pair (A_i, B_j); first sign is Alice's.
struct JointCounts {
  double pp = 0, pm = 0, mp = 0, mm = 0;

  double total() const { return pp + pm + mp + mm; }
};

/// Counts for the four setting pairs, indexed [i-1][j-1].
struct CountTable {
  std::array<std::array<JointCounts, 2>, 2> n{};

  JointCounts& at(int i, int j);
  const JointCounts& at(int i, int j) const;
};

/// (N++ + N-- - N+- - N-+) / N. Throws ZeroDenominatorError when N = 0 and
/// InvalidArgument on negative counts.
double expectation_from_counts(const JointCounts& c);
double expectation_from_counts(const CountTable& t, int i, int j);

/// |E11 - E12 + E21 + E22|.
double chsh_s(double e11, double e12, double e21, double e22);

/// sqrt(2) (v_z + v_xy).
double s_theo(const states::VisibilityPair& v);

/// sqrt(e1^2 + e2^2).
double combined_expectation(double e1, double e2);

/// Alice settings: A1 = (sz + sx)/sqrt2, A2 = (sz - sx)/sqrt2, as angles of
/// cos(theta) sz + sin(theta) sx.
inline constexpr double kThetaA1 = 0.78539816339744830962;
inline constexpr double kThetaA2 = -0.78539816339744830962;

/// Correlators <A_i (x) B_j> with B1 = sz, B2 = -sx on a 2x2 state.
std::array<double, 4> ideal_correlators(const DensityMatrix& rho);

enum class DriftKind { kLinear, kSinusoidal };

/// Analyzer phase phi(t).
///   linear:     phi0 + 2 pi t / period
///   sinusoidal: phi0 + amplitude sin(2 pi t / period)
struct DriftModel {
  DriftKind kind = DriftKind::kLinear;
  double phase0 = 0.0;
  double period = 4.0;
  double amplitude = 3.14159265358979323846;

  double phase(double t) const;
  void validate() const;
};

struct ScanConfig {
  double rate = 1000.0;     ///< detected coincidences per second over all six traces
  double duration = 4.0;    ///< s
  double bucket = 0.5;      ///< s
  std::uint64_t seed = 0;
  bool noiseless = false;   ///< expected counts instead of Poisson draws
  DriftModel drift{};

  void validate() const;
  std::size_t buckets() const;
};

/// Bob's time-bin analyzer as a function of the interferometer phase.
using BobModel = std::function<measurement::TimeBinMeasurement(double)>;

/// Six coincidence traces: Alice detector D1/D2 (+/- of her setting) times
/// the early, late and middle arrival bins. Bucket k starts at time[k] and
/// its rates are evaluated at phase[k] = phi(time[k]).
struct DriftTrace {
  std::vector<double> time;
  std::vector<double> phase;
  std::array<std::vector<double>, 2> early;
  std::array<std::vector<double>, 2> late;
  std::array<std::vector<double>, 2> middle;
  double bucket = 0.0;

  std::size_t size() const { return time.size(); }
};

/// Generates the traces for Alice's setting `theta`.
DriftTrace simulate_drift_scan(const DensityMatrix& rho, double theta, const BobModel& bob,
                               const ScanConfig& cfg);

/// Ideal analyzer on a 2x2 state.
DriftTrace simulate_drift_scan(const DensityMatrix& rho, double theta, const ScanConfig& cfg);

/// E(t1, t2) from the middle-bin counts of the two buckets:
///   (D1(t1) + D2(t2) - D1(t2) - D2(t1)) / sum.
struct ExpectationSurface {
  std::size_t n = 0;
  std::vector<double> value;          ///< row-major [t1][t2]; NaN where undefined
  std::vector<std::uint8_t> defined;
  std::size_t arg_t1 = 0;
  std::size_t arg_t2 = 0;
  double max_abs = 0.0;
  double at_max = 0.0;                ///< signed value at the argmax

  double operator()(std::size_t i, std::size_t j) const { return value[i * n + j]; }
};

/// Throws InvalidArgument on an empty trace and ZeroDenominatorError when no
/// cell is defined.
ExpectationSurface max_expectation_surface(const DriftTrace& trace, int jobs = 1);

/// B1 = sz correlator pooled over the whole trace.
double z_expectation(const DriftTrace& trace);

/// Same, per bucket; nullopt for empty buckets.
std::vector<std::optional<double>> z_expectation_series(const DriftTrace& trace);

struct ChshEstimate {
  double e11 = 0, e12 = 0, e21 = 0, e22 = 0;
  double s = 0.0;
};

/// Combines the traces of Alice's two settings. The middle-bin surface only
/// fixes |E(A_i, B2)|; the relative sign is chosen to maximize S, which is
/// attainable because the surface is antisymmetric.
ChshEstimate estimate_chsh(const DriftTrace& a1, const DriftTrace& a2, int jobs = 1);

struct ChshRun {
  DriftTrace a1;
  DriftTrace a2;
  ChshEstimate estimate;
};

/// Full simulation at both of Alice's settings with independent streams.
ChshRun run_chsh(const DensityMatrix& rho, const ScanConfig& cfg, int jobs = 1);

void write_trace_csv(std::ostream& out, const DriftTrace& trace,
                     const std::vector<std::pair<std::string, std::string>>& meta);

/// Columns t1, t2, E, defined.
void write_surface_csv(std::ostream& out, const DriftTrace& trace, const ExpectationSurface& s,
                       const std::vector<std::pair<std::string, std::string>>& meta);

}  // namespace mmtqa::chsh

#endif  // MMTQA_CHSH_HPP
