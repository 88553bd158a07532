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


#include "mmtqa/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "mmtqa/errors.hpp"
#include "mmtqa/io.hpp"

namespace mmtqa::chsh {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kStreamOffset = 0x9E3779B97F4A7C15ULL;

void check_index(int i) {
  if (i != 1 && i != 2) throw InvalidArgument("setting index must be 1 or 2");
}

void check_counts(const JointCounts& c) {
  for (double v : {c.pp, c.pm, c.mp, c.mm}) {
    if (!(v >= 0.0)) throw InvalidArgument("coincidence counts must be nonnegative");
  }
}

void check_trace(const DriftTrace& t) {
  const std::size_t n = t.size();
  if (n == 0) throw InvalidArgument("trace is empty");
  for (int d = 0; d < 2; ++d) {
    if (t.early[d].size() != n || t.late[d].size() != n || t.middle[d].size() != n) {
      throw DimensionMismatch("trace series differ in length");
    }
  }
}

}  // namespace

JointCounts& CountTable::at(int i, int j) {
  check_index(i);
  check_index(j);
  return n[i - 1][j - 1];
}

const JointCounts& CountTable::at(int i, int j) const {
  check_index(i);
  check_index(j);
  return n[i - 1][j - 1];
}

double expectation_from_counts(const JointCounts& c) {
  check_counts(c);
  const double total = c.total();
  if (total <= 0.0) throw ZeroDenominatorError("no coincidences for this setting pair");
  return ((c.pp + c.mm) - (c.pm + c.mp)) / total;
}

double expectation_from_counts(const CountTable& t, int i, int j) {
  return expectation_from_counts(t.at(i, j));
}

double chsh_s(double e11, double e12, double e21, double e22) {
  return std::abs(e11 - e12 + e21 + e22);
}

double s_theo(const states::VisibilityPair& v) { return std::sqrt(2.0) * (v.v_z + v.v_xy); }

double combined_expectation(double e1, double e2) { return std::hypot(e1, e2); }

std::array<double, 4> ideal_correlators(const DensityMatrix& rho) {
  if (rho.dim_a() != 2 || rho.dim_b() != 2) throw DimensionMismatch("correlators need a 2x2 state");
  auto alice = [](double theta) {
    return Matrix(std::cos(theta) * quantum::pauli_z() + std::sin(theta) * quantum::pauli_x());
  };
  // B2 is the middle-bin observable at analyzer phase pi, i.e. -sx.
  const Matrix b1 = quantum::pauli_z();
  const Matrix b2 = -quantum::pauli_x();
  const Matrix a1 = alice(kThetaA1), a2 = alice(kThetaA2);
  auto e = [&](const Matrix& a, const Matrix& b) {
    return quantum::expectation(rho.matrix(), quantum::kron(a, b));
  };
  return {e(a1, b1), e(a1, b2), e(a2, b1), e(a2, b2)};
}

double DriftModel::phase(double t) const {
  const double w = 2.0 * kPi / period;
  return kind == DriftKind::kLinear ? phase0 + w * t : phase0 + amplitude * std::sin(w * t);
}

void DriftModel::validate() const {
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("drift period must be positive");
  if (!std::isfinite(phase0) || !std::isfinite(amplitude)) throw InvalidArgument("drift parameters must be finite");
}

void ScanConfig::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("rate must be positive");
  if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("duration must be positive");
  if (!(bucket > 0.0) || bucket > duration) throw InvalidArgument("bucket must lie in (0, duration]");
  drift.validate();
}

std::size_t ScanConfig::buckets() const {
  return static_cast<std::size_t>(std::floor(duration / bucket + 1e-9));
}

DriftTrace simulate_drift_scan(const DensityMatrix& rho, double theta, const BobModel& bob,
                               const ScanConfig& cfg) {
  cfg.validate();
  const std::array<Matrix, 2> alice = {measurement::alice_xz_projector(theta, +1),
                                       measurement::alice_xz_projector(theta, -1)};
  const std::size_t n = cfg.buckets();
  DriftTrace tr;
  tr.bucket = cfg.bucket;
  tr.time.resize(n);
  tr.phase.resize(n);
  for (int d = 0; d < 2; ++d) {
    tr.early[d].resize(n);
    tr.late[d].resize(n);
    tr.middle[d].resize(n);
  }
  std::mt19937_64 rng(cfg.seed);
  const double mean_counts = cfg.rate * cfg.bucket;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.bucket;
    const double phi = cfg.drift.phase(t);
    const auto m = bob(phi);
    if (m.dim() != rho.dim_b() || rho.dim_a() != 2) {
      throw DimensionMismatch("analyzer dimension does not match the state");
    }
    std::array<std::array<double, 3>, 2> p{};
    double total = 0.0;
    for (int d = 0; d < 2; ++d) {
      const Matrix* ops[3] = {&m.early, &m.late, &m.middle};
      for (int b = 0; b < 3; ++b) {
        p[d][b] = std::max(0.0, quantum::expectation(rho.matrix(), quantum::kron(alice[d], *ops[b])));
        total += p[d][b];
      }
    }
    if (total <= 0.0) throw ZeroDenominatorError("state produces no coincidences");
    tr.time[k] = t;
    tr.phase[k] = phi;
    for (int d = 0; d < 2; ++d) {
      std::array<double, 3> lam{};
      for (int b = 0; b < 3; ++b) lam[b] = mean_counts * p[d][b] / total;
      if (!cfg.noiseless) {
        for (int b = 0; b < 3; ++b) {
          if (lam[b] > 0.0) {
            std::poisson_distribution<long long> pois(lam[b]);
            lam[b] = static_cast<double>(pois(rng));
          }
        }
      }
      tr.early[d][k] = lam[0];
      tr.late[d][k] = lam[1];
      tr.middle[d][k] = lam[2];
    }
  }
  return tr;
}

DriftTrace simulate_drift_scan(const DensityMatrix& rho, double theta, const ScanConfig& cfg) {
  return simulate_drift_scan(
      rho, theta, [](double phi) { return measurement::ideal_timebin_measurement(phi); }, cfg);
}

ExpectationSurface max_expectation_surface(const DriftTrace& trace, int jobs) {
  check_trace(trace);
  const std::size_t n = trace.size();
  ExpectationSurface s;
  s.n = n;
  s.value.assign(n * n, std::numeric_limits<double>::quiet_NaN());
  s.defined.assign(n * n, 0);
  const auto& d1 = trace.middle[0];
  const auto& d2 = trace.middle[1];
  auto fill_rows = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double den = d1[i] + d2[j] + d1[j] + d2[i];
        if (den <= 0.0) continue;
        s.value[i * n + j] = (d1[i] + d2[j] - d1[j] - d2[i]) / den;
        s.defined[i * n + j] = 1;
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, n);
  if (workers == 1) {
    fill_rows(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(fill_rows, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  bool any = false;
  for (std::size_t c = 0; c < n * n; ++c) {
    if (!s.defined[c]) continue;
    const double a = std::abs(s.value[c]);
    if (!any || a > s.max_abs) {
      any = true;
      s.max_abs = a;
      s.at_max = s.value[c];
      s.arg_t1 = c / n;
      s.arg_t2 = c % n;
    }
  }
  if (!any) throw ZeroDenominatorError("no middle-bin coincidences in the trace");
  return s;
}

double z_expectation(const DriftTrace& trace) {
  check_trace(trace);
  JointCounts c;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    c.pp += trace.early[0][k];
    c.mm += trace.late[1][k];
    c.pm += trace.late[0][k];
    c.mp += trace.early[1][k];
  }
  return expectation_from_counts(c);
}

std::vector<std::optional<double>> z_expectation_series(const DriftTrace& trace) {
  check_trace(trace);
  std::vector<std::optional<double>> out(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    JointCounts c{trace.early[0][k], trace.late[0][k], trace.early[1][k], trace.late[1][k]};
    if (c.total() > 0.0) out[k] = expectation_from_counts(c);
  }
  return out;
}

ChshEstimate estimate_chsh(const DriftTrace& a1, const DriftTrace& a2, int jobs) {
  ChshEstimate e;
  e.e11 = z_expectation(a1);
  e.e21 = z_expectation(a2);
  const double m1 = max_expectation_surface(a1, jobs).max_abs;
  const double m2 = max_expectation_surface(a2, jobs).max_abs;
  // For B2 the two settings correlate with opposite signs.
  double best = -1.0;
  for (double sgn : {1.0, -1.0}) {
    const double e12 = -sgn * m1, e22 = sgn * m2;
    const double s = chsh_s(e.e11, e12, e.e21, e22);
    if (s > best) {
      best = s;
      e.e12 = e12;
      e.e22 = e22;
    }
  }
  e.s = best;
  return e;
}

ChshRun run_chsh(const DensityMatrix& rho, const ScanConfig& cfg, int jobs) {
  ScanConfig c2 = cfg;
  c2.seed = cfg.seed + kStreamOffset;
  ChshRun r;
  r.a1 = simulate_drift_scan(rho, kThetaA1, cfg);
  r.a2 = simulate_drift_scan(rho, kThetaA2, c2);
  r.estimate = estimate_chsh(r.a1, r.a2, jobs);
  return r;
}

void write_trace_csv(std::ostream& out, const DriftTrace& trace,
                     const std::vector<std::pair<std::string, std::string>>& meta) {
  check_trace(trace);
  io::CsvWriter w(out, meta,
                  {"t", "phase", "d1_early", "d2_early", "d1_late", "d2_late", "d1_middle", "d2_middle"});
  for (std::size_t k = 0; k < trace.size(); ++k) {
    w.row({trace.time[k], trace.phase[k], trace.early[0][k], trace.early[1][k], trace.late[0][k],
           trace.late[1][k], trace.middle[0][k], trace.middle[1][k]});
  }
}

void write_surface_csv(std::ostream& out, const DriftTrace& trace, const ExpectationSurface& s,
                       const std::vector<std::pair<std::string, std::string>>& meta) {
  if (s.n != trace.size()) throw DimensionMismatch("surface does not match trace");
  io::CsvWriter w(out, meta, {"t1", "t2", "E", "defined"});
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) {
      const bool ok = s.defined[i * s.n + j] != 0;
      w.row({trace.time[i], trace.time[j], ok ? s(i, j) : 0.0, ok ? 1.0 : 0.0});
    }
  }
}

}  // namespace mmtqa::chsh
