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


// Acceptance checks: one PASS/FAIL line per criterion. argv[1] is the
// mmtqa executable used for the reproducibility check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmtqa/analysis.hpp"
#include "mmtqa/chsh.hpp"
#include "mmtqa/geometry.hpp"
#include "mmtqa/measurement.hpp"
#include "mmtqa/quantum.hpp"
#include "mmtqa/states.hpp"
#include "mmtqa/verify.hpp"
#include "mmtqa/waveoptics.hpp"

namespace fs = std::filesystem;
using namespace mmtqa;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

states::DensityMatrix measured_state() {
  return states::depolarize(states::hybrid_bell_state(),
                            states::DepolarizationParams::unbiased(states::kMeasuredPxy, states::kMeasuredPz));
}

Outcome c1_visibility_point() {
  geometry::InterferometerGeometry g;
  const auto t0 = Clock::now();
  double v = 0;
  for (int k = 0; k < 1000; ++k) v += geometry::visibility(g, 1.70e-3);
  v /= 1000.0;
  const double per_call = seconds_since(t0) / 1000.0;
  const bool ok = std::abs(v - 0.70) <= 0.03 && per_call < 1e-3;
  return {ok, "V(1.70 mrad)=" + fmt("%.6f", v) + " target 0.70+-0.03, " + fmt("%.2e", per_call) + " s/call"};
}

Outcome c2_relay_identity() {
  double worst = 0;
  for (double f : {0.05, 0.1, 1.0}) worst = std::max(worst, geometry::relay_matrix(f).identity_residual());
  return {worst <= 1e-12, "max |M - I| entry " + fmt("%.3e", worst)};
}

Outcome c3_wave_ray() {
  geometry::InterferometerGeometry g;
  const auto t0 = Clock::now();
  const auto field = waveoptics::make_gaussian(g.sigma, waveoptics::kDefaultGrid,
                                               waveoptics::kDefaultExtentSigmas * g.sigma, g.wavelength);
  double worst_ray = 0, worst_relay = 0;
  for (double a : {0.0, 0.5e-3, 1.0e-3, 1.5e-3, 2.0e-3}) {
    worst_ray = std::max(worst_ray, std::abs(waveoptics::interfere(field, g, a, false) - geometry::visibility(g, a)));
    worst_relay = std::max(worst_relay, std::abs(waveoptics::interfere(field, g, a, true) - g.v0));
  }
  const double t = seconds_since(t0);
  return {worst_ray <= 1e-2 && worst_relay <= 1e-3 && t < 30.0,
          "max |wave-ray| " + fmt("%.2e", worst_ray) + ", max |relay-V0| " + fmt("%.2e", worst_relay) + ", " +
              fmt("%.2f", t) + " s"};
}

Outcome c4_phase_sensitivity() {
  geometry::InterferometerGeometry g;
  const double per_pi = geometry::aoi_for_phase(g, kPi);
  const double dev = per_pi / 349e-9 - 1.0;
  const double ratio = std::abs(geometry::phase_shift(g, 0.0, 1.75e-6)) / std::abs(geometry::phase_shift(g, 0.0, 349e-9));
  const bool ok = std::abs(dev) <= 0.10 && std::abs(ratio - 5.0) <= 0.05;
  return {ok, "AOI per pi " + fmt("%.2f", per_pi * 1e9) + " nrad (" + fmt("%+.2f", 100 * dev) +
                  " % vs 349 nrad), ratio " + fmt("%.4f", ratio)};
}

Outcome c5_noise_round_trip() {
  const auto rho = measured_state();
  const auto bob = measurement::ideal_timebin_measurement();
  const auto grid = states::uniform_phase_grid(64);
  const double vz = states::visibility_z(rho, bob).v_z;
  const double vxy = states::visibility_xy(rho, bob, grid).v_xy;
  const double s = chsh::s_theo({vz, vxy});
  const bool ok = std::abs(vz - 0.952) <= 1e-6 && std::abs(vxy - 0.804) <= 1e-6 && std::abs(s - 2.4834) < 5e-5 &&
                  std::abs(s - 2.47) <= 0.02;
  return {ok, "V_z=" + fmt("%.9f", vz) + " V_xy=" + fmt("%.9f", vxy) + " S_theo=" + fmt("%.4f", s)};
}

Outcome c6_chsh() {
  const auto rho = measured_state();
  chsh::ScanConfig c;
  c.noiseless = true;
  const auto tr = chsh::simulate_drift_scan(rho, kPi / 2, c);
  const double max_e = chsh::max_expectation_surface(tr).max_abs;
  const auto t0 = Clock::now();
  double sum = 0, sq = 0, lo = 10, hi = -10;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    chsh::ScanConfig p;
    p.seed = static_cast<std::uint64_t>(s);
    const double v = chsh::run_chsh(rho, p).estimate.s;
    sum += v;
    sq += v * v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double t = seconds_since(t0);
  const double mean = sum / seeds;
  const double sd = std::sqrt(std::max(0.0, sq / seeds - mean * mean));
  const bool ok = std::abs(max_e - 0.804) <= 1e-6 && std::abs(mean - 2.42) <= 0.10 && t < 60.0;
  return {ok, "noiseless max|E|=" + fmt("%.9f", max_e) + ", S_exp over 20 seeds " + fmt("%.4f", mean) + " +- " +
                  fmt("%.4f", sd) + " [" + fmt("%.3f", lo) + ", " + fmt("%.3f", hi) + "], " + fmt("%.2f", t) + " s"};
}

Outcome c7_verdicts() {
  double worst_t = 0;
  auto solve = [&](double vz, double vxy) {
    const auto t0 = Clock::now();
    const auto c = verify::build_constraints(vz, vxy, {0.9, 0.9});
    auto r = verify::sdp_feasible(c);
    worst_t = std::max(worst_t, seconds_since(t0));
    return std::make_pair(c, r);
  };
  const auto [c1, r1] = solve(0.952, 0.804);
  bool ok = !r1.feasible() && r1.margin_upper < 0;
  for (auto [vz, vxy] : {std::pair{1.0, 0.0}, std::pair{0.0, 0.0}}) {
    const auto [c, r] = solve(vz, vxy);
    // The witness must itself be a PPT state reproducing the constraints.
    const double e_rho = quantum::min_eigenvalue(r.witness);
    const double e_pt = quantum::min_eigenvalue(quantum::partial_transpose(r.witness, 2, 3));
    ok = ok && r.feasible() && e_rho >= -1e-8 && e_pt >= -1e-8 && c.residual(r.witness) <= 1e-8;
  }
  ok = ok && worst_t < 10.0;
  return {ok, "(0.952,0.804) margin " + fmt("%.4e", r1.margin) + "; (1,0) and (0,0) feasible with witnesses; slowest " +
                  fmt("%.3f", worst_t) + " s"};
}

Outcome c8_boundary() {
  const auto t0 = Clock::now();
  const std::vector<double> grid = analysis::linspace(0.0, 1.0, 6);
  verify::BoundaryOptions opt;
  opt.resolution = 1e-4;
  auto scan = [&](double eta_l, double eta_s) { return verify::boundary_scan(grid, {eta_l, eta_s}, opt); };
  const auto base = scan(0.9, 0.9);
  bool monotone = true;
  for (std::size_t k = 1; k < base.size(); ++k) monotone = monotone && base[k].threshold <= base[k - 1].threshold;
  double worst = 0;
  for (const auto& other : {scan(0.45, 0.45), scan(0.9, 0.45), scan(0.45, 0.9)}) {
    for (std::size_t k = 0; k < base.size(); ++k) worst = std::max(worst, std::abs(other[k].threshold - base[k].threshold));
  }
  // Swap check on its own pair as well as against the balanced curve.
  const auto a = scan(0.9, 0.45), b = scan(0.45, 0.9);
  double swap = 0;
  for (std::size_t k = 0; k < a.size(); ++k) swap = std::max(swap, std::abs(a[k].threshold - b[k].threshold));
  const double at_point = verify::boundary_scan({0.952}, {0.9, 0.9}, opt).front().threshold;
  const double t = seconds_since(t0);
  const bool ok = monotone && worst <= 1e-3 && swap <= 1e-3 && 0.804 > at_point && t < 600.0;
  std::string curve;
  for (const auto& p : base) curve += fmt("%.4f ", p.threshold);
  return {ok, "thresholds [" + curve + "] monotone=" + (monotone ? std::string("yes") : "no") +
                  ", loss/swap spread " + fmt("%.1e", std::max(worst, swap)) + ", threshold(0.952)=" +
                  fmt("%.4f", at_point) + ", " + fmt("%.1f", t) + " s"};
}

Outcome c9_ppt_oracle() {
  const quantum::Matrix bell = states::hybrid_bell_state().matrix();
  auto werner = [&](double p) {
    return quantum::DensityMatrix(2, 2, p * bell + (1.0 - p) * quantum::identity(4) / 4.0);
  };
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (verify::ppt_oracle(werner(mid)) ? hi : lo) = mid;
  }
  const double p = 0.5 * (lo + hi);
  const double e = quantum::min_eigenvalue(quantum::partial_transpose(states::hybrid_bell_state()).matrix());
  const bool ok = std::abs(p - 1.0 / 3.0) <= 0.01 && std::abs(e + 0.5) <= 1e-10;
  return {ok, "Werner transition p=" + fmt("%.5f", p) + ", Bell-state min eig of PT " + fmt("%.12f", e)};
}

Outcome c10_stability() {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    analysis::StabilityOptions opt;
    opt.drift.phase0 = phase(rng);
    for (const auto& pt : analysis::stability_series(0.804, opt)) worst = std::max(worst, std::abs(pt.combined - 0.804));
  }
  double lowest = 1.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    analysis::StabilityOptions opt;
    opt.poisson = true;
    opt.seed = seed;
    for (const auto& pt : analysis::stability_series(0.804, opt)) lowest = std::min(lowest, pt.combined);
  }
  const bool ok = worst <= 1e-15 && lowest > 0.65;
  return {ok, "noiseless max deviation " + fmt("%.1e", worst) + ", Poisson minimum over 20 seeds " + fmt("%.4f", lowest)};
}

Outcome c11_povm() {
  int bad = 0;
  double worst = 0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const auto p = measurement::bob_povm({i / 20.0, j / 20.0});
      const std::vector<quantum::Matrix> e{p.early, p.late, p.middle, p.no_click};
      const auto d = measurement::validate_povm(e, 1e-12);
      bad += !d.valid;
      worst = std::max(worst, d.completeness_residual);
    }
  return {bad == 0, std::to_string(bad) + " invalid of 441, max completeness residual " + fmt("%.1e", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome c12_determinism(const std::string& exe) {
  if (exe.empty()) return {false, "no executable given"};
  const fs::path root = fs::temp_directory_path() / "mmtqa_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> runs{
      "chsh-scan --seed 3 --svg",
      "chsh-scan --seed 4 --seeds 3",
      "visibility-scan --mode speckle --seed 5 --points 5 --svg",
      "visibility-scan --points 5",
      "stability --poisson --seed 6 --svg",
      "npt-verify",
      "npt-boundary --points 4",
      "expectation-aoi --points 2001",
      "phase-sensitivity",
      "relay-check",
  };
  std::size_t files = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path d = root / (std::to_string(k) + "_" + std::to_string(rep));
      fs::create_directories(d);
      const std::string cmd = "\"" + exe + "\" " + runs[k] + (rep ? " --jobs 1" : " --jobs 2") + " --output-dir \"" +
                              d.string() + "\" > \"" + (d / "stdout.txt").string() + "\" 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + runs[k]};
      dirs.push_back(d);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path twin = dirs[1] / entry.path().filename();
      if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
        return {false, "differs: " + runs[k] + " -> " + entry.path().filename().string()};
      }
      ++files;
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(runs.size()) + " commands, " + std::to_string(files) + " files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string exe = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"visibility point check", c1_visibility_point},
      {"relay identity", c2_relay_identity},
      {"wave/ray consistency", c3_wave_ray},
      {"phase sensitivity", c4_phase_sensitivity},
      {"noise-model round trip", c5_noise_round_trip},
      {"CHSH simulation", c6_chsh},
      {"entanglement verdict", c7_verdicts},
      {"boundary properties", c8_boundary},
      {"PPT oracle", c9_ppt_oracle},
      {"stability metric", c10_stability},
      {"POVM validity", c11_povm},
      {"determinism", [&] { return c12_determinism(exe); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
