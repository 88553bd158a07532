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


#include "mmtqa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmtqa/analysis.hpp"
#include "mmtqa/chsh.hpp"
#include "mmtqa/errors.hpp"
#include "mmtqa/geometry.hpp"
#include "mmtqa/io.hpp"
#include "mmtqa/states.hpp"
#include "mmtqa/verify.hpp"
#include "mmtqa/waveoptics.hpp"

namespace mmtqa::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) { return io::format_double(v); }

std::string fixed(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Raw string values for every option, merged from defaults, the config file
// and the command line in that order.
class Params {
 public:
  explicit Params(CLI::App* sub) : sub_(sub) {}

  void option(const std::string& name, const std::string& def, const std::string& help) {
    auto e = std::make_unique<Entry>();
    e->value = def;
    e->option = sub_->add_option("--" + name, e->given, help + " [default: " + def + "]");
    entries_[name] = std::move(e);
  }

  void flag(const std::string& name, const std::string& help) {
    auto e = std::make_unique<Entry>();
    e->value = "false";
    e->is_flag = true;
    e->option = sub_->add_flag("--" + name, e->flag, help);
    entries_[name] = std::move(e);
  }

  void resolve(const nlohmann::json* section) {
    for (auto& [name, e] : entries_) {
      if (section && section->contains(name)) {
        const auto& v = (*section)[name];
        if (v.is_string()) e->value = v.get<std::string>();
        else if (v.is_boolean()) e->value = v.get<bool>() ? "true" : "false";
        else if (v.is_number_integer()) e->value = std::to_string(v.get<long long>());
        else if (v.is_number()) e->value = fmt(v.get<double>());
        else throw InvalidArgument("config value for '" + name + "' must be a string, number or boolean");
      }
      if (e->option->count() > 0) e->value = e->is_flag ? (e->flag ? "true" : "false") : e->given;
    }
    if (section) {
      for (auto it = section->begin(); it != section->end(); ++it) {
        if (!entries_.count(it.key())) throw InvalidArgument("unknown config key '" + it.key() + "'");
      }
    }
  }

  const std::string& str(const std::string& name) const { return entries_.at(name)->value; }

  double num(const std::string& name, Quantity q = Quantity::kNumber) const {
    return parse_quantity(str(name), q);
  }

  long long integer(const std::string& name) const {
    const std::string& s = str(name);
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      throw InvalidArgument("--" + name + " expects an integer, got '" + s + "'");
    }
    if (pos != s.size()) throw InvalidArgument("--" + name + " expects an integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& name) const {
    const std::string& s = str(name);
    if (s == "true" || s == "on" || s == "1") return true;
    if (s == "false" || s == "off" || s == "0") return false;
    throw InvalidArgument("--" + name + " expects on/off, got '" + s + "'");
  }

  // Parameters recorded in output headers; options that only affect where
  // or how fast results are produced are left out.
  io::Metadata metadata(const std::string& command) const {
    io::Metadata m{{"command", command}};
    for (const auto& [name, e] : entries_) {
      if (name == "config" || name == "output-dir" || name == "jobs" || name == "svg") continue;
      m.emplace_back(name, e->value);
    }
    return m;
  }

 private:
  struct Entry {
    std::string value;
    std::string given;
    bool flag = false;
    bool is_flag = false;
    CLI::Option* option = nullptr;
  };
  CLI::App* sub_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
};

struct Context {
  const Params& p;
  std::ostream& out;
  std::filesystem::path dir;
  std::string command;
  bool svg = false;
  int jobs = 1;

  void csv(const std::string& name, const std::string& body) const { io::write_file(dir / name, body); }
  void plot(const std::string& name, const io::PlotSpec& spec, const std::vector<io::Series>& s) const {
    if (svg) io::write_file(dir / name, io::svg_line_plot(spec, s));
  }
  io::Metadata meta() const { return p.metadata(command); }
};

void add_geometry(Params& p) {
  p.option("delta-l0", "0.60m", "path difference at normal incidence");
  p.option("sigma", "1.49mm", "beam radius (1/e amplitude)");
  p.option("v0", "0.91", "visibility at zero angle");
  p.option("wavelength", "776nm", "wavelength");
  p.option("f", "0.1m", "relay focal length");
}

geometry::InterferometerGeometry read_geometry(const Params& p) {
  geometry::InterferometerGeometry g;
  g.delta_l0 = p.num("delta-l0", Quantity::kLength);
  g.sigma = p.num("sigma", Quantity::kLength);
  g.v0 = p.num("v0");
  g.wavelength = p.num("wavelength", Quantity::kLength);
  g.focal_length = p.num("f", Quantity::kLength);
  g.validate();
  return g;
}

void add_efficiencies(Params& p) {
  p.option("eta-l", "0.9", "long-arm analyzer efficiency");
  p.option("eta-s", "0.9", "short-arm analyzer efficiency");
}

measurement::AnalyzerEfficiencies read_efficiencies(const Params& p) {
  measurement::AnalyzerEfficiencies e{p.num("eta-l"), p.num("eta-s")};
  e.validate();
  return e;
}

std::vector<bool> relay_modes(const std::string& s) {
  if (s == "on") return {true};
  if (s == "off") return {false};
  if (s == "both") return {false, true};
  throw InvalidArgument("--relay expects on, off or both, got '" + s + "'");
}

std::size_t count_option(const Params& p, const std::string& name, long long min) {
  const long long v = p.integer(name);
  if (v < min) throw InvalidArgument("--" + name + " must be at least " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

// ---- subcommands ----------------------------------------------------------

void visibility_scan(const Context& c) {
  const auto g = read_geometry(c.p);
  const std::string mode = c.p.str("mode");
  const auto relays = relay_modes(c.p.str("relay"));
  const double a_min = c.p.num("alpha-min", Quantity::kAngle);
  const double a_max = c.p.num("alpha-max", Quantity::kAngle);
  const auto alphas = analysis::linspace(a_min, a_max, count_option(c.p, "points", 1));

  analysis::FieldSpec fs;
  if (mode == "gaussian") fs.kind = analysis::FieldKind::kGaussian;
  else if (mode == "speckle") fs.kind = analysis::FieldKind::kSpeckle;
  else if (mode != "ray") throw InvalidArgument("--mode expects gaussian, speckle or ray");
  fs.grid_n = count_option(c.p, "grid", 64);
  fs.extent = c.p.num("extent", Quantity::kLength);
  fs.mode_count = count_option(c.p, "modes", 1);
  fs.seed = static_cast<std::uint64_t>(c.p.integer("seed"));
  fs.basis_waist = c.p.num("basis-waist", Quantity::kLength);

  std::ostringstream csv;
  io::Metadata meta = c.meta();
  if (mode == "speckle") meta.emplace_back("model", "extrapolation");
  io::CsvWriter w(csv, meta, {"alpha", "relay", "visibility", "ray_visibility", "collection"});
  std::vector<io::Series> series;
  for (bool relay : relays) {
    io::Series s{relay ? "relay" : "no relay", {}, {}};
    std::vector<analysis::AoiPoint> pts;
    if (mode == "ray") {
      for (double a : alphas)
        pts.push_back({a, relay ? g.v0 : geometry::visibility(g, a), analysis::collection_efficiency(a)});
    } else {
      pts = analysis::aoi_sweep(g, fs, alphas, relay, c.jobs);
    }
    for (const auto& pt : pts) {
      const double ray = relay ? g.v0 : geometry::visibility(g, pt.alpha);
      w.row({pt.alpha, relay ? 1.0 : 0.0, pt.visibility, ray, pt.collection});
      c.out << "alpha=" << fixed("%.6g", pt.alpha) << " relay=" << (relay ? "on" : "off")
            << " visibility=" << fixed("%.6f", pt.visibility) << '\n';
      s.x.push_back(pt.alpha * 1e3);
      s.y.push_back(pt.visibility);
    }
    series.push_back(std::move(s));
  }
  c.csv("visibility_scan.csv", csv.str());
  c.plot("visibility_scan.svg", {"Visibility vs angle of incidence", "alpha [mrad]", "visibility"}, series);
}

void relay_check(const Context& c) {
  const double f = c.p.num("f", Quantity::kLength);
  if (!(f > 0.0)) throw InvalidArgument("--f must be positive");
  const auto m = geometry::relay_matrix(f);
  const double res = m.identity_residual();
  std::ostringstream csv;
  io::CsvWriter w(csv, c.meta(), {"a", "b", "c", "d", "determinant", "identity_residual"});
  w.row({m.a, m.b, m.c, m.d, m.determinant(), res});
  c.csv("relay_check.csv", csv.str());
  auto z = [](double v) { return fmt(v + 0.0); };  // no "-0"
  c.out << "relay ABCD = [[" << z(m.a) << ", " << z(m.b) << "], [" << z(m.c) << ", " << z(m.d) << "]]\n";
  c.out << "identity residual = " << fixed("%.3e", res) << (res < 1e-12 ? " (identity)" : " (NOT identity)")
        << '\n';
}

void phase_sensitivity(const Context& c) {
  const auto g = read_geometry(c.p);
  const double alpha = c.p.num("alpha", Quantity::kAngle);
  const double probe = c.p.num("probe", Quantity::kAngle);
  const double reference = c.p.num("reference", Quantity::kAngle);
  const double slope = geometry::path_difference_slope(g, alpha);
  const double analytic = geometry::aoi_per_pi(g, alpha);
  const double numeric = geometry::aoi_for_phase(g, kPi, alpha);
  const double shift_probe = geometry::phase_shift(g, alpha, alpha + probe);
  const double shift_ref = geometry::phase_shift(g, alpha, alpha + reference);
  const double ratio = std::abs(shift_probe) / std::abs(shift_ref);

  c.out << "slope dDL/dalpha = " << fmt(slope) << " m/rad\n";
  c.out << "aoi per pi (analytic) = " << fixed("%.4f", analytic * 1e9) << " nrad\n";
  c.out << "aoi per pi (numeric)  = " << fixed("%.4f", numeric * 1e9) << " nrad\n";
  c.out << "deviation from reference " << fixed("%.1f", reference * 1e9)
        << " nrad = " << fixed("%+.2f", 100.0 * (numeric - reference) / reference) << " %\n";
  c.out << "phase shift at " << fixed("%.4g", probe * 1e6) << " urad = " << fixed("%.4f", std::abs(shift_probe) / kPi)
        << " pi\n";
  c.out << "ratio |dphi(probe)| / |dphi(reference)| = " << fixed("%.4f", ratio) << '\n';

  std::ostringstream csv;
  io::CsvWriter w(csv, c.meta(), {"alpha", "delta_l_excess", "phase_shift_over_pi"});
  io::Series s{"phase shift", {}, {}};
  for (double a : analysis::linspace(alpha, alpha + 2.0 * probe, count_option(c.p, "points", 2))) {
    const double ps = geometry::phase_shift(g, alpha, a) / kPi;
    w.row({a, geometry::path_difference_excess(g, a), ps});
    s.x.push_back(a * 1e6);
    s.y.push_back(ps);
  }
  c.csv("phase_sensitivity.csv", csv.str());
  c.plot("phase_sensitivity.svg", {"Phase shift vs angle", "alpha [urad]", "phase / pi"}, {s});
}

chsh::ScanConfig read_scan(const Params& p) {
  chsh::ScanConfig cfg;
  cfg.rate = p.num("rate");
  cfg.duration = p.num("duration", Quantity::kTime);
  cfg.bucket = p.num("bucket", Quantity::kTime);
  cfg.seed = static_cast<std::uint64_t>(p.integer("seed"));
  cfg.noiseless = p.boolean("noiseless");
  const std::string kind = p.str("drift");
  if (kind == "linear") cfg.drift.kind = chsh::DriftKind::kLinear;
  else if (kind == "sinusoidal") cfg.drift.kind = chsh::DriftKind::kSinusoidal;
  else throw InvalidArgument("--drift expects linear or sinusoidal");
  cfg.drift.period = p.num("period", Quantity::kTime);
  cfg.drift.amplitude = p.num("amplitude", Quantity::kAngle);
  cfg.drift.phase0 = p.num("phase0", Quantity::kAngle);
  cfg.validate();
  return cfg;
}

void chsh_scan(const Context& c) {
  const auto params = states::DepolarizationParams::unbiased(c.p.num("pxy"), c.p.num("pz"));
  const auto rho = states::depolarize(states::hybrid_bell_state(), params);
  const auto cfg = read_scan(c.p);
  const std::size_t seeds = count_option(c.p, "seeds", 1);
  const auto v = states::channel_visibilities(params);

  std::ostringstream runs;
  io::CsvWriter rw(runs, c.meta(), {"seed", "e11", "e12", "e21", "e22", "S"});
  double sum = 0.0, sum2 = 0.0;
  chsh::ChshRun first;
  for (std::size_t k = 0; k < seeds; ++k) {
    chsh::ScanConfig ck = cfg;
    ck.seed = cfg.seed + k;
    chsh::ChshRun r = chsh::run_chsh(rho, ck, c.jobs);
    const auto& e = r.estimate;
    rw.row({static_cast<double>(ck.seed), e.e11, e.e12, e.e21, e.e22, e.s});
    sum += e.s;
    sum2 += e.s * e.s;
    if (k == 0) first = std::move(r);
  }
  const double mean = sum / static_cast<double>(seeds);
  const double sd = seeds > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * mean) / static_cast<double>(seeds - 1))) : 0.0;

  std::ostringstream t1, t2, surf;
  chsh::write_trace_csv(t1, first.a1, c.meta());
  chsh::write_trace_csv(t2, first.a2, c.meta());
  const auto surface = chsh::max_expectation_surface(first.a1, c.jobs);
  chsh::write_surface_csv(surf, first.a1, surface, c.meta());
  c.csv("chsh_runs.csv", runs.str());
  c.csv("chsh_trace_a1.csv", t1.str());
  c.csv("chsh_trace_a2.csv", t2.str());
  c.csv("chsh_surface_a1.csv", surf.str());

  c.out << "S_theo = " << fixed("%.4f", chsh::s_theo(v)) << " (v_z=" << fixed("%.4f", v.v_z)
        << ", v_xy=" << fixed("%.4f", v.v_xy) << ")\n";
  c.out << "max |E| middle-bin surface (A1) = " << fixed("%.6f", surface.max_abs) << " at t1="
        << fmt(first.a1.time[surface.arg_t1]) << " t2=" << fmt(first.a1.time[surface.arg_t2]) << '\n';
  c.out << "S_exp = " << fixed("%.4f", mean);
  if (seeds > 1) c.out << " +/- " << fixed("%.4f", sd) << " over " << seeds << " seeds";
  c.out << '\n';

  io::Series s1{"D1 middle (A1)", {}, {}}, s2{"D2 middle (A1)", {}, {}};
  for (std::size_t k = 0; k < first.a1.size(); ++k) {
    s1.x.push_back(first.a1.time[k]);
    s1.y.push_back(first.a1.middle[0][k]);
    s2.x.push_back(first.a1.time[k]);
    s2.y.push_back(first.a1.middle[1][k]);
  }
  c.plot("chsh_trace_a1.svg", {"Middle-bin coincidences", "t [s]", "counts"}, {s1, s2});
}

verify::ConstraintSet read_constraints(const Params& p, double vz, double vxy) {
  const std::string arr = p.str("arrival");
  std::optional<double> arrival;
  if (arr != "none") arrival = parse_quantity(arr, Quantity::kNumber);
  auto cs = verify::build_constraints(vz, vxy, read_efficiencies(p), arrival);
  if (p.boolean("block-diagonal")) cs = verify::block_diagonal_restriction(cs);
  return cs;
}

verify::SolverOptions read_solver(const Params& p) {
  verify::SolverOptions o;
  o.tol = p.num("tol");
  o.max_iter = static_cast<int>(p.integer("max-iter"));
  return o;
}

void npt_verify(const Context& c) {
  const auto cs = read_constraints(c.p, c.p.num("vz"), c.p.num("vxy"));
  for (const auto& w : cs.warnings) c.out << "warning: " << w << '\n';
  const auto r = verify::sdp_feasible(cs, read_solver(c.p));
  if (r.feasible()) {
    c.out << "FEASIBLE (no entanglement certified) margin=" << fixed("%.6e", r.margin) << '\n';
  } else {
    c.out << "INFEASIBLE (ENTANGLED) margin=" << fixed("%.6e", r.margin_upper) << '\n';
  }
  c.out << "iterations=" << r.iterations << " constraint_residual=" << fixed("%.3e", r.constraint_residual) << '\n';
  nlohmann::json j = verify::report_to_json(cs, r);
  j["parameters"] = nlohmann::json::object();
  for (const auto& [k, v] : c.meta()) j["parameters"][k] = v;
  c.csv("npt_verify.json", j.dump(2) + "\n");
}

void npt_boundary(const Context& c) {
  const auto grid = analysis::linspace(c.p.num("vz-min"), c.p.num("vz-max"), count_option(c.p, "points", 1));
  verify::BoundaryOptions bo;
  bo.resolution = c.p.num("resolution");
  bo.solver = read_solver(c.p);
  const std::string arr = c.p.str("arrival");
  bo.arrival = arr == "none" ? std::nullopt : std::optional<double>(parse_quantity(arr, Quantity::kNumber));
  bo.block_diagonal = c.p.boolean("block-diagonal");
  bo.jobs = c.jobs;
  const auto pts = verify::boundary_scan(grid, read_efficiencies(c.p), bo);
  std::ostringstream csv;
  verify::write_boundary_csv(csv, pts, c.meta());
  c.csv("npt_boundary.csv", csv.str());
  io::Series s{"classical bound", {}, {}};
  for (const auto& pt : pts) {
    c.out << "v_z=" << fixed("%.4f", pt.v_z) << " v_xy_threshold=" << fixed("%.4f", pt.threshold) << '\n';
    s.x.push_back(pt.v_z);
    s.y.push_back(pt.threshold);
  }
  c.plot("npt_boundary.svg", {"PPT boundary", "V_z", "V_xy threshold"}, {s});
}

void stability(const Context& c) {
  analysis::StabilityOptions o;
  o.duration = c.p.num("duration", Quantity::kTime);
  o.bucket = c.p.num("bucket", Quantity::kTime);
  const double total = c.p.num("drift", Quantity::kAngle);
  if (!(total >= 0.0)) throw InvalidArgument("--drift must be nonnegative");
  o.drift.phase0 = c.p.num("phase0", Quantity::kAngle);
  if (total == 0.0) {
    o.drift.kind = chsh::DriftKind::kSinusoidal;
    o.drift.amplitude = 0.0;
  } else {
    o.drift.kind = chsh::DriftKind::kLinear;
    o.drift.period = 2.0 * kPi * o.duration / total;
  }
  o.poisson = c.p.boolean("poisson");
  o.rate = c.p.num("rate");
  o.seed = static_cast<std::uint64_t>(c.p.integer("seed"));
  const auto pts = analysis::stability_series(c.p.num("vxy"), o);
  std::ostringstream csv;
  io::CsvWriter w(csv, c.meta(), {"t", "phase", "e1", "e2", "combined"});
  io::Series s1{"E1", {}, {}}, s2{"E2", {}, {}}, s3{"combined", {}, {}};
  double lo = 1.0;
  for (const auto& p : pts) {
    w.row({p.t, p.phase, p.e1, p.e2, p.combined});
    lo = std::min(lo, p.combined);
    s1.x.push_back(p.t / 60.0);
    s1.y.push_back(p.e1);
    s2.x.push_back(p.t / 60.0);
    s2.y.push_back(p.e2);
    s3.x.push_back(p.t / 60.0);
    s3.y.push_back(p.combined);
  }
  c.csv("stability.csv", csv.str());
  c.plot("stability.svg", {"Phase stability", "t [min]", "expectation"}, {s1, s2, s3});
  c.out << "buckets=" << pts.size() << " min combined=" << fixed("%.6f", lo) << '\n';
}

void expectation_aoi(const Context& c) {
  const auto g = read_geometry(c.p);
  const double vxy = c.p.num("vxy");
  const double a_max = c.p.num("alpha-max", Quantity::kAngle);
  const auto alphas = analysis::linspace(-a_max, a_max, count_option(c.p, "points", 2));
  const double phase = c.p.num("phase", Quantity::kAngle);
  std::ostringstream csv;
  io::CsvWriter w(csv, c.meta(), {"alpha", "relay", "expectation"});
  std::vector<io::Series> series;
  for (bool relay : relay_modes(c.p.str("relay"))) {
    const auto pts = analysis::expectation_vs_aoi(g, vxy, alphas, relay, phase);
    io::Series s{relay ? "relay" : "no relay", {}, {}};
    double mean = 0.0;
    for (const auto& p : pts) {
      w.row({p.alpha, relay ? 1.0 : 0.0, p.expectation});
      mean += p.expectation;
      s.x.push_back(p.alpha * 180.0 / kPi);
      s.y.push_back(p.expectation);
    }
    mean /= static_cast<double>(pts.size());
    c.out << "relay=" << (relay ? "on" : "off") << " mean E=" << fixed("%.6f", mean) << '\n';
    series.push_back(std::move(s));
  }
  c.csv("expectation_aoi.csv", csv.str());
  c.plot("expectation_aoi.svg", {"Expectation value vs angle", "alpha [deg]", "E"}, series);
}

}  // namespace

double parse_quantity(const std::string& text, Quantity kind) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse number from '" + text + "'");
  }
  std::string unit = text.substr(pos);
  unit.erase(0, unit.find_first_not_of(' '));
  if (!std::isfinite(v)) throw InvalidArgument("value must be finite: '" + text + "'");
  if (unit.empty()) return v;
  static const std::map<std::string, std::pair<Quantity, double>> units = {
      {"rad", {Quantity::kAngle, 1.0}},         {"mrad", {Quantity::kAngle, 1e-3}},
      {"urad", {Quantity::kAngle, 1e-6}},       {"nrad", {Quantity::kAngle, 1e-9}},
      {"deg", {Quantity::kAngle, kPi / 180.0}}, {"pi", {Quantity::kAngle, kPi}},
      {"m", {Quantity::kLength, 1.0}},          {"mm", {Quantity::kLength, 1e-3}},
      {"um", {Quantity::kLength, 1e-6}},        {"nm", {Quantity::kLength, 1e-9}},
      {"s", {Quantity::kTime, 1.0}},            {"ms", {Quantity::kTime, 1e-3}},
      {"us", {Quantity::kTime, 1e-6}},          {"ns", {Quantity::kTime, 1e-9}},
      {"min", {Quantity::kTime, 60.0}},         {"h", {Quantity::kTime, 3600.0}},
  };
  auto it = units.find(unit);
  if (it == units.end()) throw InvalidArgument("unknown unit '" + unit + "' in '" + text + "'");
  if (it->second.first != kind) throw InvalidArgument("unit '" + unit + "' does not fit this quantity in '" + text + "'");
  return v * it->second.second;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimode time-bin qubit analyzer simulations and entanglement verification", "mmtqa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kVersion);

  using Handler = std::function<void(const Context&)>;
  struct Command {
    CLI::App* sub;
    std::unique_ptr<Params> params;
    Handler handler;
  };
  std::vector<Command> commands;
  auto add = [&](const std::string& name, const std::string& help, Handler h,
                 const std::function<void(Params&)>& opts) {
    CLI::App* sub = app.add_subcommand(name, help);
    auto p = std::make_unique<Params>(sub);
    p->option("config", "", "JSON config file");
    p->option("output-dir", "", std::string("output directory (else $") + kOutputDirEnv + " or .)");
    p->option("jobs", "1", "worker threads");
    p->flag("svg", "also write SVG plots");
    opts(*p);
    commands.push_back({sub, std::move(p), std::move(h)});
  };

  add("visibility-scan", "visibility vs angle of incidence with and without relay", visibility_scan, [](Params& p) {
    add_geometry(p);
    p.option("mode", "gaussian", "gaussian, speckle or ray");
    p.option("relay", "both", "on, off or both");
    p.option("alpha-min", "0mrad", "first angle");
    p.option("alpha-max", "2mrad", "last angle");
    p.option("points", "21", "number of angles");
    p.option("grid", "512", "grid points per axis");
    p.option("extent", "0", "grid side length (0: 16 sigma)");
    p.option("modes", "50", "speckle mode count");
    p.option("basis-waist", "0.5mm", "speckle basis waist");
    p.option("seed", "0", "speckle seed");
  });
  add("relay-check", "ABCD matrix of the double-pass relay", relay_check,
      [](Params& p) { p.option("f", "0.1m", "relay focal length"); });
  add("phase-sensitivity", "phase change per angle of incidence", phase_sensitivity, [](Params& p) {
    add_geometry(p);
    p.option("alpha", "0rad", "operating angle");
    p.option("probe", "1.75urad", "probe angle step");
    p.option("reference", "349nrad", "reference angle per pi");
    p.option("points", "101", "CSV samples");
  });
  add("chsh-scan", "drifting-phase CHSH simulation", chsh_scan, [](Params& p) {
    p.option("pxy", fmt(states::kMeasuredPxy), "x/y flip probability on the time-bin qubit");
    p.option("pz", fmt(states::kMeasuredPz), "z flip probability");
    p.option("rate", "1000", "detected coincidences per second");
    p.option("duration", "4s", "scan duration");
    p.option("bucket", "0.5s", "time bucket");
    p.option("drift", "linear", "linear or sinusoidal");
    p.option("period", "4s", "drift period");
    p.option("amplitude", "3.141592653589793rad", "sinusoidal drift amplitude");
    p.option("phase0", "0rad", "phase at t = 0");
    p.option("seed", "0", "first seed");
    p.option("seeds", "1", "number of seeds");
    p.flag("noiseless", "expected counts instead of Poisson draws");
  });
  auto solver_opts = [](Params& p) {
    add_efficiencies(p);
    p.option("arrival", fmt(verify::kDefaultArrival), "photon arrival probability or none");
    p.option("tol", "1e-8", "verdict tolerance");
    p.option("max-iter", "600", "Newton step limit");
    p.flag("block-diagonal", "restrict to vacuum/photon block-diagonal states");
  };
  add("npt-verify", "PPT feasibility for measured visibilities", npt_verify, [&](Params& p) {
    p.option("vz", "0.952", "z visibility");
    p.option("vxy", "0.804", "xy visibility");
    solver_opts(p);
  });
  add("npt-boundary", "threshold v_xy over a v_z grid", npt_boundary, [&](Params& p) {
    p.option("vz-min", "0", "first v_z");
    p.option("vz-max", "1", "last v_z");
    p.option("points", "6", "grid points");
    p.option("resolution", "1e-3", "bisection resolution");
    solver_opts(p);
  });
  add("stability", "long-term combined expectation", stability, [](Params& p) {
    p.option("vxy", "0.804", "xy visibility");
    p.option("duration", "30min", "duration");
    p.option("bucket", "3min", "bucket");
    p.option("drift", "90deg", "total phase drift over the duration");
    p.option("phase0", "0rad", "initial phase");
    p.option("rate", "50", "coincidences per second per setting");
    p.option("seed", "0", "seed");
    p.flag("poisson", "Poisson counting noise");
  });
  add("expectation-aoi", "expectation value vs angle of incidence", expectation_aoi, [](Params& p) {
    add_geometry(p);
    p.option("vxy", "0.80", "xy visibility");
    p.option("alpha-max", "0.2deg", "half-width of the symmetric angle window");
    p.option("points", "20001", "number of angles");
    p.option("relay", "both", "on, off or both");
    p.option("phase", "0rad", "fixed analyzer phase");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  for (auto& cmd : commands) {
    if (!cmd.sub->parsed()) continue;
    try {
      nlohmann::json config;
      const nlohmann::json* section = nullptr;
      const std::string cfg_opt = cmd.sub->get_option("--config")->count() ? cmd.sub->get_option("--config")->as<std::string>() : "";
      if (!cfg_opt.empty()) {
        std::ifstream f(cfg_opt);
        if (!f) throw InvalidArgument("cannot read config file '" + cfg_opt + "'");
        try {
          config = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception& e) {
          throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
        }
        if (!config.is_object() || config.value("schema_version", 0) != 1) {
          throw InvalidArgument("config must be an object with \"schema_version\": 1");
        }
        if (config.contains(cmd.sub->get_name())) section = &config[cmd.sub->get_name()];
        if (section && !section->is_object()) throw InvalidArgument("config section must be an object");
      }
      cmd.params->resolve(section);
      const Params& p = *cmd.params;
      std::filesystem::path dir = p.str("output-dir");
      if (dir.empty()) {
        const char* env = std::getenv(kOutputDirEnv);
        dir = (env && *env) ? env : ".";
      }
      const long long jobs = p.integer("jobs");
      if (jobs < 1) throw InvalidArgument("--jobs must be at least 1");
      Context ctx{p, out, dir, cmd.sub->get_name(), p.boolean("svg"), static_cast<int>(jobs)};
      cmd.handler(ctx);
      return kExitOk;
    } catch (const NonConvergence& e) {
      err << "error: " << e.what() << '\n';
      return kExitNonConvergence;
    } catch (const InvalidArgument& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalid;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitInvalid;
    }
  }
  return kExitInvalid;
}

}  // namespace mmtqa::cli
