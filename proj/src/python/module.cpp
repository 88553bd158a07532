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


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mmtqa/analysis.hpp"
#include "mmtqa/chsh.hpp"
#include "mmtqa/errors.hpp"
#include "mmtqa/geometry.hpp"
#include "mmtqa/io.hpp"
#include "mmtqa/measurement.hpp"
#include "mmtqa/quantum.hpp"
#include "mmtqa/states.hpp"
#include "mmtqa/verify.hpp"
#include "mmtqa/waveoptics.hpp"

namespace py = pybind11;
using namespace mmtqa;

namespace {

quantum::DensityMatrix density(const quantum::Matrix& m, std::size_t dim_a) {
  if (dim_a == 0 || static_cast<std::size_t>(m.rows()) % dim_a != 0) {
    throw DimensionMismatch("matrix size is not a multiple of dim_a");
  }
  return quantum::DensityMatrix(dim_a, static_cast<std::size_t>(m.rows()) / dim_a, m);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multimode time-bin qubit analyzer: optics, CHSH and PPT verification";
  m.attr("__version__") = io::kVersion;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", base.ptr());
  static py::exception<NonConvergence> nonconv(m, "NonConvergence", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(invalid.ptr(), e.what());
    } catch (const NonConvergence& e) {
      PyErr_SetString(nonconv.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  py::class_<geometry::InterferometerGeometry>(m, "InterferometerGeometry")
      .def(py::init<>())
      .def_readwrite("delta_l0", &geometry::InterferometerGeometry::delta_l0)
      .def_readwrite("sigma", &geometry::InterferometerGeometry::sigma)
      .def_readwrite("v0", &geometry::InterferometerGeometry::v0)
      .def_readwrite("wavelength", &geometry::InterferometerGeometry::wavelength)
      .def_readwrite("focal_length", &geometry::InterferometerGeometry::focal_length)
      .def("validate", &geometry::InterferometerGeometry::validate);

  m.def("visibility", &geometry::visibility, py::arg("geom"), py::arg("alpha"));
  m.def("lateral_offset", &geometry::lateral_offset, py::arg("geom"), py::arg("alpha"));
  m.def("phase_shift", &geometry::phase_shift, py::arg("geom"), py::arg("alpha_from"), py::arg("alpha_to"));
  m.def("aoi_per_pi", &geometry::aoi_per_pi, py::arg("geom"), py::arg("alpha") = 0.0);
  m.def("aoi_for_phase", &geometry::aoi_for_phase, py::arg("geom"), py::arg("target"), py::arg("alpha") = 0.0,
        py::arg("sign") = 1);
  m.def("relay_matrix", [](double f) {
    const auto r = geometry::relay_matrix(f);
    return std::vector<std::vector<double>>{{r.a, r.b}, {r.c, r.d}};
  }, py::arg("focal_length"));

  m.def("gaussian_interference", [](const geometry::InterferometerGeometry& g, double alpha, bool relay,
                                    std::size_t grid_n) {
    const auto f = waveoptics::make_gaussian(g.sigma, grid_n, waveoptics::kDefaultExtentSigmas * g.sigma, g.wavelength);
    return waveoptics::interfere(f, g, alpha, relay);
  }, py::arg("geom"), py::arg("alpha"), py::arg("relay"), py::arg("grid_n") = waveoptics::kDefaultGrid);

  m.def("hybrid_bell_state", [] { return states::hybrid_bell_state().matrix(); });
  m.def("depolarize", [](const quantum::Matrix& rho, double p_xy, double p_z) {
    return states::depolarize(density(rho, 2), states::DepolarizationParams::unbiased(p_xy, p_z)).matrix();
  }, py::arg("rho"), py::arg("p_xy"), py::arg("p_z"));
  m.def("embed_2x3", [](const quantum::Matrix& rho, double arrival) {
    return states::embed_2x3(density(rho, 2), arrival).matrix();
  }, py::arg("rho"), py::arg("arrival"));
  m.def("visibilities", [](const quantum::Matrix& rho) {
    const auto d = density(rho, 2);
    const auto bob = measurement::ideal_timebin_measurement();
    const auto grid = states::uniform_phase_grid(16);
    return std::make_pair(states::visibility_z(d, bob).v_z, states::visibility_xy(d, bob, grid).v_xy);
  }, py::arg("rho"));
  m.def("partial_transpose", [](const quantum::Matrix& rho, std::size_t dim_a, std::size_t dim_b) {
    return quantum::partial_transpose(rho, dim_a, dim_b);
  }, py::arg("rho"), py::arg("dim_a"), py::arg("dim_b"));
  m.def("eigvalsh", [](const quantum::Matrix& a) { return quantum::eig_hermitian(a).values; }, py::arg("a"));
  m.def("is_npt", [](const quantum::Matrix& rho, std::size_t dim_a) { return verify::ppt_oracle(density(rho, dim_a)); },
        py::arg("rho"), py::arg("dim_a") = 2);

  m.def("bob_povm", [](double eta_l, double eta_s, double phase) {
    const auto p = measurement::bob_povm({eta_l, eta_s}, phase);
    return std::vector<quantum::Matrix>{p.early, p.late, p.middle, p.no_click};
  }, py::arg("eta_l") = 0.9, py::arg("eta_s") = 0.9, py::arg("phase") = 0.0);

  m.def("expectation_from_counts", [](double pp, double pm, double mp, double mm) {
    return chsh::expectation_from_counts(chsh::JointCounts{pp, pm, mp, mm});
  }, py::arg("pp"), py::arg("pm"), py::arg("mp"), py::arg("mm"));
  m.def("chsh_s", &chsh::chsh_s, py::arg("e11"), py::arg("e12"), py::arg("e21"), py::arg("e22"));
  m.def("s_theo", [](double vz, double vxy) { return chsh::s_theo({vz, vxy}); }, py::arg("v_z"), py::arg("v_xy"));
  m.def("combined_expectation", &chsh::combined_expectation, py::arg("e1"), py::arg("e2"));
  m.def("simulate_chsh", [](double p_xy, double p_z, double rate, double duration, double bucket,
                            std::uint64_t seed, bool noiseless) {
    const auto rho = states::depolarize(states::hybrid_bell_state(), states::DepolarizationParams::unbiased(p_xy, p_z));
    chsh::ScanConfig cfg;
    cfg.rate = rate;
    cfg.duration = duration;
    cfg.bucket = bucket;
    cfg.seed = seed;
    cfg.noiseless = noiseless;
    const auto e = chsh::run_chsh(rho, cfg).estimate;
    py::dict d;
    d["e11"] = e.e11;
    d["e12"] = e.e12;
    d["e21"] = e.e21;
    d["e22"] = e.e22;
    d["S"] = e.s;
    return d;
  }, py::arg("p_xy") = states::kMeasuredPxy, py::arg("p_z") = states::kMeasuredPz, py::arg("rate") = 1000.0,
     py::arg("duration") = 4.0, py::arg("bucket") = 0.5, py::arg("seed") = 0, py::arg("noiseless") = false);

  m.def("sdp_feasible", [](double vz, double vxy, double eta_l, double eta_s, double tol, bool block_diagonal) {
    auto cs = verify::build_constraints(vz, vxy, {eta_l, eta_s});
    if (block_diagonal) cs = verify::block_diagonal_restriction(cs);
    verify::SolverOptions o;
    o.tol = tol;
    const auto r = verify::sdp_feasible(cs, o);
    py::dict d;
    d["feasible"] = r.feasible();
    d["margin"] = r.margin;
    d["margin_upper"] = r.margin_upper;
    d["iterations"] = r.iterations;
    d["witness"] = r.witness;
    return d;
  }, py::arg("v_z"), py::arg("v_xy"), py::arg("eta_l") = 0.9, py::arg("eta_s") = 0.9, py::arg("tol") = 1e-8,
     py::arg("block_diagonal") = false);
  m.def("boundary_scan", [](const std::vector<double>& grid, double eta_l, double eta_s, int jobs) {
    verify::BoundaryOptions o;
    o.jobs = jobs;
    std::vector<std::pair<double, double>> out;
    for (const auto& p : verify::boundary_scan(grid, {eta_l, eta_s}, o)) out.emplace_back(p.v_z, p.threshold);
    return out;
  }, py::arg("v_z_grid"), py::arg("eta_l") = 0.9, py::arg("eta_s") = 0.9, py::arg("jobs") = 1);

  m.def("stability_series", [](double vxy, double duration, double bucket, double total_drift) {
    analysis::StabilityOptions o;
    o.duration = duration;
    o.bucket = bucket;
    o.drift.period = 2.0 * 3.14159265358979323846 * duration / total_drift;
    std::vector<double> out;
    for (const auto& p : analysis::stability_series(vxy, o)) out.push_back(p.combined);
    return out;
  }, py::arg("v_xy"), py::arg("duration") = 1800.0, py::arg("bucket") = 180.0,
     py::arg("total_drift") = 1.5707963267948966);
}
