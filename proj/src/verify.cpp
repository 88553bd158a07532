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


#include "mmtqa/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <cstdio>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mmtqa/errors.hpp"
#include "mmtqa/io.hpp"

namespace mmtqa::verify {

using quantum::Complex;
using quantum::kron;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Two 6x6 log-det barriers.
constexpr double kBarrierParameter = 12.0;
// Any point with trace one and t >= -1 has coordinates of norm below this.
constexpr double kCoordinateBound = 10.0;

bool is_vacuum(std::size_t idx, std::size_t dim_b) { return idx % dim_b == 0; }

// Orthonormal (Frobenius) basis of Hermitian matrices, optionally limited to
// entries inside the vacuum / photon blocks.
std::vector<Matrix> hermitian_basis(std::size_t d, std::size_t dim_b, bool block) {
  std::vector<Matrix> out;
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < d; ++j) {
    Matrix e = Matrix::Zero(d, d);
    e(j, j) = 1.0;
    out.push_back(std::move(e));
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) {
      if (block && is_vacuum(j, dim_b) != is_vacuum(k, dim_b)) continue;
      Matrix s = Matrix::Zero(d, d), a = Matrix::Zero(d, d);
      s(j, k) = r;
      s(k, j) = r;
      a(j, k) = Complex(0, r);
      a(k, j) = Complex(0, -r);
      out.push_back(std::move(s));
      out.push_back(std::move(a));
    }
  }
  return out;
}

double re_trace_product(const Matrix& a, const Matrix& b) {
  // Re Tr(a b)
  return (a.cwiseProduct(b.transpose())).sum().real();
}

// Affine parametrization rho(y) = x0 + sum_j y_j basis_j.
struct AffineSpace {
  Matrix x0;
  std::vector<Matrix> basis;
  std::vector<Matrix> basis_pt;
  Matrix x0_pt;
  bool consistent = true;
  std::size_t rank = 0;
  // For projections: coefficient-space data.
  std::vector<Matrix> full_basis;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd a_pinv;
};

AffineSpace make_affine(const ConstraintSet& c) {
  const std::size_t d = c.dim();
  AffineSpace s;
  s.full_basis = hermitian_basis(d, c.dim_b, c.block_diagonal);
  const auto n = static_cast<Eigen::Index>(s.full_basis.size());
  const auto m = static_cast<Eigen::Index>(c.constraints.size());
  s.a.resize(m, n);
  s.b.resize(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    s.b(k) = c.constraints[static_cast<std::size_t>(k)].target;
    for (Eigen::Index i = 0; i < n; ++i) {
      s.a(k, i) = re_trace_product(c.constraints[static_cast<std::size_t>(k)].op,
                                   s.full_basis[static_cast<std::size_t>(i)]);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-12 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  s.rank = static_cast<std::size_t>(rank);
  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index i = 0; i < rank; ++i)
    pinv += svd.matrixV().col(i) * (1.0 / sv(i)) * svd.matrixU().col(i).transpose();
  s.a_pinv = pinv;
  const Eigen::VectorXd x0 = pinv * s.b;
  s.consistent = (s.a * x0 - s.b).cwiseAbs().maxCoeff() <= 1e-10;
  s.x0 = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) s.x0 += x0(i) * s.full_basis[static_cast<std::size_t>(i)];
  for (Eigen::Index j = rank; j < n; ++j) {
    Matrix bj = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = svd.matrixV()(i, j);
      if (w != 0.0) bj += w * s.full_basis[static_cast<std::size_t>(i)];
    }
    s.basis_pt.push_back(quantum::partial_transpose(bj, c.dim_a, c.dim_b));
    s.basis.push_back(std::move(bj));
  }
  s.x0_pt = quantum::partial_transpose(s.x0, c.dim_a, c.dim_b);
  return s;
}

double smallest_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

class Barrier {
 public:
  Barrier(const AffineSpace& sp, std::size_t d) : sp_(sp), d_(d), p_(sp.basis.size()) {}

  std::size_t size() const { return p_ + 1; }

  void assemble(const Eigen::VectorXd& z, Matrix& f1, Matrix& f2) const {
    const double t = z(static_cast<Eigen::Index>(p_));
    f1 = sp_.x0;
    f2 = sp_.x0_pt;
    for (std::size_t j = 0; j < p_; ++j) {
      const double y = z(static_cast<Eigen::Index>(j));
      f1 += y * sp_.basis[j];
      f2 += y * sp_.basis_pt[j];
    }
    f1.diagonal().array() -= t;
    f2.diagonal().array() -= t;
  }

  // Barrier objective; -inf outside the domain.
  double value(const Eigen::VectorXd& z, double s) const {
    Matrix f1, f2;
    assemble(z, f1, f2);
    const double l1 = logdet(f1), l2 = logdet(f2);
    if (!std::isfinite(l1) || !std::isfinite(l2)) return -kInf;
    return s * z(static_cast<Eigen::Index>(p_)) + l1 + l2;
  }

  void derivatives(const Eigen::VectorXd& z, double s, Eigen::VectorXd& g, Eigen::MatrixXd& h,
                   Matrix& s1, Matrix& s2) const {
    Matrix f1, f2;
    assemble(z, f1, f2);
    s1 = f1.llt().solve(Matrix::Identity(d_, d_));
    s2 = f2.llt().solve(Matrix::Identity(d_, d_));
    const std::size_t n = p_ + 1;
    std::vector<Matrix> w1(n), w2(n);
    for (std::size_t j = 0; j < p_; ++j) {
      w1[j] = s1 * sp_.basis[j];
      w2[j] = s2 * sp_.basis_pt[j];
    }
    w1[p_] = -s1;
    w2[p_] = -s2;
    g.resize(static_cast<Eigen::Index>(n));
    h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      g(static_cast<Eigen::Index>(a)) = w1[a].trace().real() + w2[a].trace().real();
      for (std::size_t b = 0; b <= a; ++b) {
        const double v = -(re_trace_product(w1[a], w1[b]) + re_trace_product(w2[a], w2[b]));
        h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = v;
      }
    }
    g(static_cast<Eigen::Index>(p_)) += s;
  }

  // Upper bound on t over feasible points with t >= -1, from the dual pair
  // (s1, s2) rescaled to unit total trace.
  double dual_bound(const Matrix& s1, const Matrix& s2) const {
    const double norm = s1.trace().real() + s2.trace().real();
    if (!(norm > 0.0)) return kInf;
    double r2 = 0.0;
    for (std::size_t j = 0; j < p_; ++j) {
      const double r = (re_trace_product(s1, sp_.basis[j]) + re_trace_product(s2, sp_.basis_pt[j])) / norm;
      r2 += r * r;
    }
    const double dual = (re_trace_product(s1, sp_.x0) + re_trace_product(s2, sp_.x0_pt)) / norm;
    return dual + kCoordinateBound * std::sqrt(r2);
  }

 private:
  static double logdet(const Matrix& m) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return -kInf;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double dii = llt.matrixLLT()(i, i).real();
      if (!(dii > 0.0)) return -kInf;
      acc += 2.0 * std::log(dii);
    }
    return acc;
  }

  const AffineSpace& sp_;
  std::size_t d_;
  std::size_t p_;
};

void check_options(const SolverOptions& o) {
  if (!(o.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");
  if (!(o.gap_tol > 0.0)) throw InvalidArgument("gap tolerance must be positive");
  if (o.max_iter <= 0) throw InvalidArgument("max_iter must be positive");
}

}  // namespace

double ConstraintSet::residual(const Matrix& rho) const {
  double r = 0.0;
  for (const auto& k : constraints) r = std::max(r, std::abs(re_trace_product(rho, k.op) - k.target));
  return r;
}

ConstraintSet build_constraints(double v_z, double v_xy, const measurement::AnalyzerEfficiencies& eff,
                                std::optional<double> arrival) {
  if (!(std::abs(v_z) <= 1.0) || !(std::abs(v_xy) <= 1.0)) {
    throw InvalidArgument("visibilities must lie in [-1, 1]");
  }
  if (arrival && !(*arrival > 0.0 && *arrival <= 1.0)) {
    throw InvalidArgument("arrival probability must lie in (0, 1]");
  }
  eff.validate();
  ConstraintSet c;
  c.v_z = v_z;
  c.v_xy = v_xy;
  c.eff = eff;
  c.arrival = arrival;
  const auto a = measurement::alice_povm();
  const auto b = measurement::bob_povm(eff);
  c.constraints.push_back({quantum::identity(6), 1.0, "trace"});
  if (arrival) {
    Matrix photon = Matrix::Identity(3, 3);
    photon(0, 0) = 0.0;
    c.constraints.push_back({kron(quantum::identity(2), photon), *arrival, "arrival"});
  }
  auto form = [](const Matrix& plus, const Matrix& minus, double v) -> Matrix {
    return (plus - minus) - v * (plus + minus);
  };
  c.constraints.push_back({form(kron(a.h, b.early), kron(a.v, b.early), v_z), 0.0, "v_plus_z"});
  c.constraints.push_back({form(kron(a.v, b.late), kron(a.h, b.late), v_z), 0.0, "v_minus_z"});
  c.constraints.push_back({form(kron(a.d, b.middle), kron(a.a, b.middle), v_xy), 0.0, "v_xy"});
  c.rank = make_affine(c).rank;
  if (c.rank < c.constraints.size()) {
    c.warnings.push_back("constraint map is rank deficient (rank " + std::to_string(c.rank) + " of " +
                         std::to_string(c.constraints.size()) + ")");
  }
  return c;
}

ConstraintSet block_diagonal_restriction(const ConstraintSet& c) {
  const std::size_t d = c.dim();
  for (const auto& k : c.constraints) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        if (is_vacuum(i, c.dim_b) != is_vacuum(j, c.dim_b) && std::abs(k.op(i, j)) > 1e-14) {
          throw StructureError("constraint '" + k.label + "' couples the vacuum and photon blocks");
        }
      }
    }
  }
  ConstraintSet out = c;
  out.block_diagonal = true;
  return out;
}

FeasibilityReport sdp_feasible(const ConstraintSet& c, const SolverOptions& opt) {
  check_options(opt);
  const std::size_t d = c.dim();
  const AffineSpace sp = make_affine(c);
  FeasibilityReport rep;
  if (!sp.consistent) {
    rep.verdict = Verdict::kInfeasible;
    rep.margin = rep.margin_upper = -kInf;
    rep.witness = sp.x0;
    return rep;
  }
  const Barrier bar(sp, d);
  const auto n = static_cast<Eigen::Index>(bar.size());
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  z(n - 1) = std::min(smallest_eigenvalue(sp.x0), smallest_eigenvalue(sp.x0_pt)) - 1.0;

  double s = 1.0;
  double lower = -kInf, upper = kInf;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  Matrix s1, s2;
  bool stalled = false;
  auto decided = [&] {
    if (upper - lower > opt.gap_tol) return false;
    return lower >= -opt.tol || upper < -opt.tol;
  };
  while (rep.iterations < opt.max_iter && !stalled) {
    // Centering.
    bool centered = false;
    while (rep.iterations < opt.max_iter) {
      bar.derivatives(z, s, g, h, s1, s2);
      const Eigen::MatrixXd neg = -h;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
      const Eigen::VectorXd dz = ldlt.solve(g);
      const double dec2 = g.dot(dz);
      ++rep.iterations;
      if (!(dec2 >= 0.0) || !dz.allFinite()) {
        stalled = true;
        break;
      }
      if (dec2 < 1e-10) {
        centered = true;
        break;
      }
      const double f0 = bar.value(z, s);
      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const Eigen::VectorXd trial = z + step * dz;
        const double f1 = bar.value(trial, s);
        if (f1 >= f0 + 0.01 * step * dec2) {
          z = trial;
          moved = true;
          // Progress below round-off: as centered as this precision allows.
          if (dec2 < 1e-6 && f1 - f0 <= 1e-14 * std::max(1.0, std::abs(f0))) centered = true;
          break;
        }
        step *= 0.5;
      }
      if (centered) break;
      if (!moved) {
        // Round-off floor: treat as centered if the decrement is already tiny.
        centered = dec2 < 1e-6;
        if (!centered) stalled = true;
        break;
      }
    }
    if (!centered) break;
    ++rep.outer_iterations;
    lower = std::max(lower, z(n - 1));
    bar.derivatives(z, s, g, h, s1, s2);
    upper = std::min(upper, bar.dual_bound(s1, s2));
    if (decided()) break;
    if (s > 1e15) {
      stalled = true;
      break;
    }
    s *= 10.0;
  }

  Matrix f1, f2;
  bar.assemble(z, f1, f2);
  const double t = z(n - 1);
  rep.witness = f1;
  rep.witness.diagonal().array() += t;
  rep.margin = lower;
  rep.margin_upper = upper;
  rep.constraint_residual = c.residual(rep.witness);
  rep.min_eig_rho = smallest_eigenvalue(rep.witness);
  rep.min_eig_pt = smallest_eigenvalue(quantum::partial_transpose(rep.witness, c.dim_a, c.dim_b));
  if (lower >= -opt.tol) {
    rep.verdict = Verdict::kFeasible;
  } else if (upper < -opt.tol) {
    rep.verdict = Verdict::kInfeasible;
  } else {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "no certified verdict after %d Newton steps: margin in [%.3e, %.3e], "
                  "constraint residual %.3e",
                  rep.iterations, lower, upper, rep.constraint_residual);
    throw NonConvergence(buf);
  }
  return rep;
}

ProjectionResult alternating_projection_check(const ConstraintSet& c, int max_iter, double tol) {
  const std::size_t d = c.dim();
  const AffineSpace sp = make_affine(c);
  const auto nb = sp.full_basis.size();
  auto psd = [](const Matrix& x) -> Matrix {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (x + x.adjoint()));
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  };
  auto ppt = [&](const Matrix& x) -> Matrix {
    return quantum::partial_transpose(psd(quantum::partial_transpose(x, c.dim_a, c.dim_b)), c.dim_a,
                                      c.dim_b);
  };
  auto affine = [&](const Matrix& x) -> Matrix {
    Eigen::VectorXd coef(static_cast<Eigen::Index>(nb));
    for (std::size_t i = 0; i < nb; ++i) coef(static_cast<Eigen::Index>(i)) = re_trace_product(sp.full_basis[i], x);
    coef -= sp.a_pinv * (sp.a * coef - sp.b);
    Matrix out = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < nb; ++i) out += coef(static_cast<Eigen::Index>(i)) * sp.full_basis[i];
    return out;
  };
  auto violation = [&](const Matrix& x) {
    const double a = std::max(0.0, -smallest_eigenvalue(x));
    const double b = std::max(0.0, -smallest_eigenvalue(quantum::partial_transpose(x, c.dim_a, c.dim_b)));
    return std::max({a, b, c.residual(x)});
  };
  ProjectionResult r;
  Matrix x = affine(Matrix::Identity(d, d) / static_cast<double>(d));
  Matrix p1 = Matrix::Zero(d, d), p2 = p1, p3 = p1;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    Matrix y = psd(x + p1);
    p1 = x + p1 - y;
    x = y;
    y = ppt(x + p2);
    p2 = x + p2 - y;
    x = y;
    y = affine(x + p3);
    p3 = x + p3 - y;
    x = y;
    r.violation = violation(x);
    if (r.violation < tol) {
      r.feasible = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, max_iter);
  r.point = x;
  return r;
}

bool ppt_oracle(const quantum::DensityMatrix& rho) {
  const Matrix pt = quantum::partial_transpose(rho.matrix(), rho.dim_a(), rho.dim_b());
  return quantum::min_eigenvalue(pt) < -1e-10;
}

std::vector<BoundaryPoint> boundary_scan(const std::vector<double>& v_z_grid,
                                         const measurement::AnalyzerEfficiencies& eff,
                                         const BoundaryOptions& opt) {
  if (!(opt.resolution > 0.0)) throw InvalidArgument("resolution must be positive");
  for (double v : v_z_grid) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("v_z grid values must lie in [0, 1]");
  }
  auto solve = [&](double vz, double vxy) {
    ConstraintSet c = build_constraints(vz, vxy, eff, opt.arrival);
    if (opt.block_diagonal) c = block_diagonal_restriction(c);
    return sdp_feasible(c, opt.solver);
  };
  auto one = [&](double vz) {
    BoundaryPoint bp;
    bp.v_z = vz;
    FeasibilityReport top = solve(vz, 1.0);
    bp.iterations += top.iterations;
    if (top.feasible()) {
      bp.threshold = 1.0;
      bp.feasible_at_one = true;
      bp.margin = top.margin;
      return bp;
    }
    FeasibilityReport at_hi = top;
    double lo = 0.0, hi = 1.0;
    FeasibilityReport bottom = solve(vz, 0.0);
    bp.iterations += bottom.iterations;
    if (!bottom.feasible()) {
      bp.threshold = 0.0;
      bp.margin = bottom.margin;
      return bp;
    }
    while (hi - lo > opt.resolution) {
      const double mid = 0.5 * (lo + hi);
      FeasibilityReport r;
      try {
        r = solve(vz, mid);
      } catch (const NonConvergence&) {
        // |t*| within tolerance of zero: entanglement not certified here.
        lo = mid;
        continue;
      }
      bp.iterations += r.iterations;
      if (r.feasible()) {
        lo = mid;
      } else {
        hi = mid;
        at_hi = std::move(r);
      }
    }
    bp.threshold = hi;
    bp.margin = at_hi.margin;
    return bp;
  };

  std::vector<BoundaryPoint> out(v_z_grid.size());
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1 || v_z_grid.size() < 2) {
    for (std::size_t i = 0; i < v_z_grid.size(); ++i) out[i] = one(v_z_grid[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(v_z_grid.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < v_z_grid.size(); i = next++) {
      try {
        out[i] = one(v_z_grid[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(jobs, static_cast<int>(v_z_grid.size())); ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryPoint>& pts,
                        const std::vector<std::pair<std::string, std::string>>& meta) {
  io::CsvWriter w(out, meta, {"v_z", "v_xy_threshold", "margin", "iterations"});
  for (const auto& p : pts) w.row({p.v_z, p.threshold, p.margin, static_cast<double>(p.iterations)});
}

nlohmann::json report_to_json(const ConstraintSet& c, const FeasibilityReport& r) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["v_z"] = c.v_z;
  j["v_xy"] = c.v_xy;
  j["eta_l"] = c.eff.eta_l;
  j["eta_s"] = c.eff.eta_s;
  if (c.arrival) j["arrival"] = *c.arrival;
  j["block_diagonal"] = c.block_diagonal;
  j["verdict"] = r.feasible() ? "feasible" : "infeasible";
  j["entangled"] = !r.feasible();
  j["margin"] = r.margin;
  j["margin_upper"] = r.margin_upper;
  j["iterations"] = r.iterations;
  j["constraint_residual"] = r.constraint_residual;
  j["min_eig_rho"] = r.min_eig_rho;
  j["min_eig_pt"] = r.min_eig_pt;
  if (r.feasible()) j["witness"] = quantum::to_json(r.witness, c.dim_a, c.dim_b);
  return j;
}

}  // namespace mmtqa::verify
