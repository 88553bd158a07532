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

#include "mmtqa/measurement.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "mmtqa/errors.hpp"

namespace mmtqa::measurement {

using quantum::Complex;

void AnalyzerEfficiencies::validate() const {
  auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!ok(eta_l) || !ok(eta_s)) {
    throw InvalidArgument("analyzer efficiencies must lie in [0, 1]");
  }
}

AlicePovm alice_povm() {
  AlicePovm p;
  p.h = Matrix::Zero(2, 2);
  p.h(0, 0) = 1.0;
  p.v = Matrix::Zero(2, 2);
  p.v(1, 1) = 1.0;
  p.d = Matrix::Constant(2, 2, 0.5);
  p.a.resize(2, 2);
  p.a << 0.5, -0.5, -0.5, 0.5;
  return p;
}

Matrix alice_phase_projector(double phi, int sign) {
  quantum::Vector k(2);
  k << 1.0, static_cast<double>(sign) * std::polar(1.0, phi);
  return 0.5 * k * k.adjoint();
}

Matrix alice_xz_projector(double theta, int sign) {
  const Matrix obs = std::cos(theta) * quantum::pauli_z() + std::sin(theta) * quantum::pauli_x();
  return 0.5 * (quantum::identity(2) + static_cast<double>(sign) * obs);
}

BobPovm bob_povm(const AnalyzerEfficiencies& eff, double phase) {
  eff.validate();
  BobPovm p;
  p.early = Matrix::Zero(3, 3);
  p.early(1, 1) = 0.25 * eff.eta_s;
  p.late = Matrix::Zero(3, 3);
  p.late(2, 2) = 0.25 * eff.eta_l;
  const double cross = std::sqrt(eff.eta_l * eff.eta_s);
  p.middle = Matrix::Zero(3, 3);
  p.middle(1, 1) = 0.25 * eff.eta_l;
  p.middle(1, 2) = 0.25 * cross * std::polar(1.0, -phase);
  p.middle(2, 1) = 0.25 * cross * std::polar(1.0, phase);
  p.middle(2, 2) = 0.25 * eff.eta_s;
  p.no_click = quantum::identity(3) - p.early - p.late - p.middle;
  return p;
}

TimeBinMeasurement ideal_timebin_measurement(double phase) {
  TimeBinMeasurement m;
  m.early = Matrix::Zero(2, 2);
  m.early(0, 0) = 0.25;
  m.late = Matrix::Zero(2, 2);
  m.late(1, 1) = 0.25;
  quantum::Vector k(2);
  k << 1.0, std::polar(1.0, phase);
  m.middle = 0.25 * k * k.adjoint();
  return m;
}

TimeBinMeasurement lossy_timebin_measurement(const AnalyzerEfficiencies& eff, double phase) {
  BobPovm p = bob_povm(eff, phase);
  return {std::move(p.early), std::move(p.late), std::move(p.middle)};
}

PovmDiagnostics validate_povm(std::span<const Matrix> elements, double tol) {
  PovmDiagnostics out;
  if (elements.empty()) {
    out.valid = false;
    out.failures.emplace_back("no elements");
    return out;
  }
  const auto n = elements.front().rows();
  Matrix sum = Matrix::Zero(n, n);
  char buf[160];
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const Matrix& e = elements[k];
    if (e.rows() != n || e.cols() != n) throw DimensionMismatch("POVM elements differ in dimension");
    if (quantum::hermiticity_defect(e) > tol) {
      out.valid = false;
      std::snprintf(buf, sizeof buf, "element %zu is not Hermitian (defect %.3e)", k,
                    quantum::hermiticity_defect(e));
      out.failures.emplace_back(buf);
      out.elements.push_back({});
      sum += e;
      continue;
    }
    const auto eig = quantum::eig_hermitian(e);
    PovmElementReport r{eig.values(0), eig.values(n - 1)};
    if (r.min_eigenvalue < -tol) {
      out.valid = false;
      std::snprintf(buf, sizeof buf, "element %zu is not positive: min eigenvalue %.6e", k,
                    r.min_eigenvalue);
      out.failures.emplace_back(buf);
    }
    if (r.max_eigenvalue > 1.0 + tol) {
      out.valid = false;
      std::snprintf(buf, sizeof buf, "element %zu exceeds identity: max eigenvalue %.6e", k,
                    r.max_eigenvalue);
      out.failures.emplace_back(buf);
    }
    out.elements.push_back(r);
    sum += e;
  }
  out.completeness_residual = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (out.completeness_residual > tol) {
    out.valid = false;
    std::snprintf(buf, sizeof buf, "elements do not sum to identity: residual %.6e",
                  out.completeness_residual);
    out.failures.emplace_back(buf);
  }
  return out;
}

}  // namespace mmtqa::measurement
