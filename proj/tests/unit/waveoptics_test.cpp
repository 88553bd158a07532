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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mmtqa/errors.hpp"

namespace mmtqa::waveoptics {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambda = 776e-9;

struct Moments {
  double cx, cy, xx;
};

Moments moments(const ScalarField& f) {
  double p = 0, mx = 0, my = 0, mxx = 0;
  for (std::size_t i = 0; i < f.n; ++i)
    for (std::size_t j = 0; j < f.n; ++j) {
      const double w = std::norm(f.at(i, j));
      const double x = f.coordinate(j), y = f.coordinate(i);
      p += w;
      mx += w * x;
      my += w * y;
      mxx += w * x * x;
    }
  mx /= p;
  my /= p;
  return {mx, my, mxx / p - mx * mx};
}

TEST(Gaussian, UnitPowerAndWidth) {
  const double sigma = 1e-3;
  const auto f = make_gaussian(sigma, 256, 16 * sigma, kLambda);
  EXPECT_NEAR(f.power(), 1.0, 1e-12);
  const auto m = moments(f);
  EXPECT_NEAR(m.cx, 0.0, 1e-15);
  EXPECT_NEAR(m.xx, sigma * sigma / 4.0, 1e-6 * sigma * sigma);
}

TEST(Gaussian, Errors) {
  EXPECT_THROW(make_gaussian(1e-3, 256, 10e-3, kLambda), InvalidArgument);
  EXPECT_THROW(make_gaussian(1e-3, 64, 200e-3, kLambda), GridResolutionError);
  EXPECT_THROW(make_gaussian(1e-3, 100, 16e-3, kLambda), InvalidArgument);
}

TEST(Propagation, GaussianWidthFollowsRayleighLaw) {
  const double sigma = 0.2e-3;
  const auto f = make_gaussian(sigma, 512, 40 * sigma, kLambda);
  const double zr = kPi * sigma * sigma / kLambda;
  for (double z : {0.05, 0.15, 0.3}) {
    const auto g = propagate(f, z);
    const double ratio = moments(g).xx / moments(f).xx;
    // Paraxial law; the exact spectrum deviates at order (lambda / sigma)^2.
    const double paraxial = 1.0 + (z / zr) * (z / zr);
    EXPECT_NEAR(ratio / paraxial, 1.0, 2e-5) << z;
  }
}

TEST(Propagation, Unitary) {
  const auto a = make_speckle(20, 1, 256, 8e-3, kLambda, {0.3e-3});
  const auto b = make_speckle(20, 2, 256, 8e-3, kLambda, {0.3e-3});
  const auto pa = propagate(a, 0.2);
  const auto pb = propagate(b, 0.2);
  EXPECT_NEAR(pa.power(), a.power(), 1e-12);
  EXPECT_NEAR(std::abs(inner_product(pa, pb) - inner_product(a, b)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(inner_product(propagate(pa, -0.2), a)), 1.0, 1e-12);
}

TEST(Propagation, AliasingDetected) {
  const auto f = make_gaussian(0.05e-3, 256, 1e-3, kLambda);
  EXPECT_THROW(propagate(f, 5.0), AliasingError);
}

TEST(ShiftTilt, MovesCentroidAndInverts) {
  const double sigma = 1e-3;
  const auto f = make_gaussian(sigma, 256, 16 * sigma, kLambda);
  const auto g = shift_and_tilt(f, 0.7e-3, 2e-3);
  EXPECT_NEAR(moments(g).cx, 0.7e-3, 1e-9);
  EXPECT_NEAR(g.power(), 1.0, 1e-12);
  const auto back = shift_and_tilt(g, -0.7e-3, -2e-3);
  EXPECT_NEAR(std::abs(inner_product(back, f)), 1.0, 1e-12);
  EXPECT_THROW(shift_and_tilt(f, 4.1e-3, 0.0), ShiftTooLargeError);
}

TEST(Speckle, DeterministicAndNormalized) {
  const auto a = make_speckle(50, 7, 512, 24e-3, kLambda);
  const auto b = make_speckle(50, 7, 512, 24e-3, kLambda);
  EXPECT_EQ(a.data, b.data);
  EXPECT_NEAR(a.power(), 1.0, 1e-12);
  const auto c = make_speckle(50, 8, 512, 24e-3, kLambda);
  EXPECT_LT(std::abs(inner_product(a, c)), 0.5);
  EXPECT_THROW(make_speckle(50, 7, 64, 24e-3, kLambda), GridResolutionError);
}

TEST(Interfere, GaussianAgreesWithClosedForm) {
  geometry::InterferometerGeometry geom;
  const auto f = make_gaussian(geom.sigma, kDefaultGrid, kDefaultExtentSigmas * geom.sigma, geom.wavelength);
  for (double alpha : {0.0, 1e-3, 1.7e-3}) {
    EXPECT_NEAR(interfere(f, geom, alpha, false), geometry::visibility(geom, alpha), 1.5e-3) << alpha;
    EXPECT_NEAR(interfere(f, geom, alpha, true), geom.v0, 1e-9) << alpha;
  }
}

TEST(Interfere, SpeckleCollapsesWithoutRelay) {
  geometry::InterferometerGeometry geom;
  const double extent = kDefaultExtentSigmas * geom.sigma;
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto f = make_speckle(50, seed, kDefaultGrid, extent, geom.wavelength);
    EXPECT_LT(interfere(f, geom, 1.7e-3, false), 0.5) << seed;
    EXPECT_NEAR(interfere(f, geom, 1.7e-3, true), geom.v0, 1e-9) << seed;
  }
}

TEST(Output, FieldCsv) {
  const auto f = make_gaussian(1e-3, 64, 16e-3, kLambda);
  std::ostringstream os;
  write_field_csv(os, f, {}, 8);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 2u + 64u);
}

}  // namespace
}  // namespace mmtqa::waveoptics
