#include "conemin/radial.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace conemin;

TEST_CASE("equal angles give the identity profile") {
  const RadialProfile p = solveRadial(0.3, 0.3, 1.0, 1.0);
  CHECK(p.c == doctest::Approx(1.0).epsilon(1e-9));
  for (double r : {0.01, 0.2, 0.5, 0.9, 1.0}) CHECK(std::abs(p.value(r) - r) < 1e-9);
  CHECK(std::abs(p.hopf(0.5)) < 1e-8);
}

TEST_CASE("conformal solution between cones of angles 0.3 and 0.45") {
  const RadialProfile p = solveRadial(0.3, 0.45, 1.0, 1.0);
  // regression value of the leading coefficient f ~ c rho^k
  CHECK(p.c == doctest::Approx(1.0401810907).epsilon(1e-8));
  CHECK(p.value(1.0) == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < p.f.size(); ++i) {
    CHECK(p.f[i] > p.f[i - 1]);
    CHECK(p.fPrime[i] > 0.0);
  }
  // f(rho) < rho on (0, R): the target cone is wider
  for (double r : {0.1, 0.3, 0.6, 0.9}) CHECK(p.value(r) < r);
  CHECK(std::abs(indicialExponent(p, 1e-3) / p.k() - 1.0) < 0.05);
  CHECK(p.residualBound < 1e-8);
  // the rotationally symmetric solution is conformal
  for (double r : {0.1, 0.5, 0.9}) CHECK(std::abs(p.hopf(r)) < 1e-6 * p.energyDensity(r));
}

TEST_CASE("residual bound tracks the tolerance") {
  const RadialProfile a = solveRadial(0.3, 0.45, 1.0, 0.8, 1e-8), b = solveRadial(0.3, 0.45, 1.0, 0.8, 1e-10);
  CHECK(b.residualBound <= a.residualBound);
  CHECK(a.residualBound <= 1e-7);
}

TEST_CASE("radial profiles are conformal for any boundary radius") {
  // a rotation invariant holomorphic quadratic differential is c dz^2 / z^2,
  // and finite energy at the cone point forces c = 0
  for (double target : {0.6, 1.0, 1.4}) {
    const RadialProfile p = solveRadial(0.3, 0.45, 1.0, target);
    for (double r : {0.2, 0.5, 0.8}) {
      CHECK(std::abs(p.hopf(r)) < 1e-6 * p.energyDensity(r));
      CHECK(std::abs(p.hopf(r)) == doctest::Approx(p.normD(r) * p.normDbar(r)).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("mesh solve converges to the profile") {
  const RadialProfile p = solveRadial(0.3, 0.45, 1.0, 1.0);
  double prev = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const MeshComparison m = compareWithMesh(p, h);
    if (prev > 0.0) CHECK(prev / m.linf >= 1.7);
    CHECK(m.l2 <= m.linf);
    prev = m.linf;
  }
}

TEST_CASE("mesh solve of the identity case is exact") {
  const RadialProfile p = solveRadial(0.3, 0.3, 1.0, 1.0);
  for (double h : {0.2, 0.1}) CHECK(compareWithMesh(p, h, WeightModel::HyperbolicArea).linf < 1e-8);
}

TEST_CASE("profile CSV has one row per sample") {
  const RadialProfile p = solveRadial(0.3, 0.45, 1.0, 1.0);
  const std::string path = "test_radial_profile.csv";
  writeProfileCsv(p, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "rho,f,f_prime,ode_residual");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == p.rho.size());
  std::remove(path.c_str());
}

TEST_CASE("profile matches the closed form of the conformal solution") {
  // f' = k sinh f / sinh rho integrates to tanh(f / 2) = C tanh(rho / 2)^k
  for (double target : {0.6, 1.0, 1.4}) {
    const RadialProfile p = solveRadial(0.3, 0.45, 1.0, target);
    const double k = p.k(), C = std::tanh(target / 2.0) / std::pow(std::tanh(0.5), k);
    CHECK(p.c == doctest::Approx(std::pow(2.0, 1.0 - k) * C).epsilon(1e-6));
    for (double r : {0.05, 0.3, 0.7, 0.95})
      CHECK(std::abs(p.value(r) - 2.0 * std::atanh(C * std::pow(std::tanh(r / 2.0), k))) < 1e-8);
  }
}
