#include "conemin/errors.h"
#include "conemin/hyperbolic.h"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace conemin;
using std::numbers::pi;

namespace {

HPoint randomPoint(std::mt19937_64& rng, double maxRadius = 3.0) {
  std::uniform_real_distribution<double> r(0.0, maxRadius), a(0.0, 2.0 * pi);
  return HPoint::fromPolar(r(rng), a(rng));
}

} // namespace

TEST_CASE("dist basics") {
  const HPoint o;
  CHECK(dist(o, o) == 0.0);
  CHECK(dist(o, HPoint::fromAmbient({std::sinh(1.0), 0.0, std::cosh(1.0)})) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("dist agrees with the Poincare disk formula") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const HPoint a = randomPoint(rng), b = randomPoint(rng);
    worst = std::max(worst, std::abs(dist(a, b) - poincareDist(a.toPoincare(), b.toPoincare())));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("dist is a metric on random triples") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const HPoint a = randomPoint(rng), b = randomPoint(rng), c = randomPoint(rng);
    CHECK(dist(a, b) >= 0.0);
    CHECK(dist(a, b) == doctest::Approx(dist(b, a)).epsilon(1e-14));
    CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-10);
  }
}

TEST_CASE("points stay on the hyperboloid") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const HPoint a = randomPoint(rng), b = randomPoint(rng);
    const HPoint m = geodesicPoint(a, b, 0.37);
    CHECK(std::abs(minkowski(m.ambient(), m.ambient()) + 1.0) < 1e-12);
    CHECK(dist(a, m) == doctest::Approx(0.37 * dist(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("exp and log are inverse") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const HPoint a = randomPoint(rng), b = randomPoint(rng);
    const Vec3 v = logMap(a, b);
    CHECK(std::abs(minkowski(v, a.ambient())) < 1e-9);
    CHECK(tangentNorm(v) == doctest::Approx(dist(a, b)).epsilon(1e-12));
    CHECK(dist(expMap(a, v), b) < 1e-9);
  }
}

TEST_CASE("parallel transport is an isometry along the geodesic") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n;
  for (int i = 0; i < 200; ++i) {
    const HPoint a = randomPoint(rng), b = randomPoint(rng);
    const Vec3 v = projectTangent(a, Vec3(n(rng), n(rng), n(rng)));
    const Vec3 w = transport(a, b, v);
    CHECK(std::abs(minkowski(w, b.ambient())) < 1e-9);
    CHECK(tangentNorm(w) == doctest::Approx(tangentNorm(v)).epsilon(1e-10));
    // the geodesic direction is carried to itself
    const Vec3 dirA = logMap(a, b);
    const Vec3 dirB = -logMap(b, a);
    CHECK(tangentNorm(transport(a, b, dirA) - dirB) < 1e-9 * (1.0 + tangentNorm(dirA)));
  }
}

TEST_CASE("lorentz cross rotates counter-clockwise") {
  const HPoint o;
  const HPoint b = HPoint::fromPolar(1.0, 0.0);
  const HPoint c = placeThird(o, b, 1.0, 1.0);
  CHECK(orientation(o, b, c) > 0.0);
  CHECK(c.angle() > 0.0);
  CHECK(dist(o, c) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dist(b, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("projective barycentrics round-trip") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int i = 0; i < 100; ++i) {
    const std::array<HPoint, 3> v{randomPoint(rng), randomPoint(rng), randomPoint(rng)};
    double b0 = u(rng), b1 = u(rng), b2 = u(rng);
    const double s = b0 + b1 + b2;
    const std::array<double, 3> b{b0 / s, b1 / s, b2 / s};
    const auto back = projectiveBarycentric(v, projectiveCombination(v, b));
    for (int k = 0; k < 3; ++k) CHECK(back[k] == doctest::Approx(b[k]).epsilon(1e-8));
  }
}

TEST_CASE("cone chart oracle and round trip") {
  const ConeChart half{0.5};
  const auto [rho, theta] = half.toCylindrical(Complex(0.09, 0.0));
  CHECK(rho == doctest::Approx(2.0 * std::atanh(0.6)).epsilon(1e-12));
  CHECK(rho == doctest::Approx(1.38629).epsilon(1e-5));
  CHECK(theta == doctest::Approx(0.0));

  std::mt19937_64 rng(17);
  for (double alpha : {0.1, 0.25, 0.45, 0.8}) {
    const ConeChart ch{alpha};
    std::uniform_real_distribution<double> r(0.05, 4.0), t(0.0, 2.0 * pi * alpha);
    for (int i = 0; i < 100; ++i) {
      const double r0 = r(rng), t0 = t(rng);
      const auto [r1, t1] = ch.toCylindrical(ch.fromCylindrical(r0, t0));
      CHECK(std::abs(r1 - r0) < 1e-10);
      CHECK(std::abs(t1 - t0) < 1e-10);
    }
  }
  CHECK_THROWS_AS(half.fromCylindrical(0.0, 0.1), Error);
}

TEST_CASE("cone chart metric pullback") {
  std::mt19937_64 rng(19);
  for (double alpha : {0.2, 0.3, 0.45}) {
    const ConeChart ch{alpha};
    std::uniform_real_distribution<double> r(0.1, 3.0), t(0.01, 2.0 * pi * alpha - 0.01);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double rho = r(rng), theta = t(rng), eps = 1e-6;
      const Complex z = ch.fromCylindrical(rho, theta);
      const Complex zr = (ch.fromCylindrical(rho + eps, theta) - ch.fromCylindrical(rho - eps, theta)) / (2 * eps);
      const Complex zt = (ch.fromCylindrical(rho, theta + eps) - ch.fromCylindrical(rho, theta - eps)) / (2 * eps);
      const double s2 = ch.conformalFactor(z);
      const double grr = s2 * std::norm(zr);
      const double gtt = s2 * std::norm(zt);
      const double grt = s2 * (std::conj(zr) * zt).real();
      const double sh2 = std::sinh(rho) * std::sinh(rho);
      worst = std::max({worst, std::abs(grr - 1.0), std::abs(gtt / sh2 - 1.0), std::abs(grt) / std::sinh(rho)});
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("solve_triangle oracles") {
  const double l = std::acosh(3.0);
  const HTriangle eq = solveTriangle(l, l, l);
  for (double a : eq.angles) CHECK(a == doctest::Approx(std::acos(0.75)).epsilon(1e-12));
  CHECK(eq.angles[0] == doctest::Approx(0.72273).epsilon(1e-5));

  const HTriangle tiny = solveTriangle(1e-4, 1e-4, 1e-4);
  for (double a : tiny.angles) CHECK(std::abs(a - pi / 3) < 1e-7);

  const HTriangle sc = solveTriangle(1.0, 1.2, 1.5);
  CHECK(sc.angleSum() < pi);
  for (int k = 0; k < 3; ++k) {
    const double li = sc.lengths[k], lj = sc.lengths[(k + 1) % 3], lk = sc.lengths[(k + 2) % 3];
    const double c = (std::cosh(lj) * std::cosh(lk) - std::cosh(li)) / (std::sinh(lj) * std::sinh(lk));
    CHECK(std::cos(sc.angles[k]) == doctest::Approx(c).epsilon(1e-10));
  }

  CHECK_THROWS_AS(solveTriangle(1.0, 1.0, 2.0), Error);
  CHECK_THROWS_AS(solveTriangle(0.0, 1.0, 1.0), Error);
}

TEST_CASE("solve_triangle is consistent with ASA and realization") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  int tested = 0;
  while (tested < 200) {
    const double a = u(rng), b = u(rng), c = u(rng);
    if (a >= b + c || b >= a + c || c >= a + b) continue;
    ++tested;
    const HTriangle t = solveTriangle(a, b, c);
    const HTriangle r = solveTriangleASA(t.angles[1], a, t.angles[2]);
    CHECK(r.lengths[1] == doctest::Approx(b).epsilon(1e-8));
    CHECK(r.lengths[2] == doctest::Approx(c).epsilon(1e-8));
    CHECK(r.angles[0] == doctest::Approx(t.angles[0]).epsilon(1e-8));
    const HTriangle s = solveTriangleSAS(b, c, t.angles[0]);
    CHECK(s.lengths[0] == doctest::Approx(a).epsilon(1e-8));
    const auto v = t.realize();
    CHECK(dist(v[1], v[2]) == doctest::Approx(a).epsilon(1e-10));
    CHECK(dist(v[0], v[2]) == doctest::Approx(b).epsilon(1e-10));
    CHECK(dist(v[0], v[1]) == doctest::Approx(c).epsilon(1e-10));
    CHECK(orientation(v[0], v[1], v[2]) > 0.0);
  }
}

TEST_CASE("cone separation bound") {
  CHECK(coneSeparationBound(0.25, 0.25) == doctest::Approx(std::acosh(3.0)).epsilon(1e-13));
  CHECK(coneSeparationBound(0.25, 0.25) == doctest::Approx(1.76275).epsilon(1e-5));
  CHECK(coneSeparationBound(1e-3, 1e-3) > 10.0);
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(0.01 + 0.48 * i / 19.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double v = coneSeparationBound(grid[i], grid[j]);
      CHECK(v == doctest::Approx(coneSeparationBound(grid[j], grid[i])).epsilon(1e-14));
      if (i + 1 < grid.size()) CHECK(coneSeparationBound(grid[i + 1], grid[j]) < v);
      if (j + 1 < grid.size()) CHECK(coneSeparationBound(grid[i], grid[j + 1]) < v);
    }
  }
  CHECK_THROWS_AS(coneSeparationBound(0.5, 0.2), Error);
  CHECK_THROWS_AS(coneSeparationBound(0.0, 0.2), Error);
}

TEST_CASE("weighted centroid") {
  std::mt19937_64 rng(29);
  const HPoint p = randomPoint(rng);
  {
    const std::vector<HPoint> pts{p};
    const std::vector<double> w{1.0};
    CHECK(dist(weightedCentroid(pts, w).point, p) < 1e-12);
  }
  {
    const HPoint q = randomPoint(rng);
    const std::vector<HPoint> pts{p, q};
    const std::vector<double> w{1.0, 1.0};
    const HPoint m = weightedCentroid(pts, w).point;
    CHECK(std::abs(dist(m, p) - dist(m, q)) < 1e-10);
  }
  std::uniform_real_distribution<double> wd(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<HPoint> pts{randomPoint(rng), randomPoint(rng), randomPoint(rng)};
    const std::vector<double> w{wd(rng), wd(rng), wd(rng)};
    const CentroidResult res = weightedCentroid(pts, w);
    CHECK(res.gradientNorm < 1e-10);
    auto value = [&](const HPoint& x) {
      double f = 0.0;
      for (int i = 0; i < 3; ++i) f += w[i] * dist(x, pts[i]) * dist(x, pts[i]);
      return f;
    };
    for (const HPoint& x : pts) CHECK(value(res.point) < value(x));
  }
  const std::vector<HPoint> pts{p};
  const std::vector<double> zero{0.0};
  CHECK_THROWS_AS(weightedCentroid(pts, zero), Error);
}
