#include "conemin/fixtures.h"
#include "conemin/teich.h"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conemin;

namespace {

double euclideanAngleSum(const ConeSurface& s, const std::vector<double>& l, int v) {
  double sum = 0.0;
  for (int f : s.vertexFaces(v)) {
    const EuclideanFace e = euclideanFace(l[s.faceEdge(f, 0)], l[s.faceEdge(f, 1)], l[s.faceEdge(f, 2)]);
    sum += std::atan2(1.0, e.cot[s.localIndex(f, v)]);
  }
  return sum;
}

FaceTensors randomTensors(const HarmonicProblem& p, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  FaceTensors t(p.domain().numFaces());
  for (auto& m : t) {
    const double a = n(rng), b = n(rng);
    m << a, b, b, -a;
  }
  return t;
}

} // namespace

TEST_CASE("flat chart closes up at every vertex") {
  const ConeSurface g = buildConeTorusGrid(0.25, 8);
  const TorusChart chart = TorusChart::forGrid(g, 1.0);
  for (Complex tau : {Complex(0, 1), Complex(0.3, 0.8), Complex(-0.4, 1.5)}) {
    const auto l = chart.lengths(tau);
    for (int v = 0; v < g.numVertices(); ++v) CHECK(euclideanAngleSum(g, l, v) == doctest::Approx(2.0 * M_PI).epsilon(1e-10));
  }
}

TEST_CASE("cone chart has angle 2 pi beta at the marked vertex only") {
  const ConeSurface g = buildConeTorusGrid(0.25, 16);
  const TorusChart chart = TorusChart::forGrid(g, 0.25);
  const auto l = chart.lengths(Complex(0.2, 1.0));
  CHECK(euclideanAngleSum(g, l, 0) == doctest::Approx(0.5 * M_PI).epsilon(0.05));
  // elsewhere the metric has curvature -(1 - beta) 2 pi / Im tau per unit
  // of flat area, so each vertex carries the angle excess 2 pi (1 - beta) / N
  const double expected = -1.5 * M_PI / g.numVertices();
  double worst = 0.0;
  const auto xi = torusGridCoordinates(16);
  for (int v = 1; v < g.numVertices(); ++v)
    if (xi[v].unaryExpr([](double x) { return x - std::round(x); }).norm() > 0.25) worst = std::max(worst, std::abs(2.0 * M_PI - euclideanAngleSum(g, l, v) - expected));
  CHECK(worst < -0.3 * expected);
  CHECK(chart.surface(Complex(0.2, 1.0)).vertex(0).alpha == 0.25);
}

TEST_CASE("chart Jacobian matches finite differences") {
  const ConeSurface g = buildConeTorusGrid(0.25, 8);
  for (double beta : {1.0, 0.25}) {
    const TorusChart chart = TorusChart::forGrid(g, beta);
    const Complex tau(0.15, 0.9);
    const auto J = chart.squaredLengthJacobian(tau);
    const double h = 1e-6;
    for (int a = 0; a < 2; ++a) {
      const Complex d = a == 0 ? Complex(h, 0) : Complex(0, h);
      const auto lp = chart.lengths(tau + d), lm = chart.lengths(tau - d);
      double worst = 0.0, scale = 0.0;
      for (std::size_t e = 0; e < lp.size(); ++e) {
        const double fd = (lp[e] * lp[e] - lm[e] * lm[e]) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - J[a][e]));
        scale = std::max(scale, std::abs(fd));
      }
      CHECK(worst < 1e-6 * scale);
    }
  }
}

TEST_CASE("pairings are symmetric, bilinear and positive") {
  const ConeSurface g = buildConeTorusGrid(0.25, 6);
  const HarmonicProblem p(g, g);
  std::mt19937_64 rng(3);
  const FaceTensors a = randomTensors(p, rng), b = randomTensors(p, rng), c = randomTensors(p, rng);
  CHECK(wpPairing(p, a, b) == doctest::Approx(wpPairing(p, b, a)).epsilon(1e-13));
  CHECK(wpPairing(p, a, b) == doctest::Approx(8.0 * s2Pairing(p, a, b)).epsilon(1e-13));
  FaceTensors ab = a;
  for (std::size_t f = 0; f < ab.size(); ++f) ab[f] = 2.0 * a[f] - 3.0 * b[f];
  CHECK(wpPairing(p, ab, c) == doctest::Approx(2.0 * wpPairing(p, a, c) - 3.0 * wpPairing(p, b, c)).epsilon(1e-12));
  CHECK(wpPairing(p, a, a) > 0.0);
  CHECK(traceFree(Eigen::Matrix2d::Identity()).norm() < 1e-15);
}

TEST_CASE("metric variation and its adjoint") {
  const ConeSurface g = buildConeTorusGrid(0.25, 6);
  const HarmonicProblem p(g, g);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  std::vector<double> dl(g.numEdges());
  for (double& x : dl) x = n(rng);
  const FaceTensors t = randomTensors(p, rng);
  const auto grad = squaredLengthGradient(p, t);
  double lhs = 0.0;
  for (std::size_t e = 0; e < dl.size(); ++e) lhs += grad[e] * dl[e];
  CHECK(lhs == doctest::Approx(s2Pairing(p, t, metricVariation(p, dl))).epsilon(1e-11));
  // a tensor recovers its own edge values
  const EuclideanFace f = euclideanFace(1.0, 1.2, 0.9);
  const Eigen::Matrix2d h = tensorFromEdges(f, {0.3, -0.2, 0.5});
  const std::array<double, 3> want{0.3, -0.2, 0.5};
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = f.p[(k + 2) % 3] - f.p[(k + 1) % 3];
    CHECK(e.dot(h * e) == doctest::Approx(want[k]).epsilon(1e-12));
  }
}

TEST_CASE("gradient agrees with central differences") {
  const ConeSurface g1 = buildConeTorusGrid(0.25, 8), g2 = buildConeTorusGrid(0.4, 8, 0.75);
  TeichProblem tp(TorusChart::forGrid(g1, 0.25), g1, g2);
  const ConformalState c{Complex(0.1, 1.1)};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> dirs(20, std::vector<double>(g1.numEdges()));
  for (auto& d : dirs)
    for (double& x : d) x = n(rng);
  const auto rows = tp.gradientAudit(c, dirs);
  int pass = 0;
  for (const auto& r : rows) pass += r.relError <= 1e-3;
  CHECK(pass >= 19);

  // and the chart gradient against differences in tau
  const TotalEnergy t = tp.totalEnergy(c);
  const DeformationDirection d = tp.wpGradient(c, t);
  const double h = 1e-5;
  for (int a = 0; a < 2; ++a) {
    const Complex dt = a == 0 ? Complex(h, 0) : Complex(0, h);
    const double fd = (tp.totalEnergy({c.tau + dt}, &t).E - tp.totalEnergy({c.tau - dt}, &t).E) / (2.0 * h);
    CHECK(fd == doctest::Approx(d.chartGradient[a]).epsilon(1e-4));
  }
  CHECK(d.wpNorm() * d.wpNorm() ==
        doctest::Approx(d.chartGradient.dot(d.chartMetric.inverse() * d.chartGradient)).epsilon(1e-10));
}

TEST_CASE("audit rejects zero directions") {
  const ConeSurface g = buildConeTorusGrid(0.25, 6);
  TeichProblem tp(TorusChart::forGrid(g, 0.25), g, g);
  CHECK_THROWS_AS(tp.gradientAudit({}, {std::vector<double>(g.numEdges(), 0.0)}), Error);
  CHECK_THROWS_AS(tp.gradientAudit({}, {std::vector<double>(3, 1.0)}), Error);
}

TEST_CASE("gauge normalization removes scale") {
  const ConeSurface g = buildConeTorusGrid(0.25, 6);
  const auto l = TorusChart::forGrid(g, 0.25).lengths(Complex(0.1, 1.2));
  auto l3 = l;
  for (double& x : l3) x *= 3.0;
  const auto a = gaugeNormalizedLengths(l, g), b = gaugeNormalizedLengths(l3, g);
  for (std::size_t e = 0; e < a.size(); ++e) CHECK(a[e] == doctest::Approx(b[e]).epsilon(1e-13));
}

TEST_CASE("energy dominates twice the target area") {
  const ConeSurface g1 = buildConeTorusGrid(0.25, 8), g2 = buildConeTorusGrid(0.4, 8, 0.75);
  TeichProblem tp(TorusChart::forGrid(g1, 0.25), g1, g2);
  for (Complex tau : {Complex(0, 1), Complex(0.3, 0.7), Complex(-0.2, 1.6)}) {
    const TotalEnergy t = tp.totalEnergy({tau});
    CHECK(t.E == doctest::Approx(t.E1 + t.E2));
    // |dz u|^2 + |dzbar u|^2 >= |dz u|^2 - |dzbar u|^2, up to discretization
    CHECK(t.E1 >= 0.98 * g1.area());
    CHECK(t.E2 >= 0.98 * g2.area());
  }
}

TEST_CASE("descent decreases the energy and converges from several starts") {
  const ConeSurface g1 = buildConeTorusGrid(0.25, 8), g2 = buildConeTorusGrid(0.4, 8, 0.75);
  TeichProblem tp(TorusChart::forGrid(g1, 0.25), g1, g2);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.6, 1.6);
  std::vector<std::vector<double>> L;
  for (int k = 0; k < 3; ++k) {
    const DescentResult r = tp.descend({Complex(re(rng), im(rng))});
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].E <= r.trace[i - 1].E + 1e-12);
    CHECK(r.trace.back().wpGradNorm <= std::max(1e-8, 1e-6 * r.trace.front().wpGradNorm));
    L.push_back(gaugeNormalizedLengths(tp.chart().lengths(r.state.tau), g1));
  }
  double spread = 0.0;
  for (std::size_t k = 1; k < L.size(); ++k)
    for (std::size_t e = 0; e < L[0].size(); ++e) spread = std::max(spread, std::abs(L[k][e] - L[0][e]));
  CHECK(spread < 1e-6);
}

TEST_CASE("energy grows along a degenerating path") {
  const ConeSurface g1 = buildConeTorusGrid(0.25, 8), g2 = buildConeTorusGrid(0.4, 8, 0.75);
  TeichProblem tp(TorusChart::forGrid(g1, 0.25), g1, g2);
  std::vector<std::pair<double, ConformalState>> path;
  for (double t = 1.0; t <= 12.0; t *= 1.5) path.push_back({t, {Complex(0.0, t)}});
  const auto rows = propernessProbe(tp, path);
  // an 8x8 grid stops resolving the thin torus near Im tau = 5
  REQUIRE(rows.size() >= 4);
  for (std::size_t i = 1; i < 4; ++i) CHECK(rows[i].E > rows[i - 1].E);
  CHECK_FALSE(rows.back().valid);
  CHECK(propernessVerdict({{1, 1.0, true}, {2, 4.0, true}, {3, 12.0, true}, {4, 0.0, false}}, 3));
  CHECK_FALSE(propernessVerdict({{1, 1.0, true}, {2, 2.0, true}, {3, 1.5, true}}, 2));
}
