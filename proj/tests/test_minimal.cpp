#include "conemin/fixtures.h"
#include "conemin/minimal.h"
#include "conemin/teich.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace conemin;

namespace {

struct Solved {
  ConeSurface g1, g2;
  TeichProblem tp;
  DescentResult r;
  Solved(int n, bool descend)
      : g1(buildConeTorusGrid(0.25, n)), g2(buildConeTorusGrid(0.4, n, 0.75)),
        tp(TorusChart::forGrid(g1, 0.25), g1, g2) {
    if (descend) {
      r = tp.descend({});
    } else {
      r.state.tau = Complex(-0.3, 1.4);
      r.energy = tp.totalEnergy(r.state);
    }
  }
  ProductGraph graph() const { return assemble(tp.problem1(), r.energy.u1, tp.problem2(), r.energy.u2); }
};

} // namespace

TEST_CASE("diagonal graph of the identity") {
  const ConeSurface s = buildConeTorus(0.25, 0.3);
  // area and energy agree face by face only for the cotangent energy
  const HarmonicProblem p(s, s);
  const VertexMap id = VertexMap::identity(s);
  const ProductGraph g = assemble(p, id, p, id);
  for (int e = 0; e < s.numEdges(); ++e) CHECK(g.lengths[e] == doctest::Approx(std::sqrt(2.0) * s.length(e)).epsilon(1e-12));
  const Certificate c = conformalityCertificate(g);
  CHECK(c.maxHopfSum <= 1e-8);
  CHECK(std::abs(c.gapRatio()) <= 1e-8);
  CHECK(compositionError(g) < 1e-12);

  StabilityOptions o;
  o.samples = 5;
  const StabilityReport r = stabilitySuite(g, o);
  CHECK_FALSE(r.hypothesis);
  for (int f = 0; f < s.numFaces(); ++f) {
    CHECK(r.e1[f] == doctest::Approx(r.e2[f]).epsilon(1e-12));
    if (std::isfinite(r.w1[f])) CHECK(r.w1[f] == r.w2[f]);
  }
  CHECK(r.ePassRate == 1.0);
  CHECK(r.minSecondVariation > 0.0);
}

TEST_CASE("power law extrapolation") {
  const std::array<double, 3> h{0.2, 0.1, 0.05};
  std::array<double, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = 1.5 + 2.0 * std::pow(h[i], 0.7);
  const PowerLawLimit L = extrapolatePowerLaw(h, v);
  CHECK(L.limit == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(L.exponent == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(L.coefficient == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(extrapolatePowerLaw(h, {1.0, 0.5, 0.7}), Error);
  CHECK_THROWS_AS(extrapolatePowerLaw({0.1, 0.2, 0.05}, v), Error);
}

TEST_CASE("composition through the two graphs is consistent") {
  const Solved s(12, false);
  CHECK(compositionError(s.graph()) <= 1e-10);
}

TEST_CASE("critical structure against a non-critical one") {
  const Solved crit(12, true), off(12, false);
  const Certificate a = conformalityCertificate(crit.graph()), b = conformalityCertificate(off.graph());
  CHECK(a.maxHopfSum < b.maxHopfSum);
  CHECK(a.gapRatio() < b.gapRatio());
  CHECK(b.gapRatio() > 1e-3);
  CHECK(a.gapRatio() >= -1e-12);
}

TEST_CASE("graph area dominates the target areas") {
  const Solved s(12, true);
  const ProductGraph g = s.graph();
  const double A = graphArea(g);
  CHECK(A >= 0.98 * std::max(targetArea(s.g1), targetArea(s.g2)));
  CHECK(A <= s.r.energy.E * (1.0 + 1e-12));
  // the induced cone angle sits between 2 pi beta and 2 pi
  const double theta = graphAngleSum(g, 0);
  CHECK(theta > 0.5 * M_PI);
  CHECK(theta < 2.0 * M_PI);
}

TEST_CASE("induced cone angle decreases under refinement") {
  double prev = 2.0 * M_PI;
  for (int n : {8, 16}) {
    const Solved s(n, true);
    const double theta = graphAngleSum(s.graph(), 0);
    CHECK(theta < prev);
    prev = theta;
  }
}

TEST_CASE("stability report on the critical graph") {
  const Solved s(12, true);
  StabilityOptions o;
  o.samples = 6;
  o.epsH = 5.0 / 12.0;
  const ProductGraph g = s.graph();
  const StabilityReport r = stabilitySuite(g, o);
  CHECK(r.hypothesis);
  CHECK(r.samples.size() == 6);
  CHECK(r.wCompared > 0);
  CHECK(r.wPassRate >= 0.95);
  for (const auto& x : r.samples) CHECK(x.secondVariation == doctest::Approx(x.energyTerm - x.hopfTerm));
  const SlopeFit fit = wDifferenceSlope(g, 0);
  CHECK(fit.points > 0);
  CHECK(fit.slope > 0.0);

  writeMarkedProfileCsv(g, r, 0.2, "test_minimal_profile.csv");
  std::ifstream in("test_minimal_profile.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("vertex,face,", 0) == 0);
  std::remove("test_minimal_profile.csv");
}
