#include "conemin/errors.h"
#include "conemin/fixtures.h"
#include "conemin/surface.h"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace conemin;
using std::numbers::pi;

namespace {

const InvariantCheck* findCheck(const InvariantReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

} // namespace

TEST_CASE("regular cone torus side length") {
  // regular quadrilateral with interior angle pi*alpha/2
  const double expected = 2.0 * std::acosh(std::cos(pi / 4) / std::sin(pi / 16));
  CHECK(torusSideLength(0.25) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(torusSideLength(0.25) == doctest::Approx(3.92).epsilon(1e-2));
}

TEST_CASE("cone torus invariants") {
  const ConeSurface s = buildConeTorus(0.25, 0.5);
  const auto rep = checkInvariants(s);
  CHECK(rep.ok());
  CHECK(s.eulerCharacteristic() == 0);
  CHECK(s.markedVertices() == std::vector<int>{0});
  CHECK(s.area() == doctest::Approx(1.5 * pi).epsilon(1e-4));
  CHECK(std::abs(s.angleSum(0) - 0.5 * pi) < 1e-6);
  CHECK(s.vertexFaces(0).size() >= 8);
  double worst = 0.0;
  for (int v = 1; v < s.numVertices(); ++v) worst = std::max(worst, std::abs(s.angleSum(v) - 2 * pi));
  CHECK(worst < 1e-6);

  const ConeSurface r = buildConeTorus(0.4, 0.5, 0.75);
  CHECK(checkInvariants(r).ok());
  CHECK(r.area() == doctest::Approx(2 * pi * 0.6).epsilon(1e-4));
}

TEST_CASE("tori with different angles share combinatorics") {
  const ConeSurface a = buildConeTorusGrid(0.25, 6), b = buildConeTorusGrid(0.4, 6, 0.75);
  CHECK(a.sameCombinatorics(b));
}

TEST_CASE("refine preserves area and cone angles") {
  const ConeSurface s = buildConeTorus(0.25, 0.8);
  const ConeSurface r = refine(s);
  CHECK(r.numFaces() == 4 * s.numFaces());
  CHECK(r.eulerCharacteristic() == s.eulerCharacteristic());
  CHECK(std::abs(r.area() - s.area()) < 1e-8);
  CHECK(std::abs(r.angleSum(0) - s.angleSum(0)) < 1e-6);
  CHECK(checkInvariants(r).ok());
  const double ratio = r.maxEdgeLength() / s.maxEdgeLength();
  CHECK(ratio > 0.45);
  CHECK(ratio < 0.55);
}

TEST_CASE("cone annulus") {
  const double alpha = 0.3, R = 1.0;
  const double exact = 2 * pi * alpha * (std::cosh(R) - 1);
  double prevErr = 1e9;
  for (double h : {0.1, 0.05, 0.025}) {
    const AnnulusGrid g = annulusGridForResolution(alpha, R, h);
    const ConeSurface s = buildConeAnnulus(g);
    CHECK(checkInvariants(s).ok());
    CHECK(std::abs(s.angleSum(0) - 2 * pi * alpha) < 1e-6);
    const double err = std::abs(s.area() - exact) / exact;
    CHECK(err < prevErr);
    prevErr = err;
    const auto d = geodesicDistances(s, 0);
    for (int j = 0; j < g.sectors; ++j) CHECK(std::abs(d[g.vertex(g.rings, j)] - R) < 1e-4);
  }
  CHECK(prevErr < 1e-3);
}

TEST_CASE("geodesic distance basics") {
  const ConeSurface s = buildConeTorus(0.25, 0.8);
  CHECK(geodesicDistance(s, 5, 5) == 0.0);
  const auto d3 = geodesicDistances(s, 3);
  const auto d9 = geodesicDistances(s, 9);
  CHECK(d3[9] == doctest::Approx(d9[3]).epsilon(0.05));
  for (int e = 0; e < s.numEdges(); ++e) {
    const auto [a, b] = s.edge(e);
    if (a == 3) CHECK(d3[b] <= s.length(e) + 1e-12);
  }
}

TEST_CASE("two-cone torus respects the separation bound") {
  CHECK(coneSeparationBound(0.25, 0.25) == doctest::Approx(1.76275).epsilon(1e-5));
  for (double alpha : {0.1, 0.25, 0.4, 0.45}) {
    const double h = 0.4;
    const ConeSurface s = buildTwoConeTorus(alpha, h);
    CHECK(s.markedVertices().size() == 2);
    CHECK(s.separationApplies());
    InvariantTolerances tol;
    tol.separationSlack = 2 * h;
    const auto rep = checkInvariants(s, tol);
    CHECK(rep.ok());
    CHECK(findCheck(rep, "marked.separation") != nullptr);
    CHECK(s.area() == doctest::Approx(4 * pi * (1 - alpha)).epsilon(1e-4));
  }
}

TEST_CASE("three-cone sphere") {
  const ConeSurface s = buildThreeConeSphere(0.2, 0.25, 0.3, 0.3);
  const auto rep = checkInvariants(s);
  CHECK(rep.ok());
  CHECK(s.eulerCharacteristic() == 2);
  CHECK(!s.separationApplies());
  CHECK(s.area() == doctest::Approx(2 * pi * (1 - 0.75)).epsilon(1e-6));
  for (int k = 0; k < 3; ++k) CHECK(s.vertex(k).marked);
  CHECK_THROWS_AS(buildThreeConeSphere(0.4, 0.4, 0.3, 0.3), Error);
}

TEST_CASE("surface JSON round trip is lossless") {
  const ConeSurface s = buildConeTorus(0.25, 1.0);
  const ConeSurface t = surfaceFromJson(nlohmann::json::parse(surfaceToJson(s).dump()));
  CHECK(t.sameCombinatorics(s));
  for (int e = 0; e < s.numEdges(); ++e) CHECK(t.length(t.edgeId(s.edge(e)[0], s.edge(e)[1])) == s.length(e));
  CHECK(t.vertex(0).marked);
  CHECK(t.vertex(0).alpha == 0.25);
  CHECK_THROWS_AS(surfaceFromJson(nlohmann::json::parse(R"({"vertices": []})")), Error);
}

TEST_CASE("invariant failures are reported") {
  ConeSurface s = buildConeTorus(0.25, 1.0);
  std::vector<double> l = s.lengths();
  l[0] = 100.0;
  s.setLengths(l);
  const auto rep = checkInvariants(s);
  CHECK(!rep.ok());
  CHECK(rep.checks.front().name == "faces.triangle_inequality");
  CHECK_THROWS_AS(buildConeTorus(0.6, 0.5), Error);
  CHECK_THROWS_AS(ConeSurface({{}, {}, {}}, {{0, 1, 2}, {0, 1, 2}}), Error);
}
