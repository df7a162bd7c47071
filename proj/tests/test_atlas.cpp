#include "conemin/atlas.h"
#include "conemin/fixtures.h"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace conemin;

TEST_CASE("vertex charts put the vertex at the origin") {
  const ConeSurface s = buildConeTorus(0.25, 0.8);
  const Atlas a(s);
  for (int f = 0; f < s.numFaces(); ++f)
    for (int k = 0; k < 3; ++k) {
      const HPoint p = apply(a.faceToChart(f, k), a.faceVertices(f)[k]);
      CHECK(p.radius() < 1e-9);
    }
}

TEST_CASE("adjacent charts agree on shared edges") {
  const ConeSurface s = buildConeTorus(0.4, 0.8, 0.75);
  const Atlas a(s);
  for (int e = 0; e < s.numEdges(); ++e) {
    const auto ef = s.edgeFaces(e);
    if (ef[1] < 0) continue;
    const Isometry m = a.faceToFace(ef[0], ef[1]);
    for (int v : s.edge(e)) {
      const HPoint p = apply(m, a.faceVertices(ef[0])[s.localIndex(ef[0], v)]);
      CHECK(dist(p, a.faceVertices(ef[1])[s.localIndex(ef[1], v)]) < 1e-9);
    }
    // the two faces lie on opposite sides of the edge
    const auto& F = a.faceVertices(ef[1]);
    int third = 0;
    for (int k = 0; k < 3; ++k)
      if (s.face(ef[0])[k] != s.edge(e)[0] && s.face(ef[0])[k] != s.edge(e)[1]) third = k;
    const HPoint q = apply(m, a.faceVertices(ef[0])[third]);
    const int i0 = s.localIndex(ef[1], s.edge(e)[0]), i1 = s.localIndex(ef[1], s.edge(e)[1]);
    int other = 3 - i0 - i1;
    CHECK(orientation(F[i0], F[i1], q) * orientation(F[i0], F[i1], F[other]) < 0);
  }
}

TEST_CASE("vertex charts are consistent around a regular vertex") {
  const ConeSurface s = buildConeTorus(0.25, 0.8);
  const Atlas a(s);
  const int v = 7;
  for (int f : s.vertexFaces(v))
    for (int u : s.face(f)) {
      const HPoint p = apply(a.faceToChart(f, s.localIndex(f, v)), a.faceVertices(f)[s.localIndex(f, u)]);
      if (u != v) CHECK(dist(p, HPoint()) == doctest::Approx(s.length(s.edgeId(v, u))).epsilon(1e-9));
    }
  // a neighbor shared by two faces of the fan lands at the same chart point
  const auto& fan = s.vertexFaces(v);
  for (std::size_t i = 0; i < fan.size(); ++i) {
    const int f = fan[i], g = fan[(i + 1) % fan.size()];
    for (int u : s.face(f)) {
      if (u == v || s.localIndex(g, u) < 0) continue;
      const HPoint p = apply(a.faceToChart(f, s.localIndex(f, v)), a.faceVertices(f)[s.localIndex(f, u)]);
      const HPoint q = apply(a.faceToChart(g, s.localIndex(g, v)), a.faceVertices(g)[s.localIndex(g, u)]);
      CHECK(dist(p, q) < 1e-9);
    }
  }
}

TEST_CASE("locate and toChart round trip") {
  const ConeSurface s = buildConeTorus(0.25, 0.6);
  const Atlas a(s);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    SurfacePoint p;
    p.face = static_cast<int>(rng() % s.numFaces());
    double b0 = u(rng), b1 = u(rng), b2 = u(rng), sum = b0 + b1 + b2;
    p.bary = {b0 / sum, b1 / sum, b2 / sum};
    const int v = s.face(p.face)[trial % 3];
    const HPoint c = a.toChart(v, p);
    const SurfacePoint q = a.locate(v, c);
    CHECK(dist(a.toChart(v, q), c) < 1e-9);
  }
}

TEST_CASE("locate walks out of the vertex star") {
  const ConeSurface s = buildConeTorus(0.25, 0.6);
  const Atlas a(s);
  const int v = 5;
  const HPoint far = HPoint::fromPolar(1.2, 0.3);
  const SurfacePoint p = a.locate(v, far);
  CHECK(s.localIndex(p.face, v) < 0);
  CHECK(std::abs(p.bary[0] + p.bary[1] + p.bary[2] - 1.0) < 1e-12);
}
