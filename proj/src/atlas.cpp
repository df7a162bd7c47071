#include "conemin/atlas.h"

#include "conemin/errors.h"

#include <Eigen/Dense>

#include <algorithm>
#include <queue>

namespace conemin {

namespace {

Eigen::Matrix3d lorentzFrame(const HPoint& p, const HPoint& toward) {
  Vec3 t = logMap(p, toward);
  const double n = tangentNorm(t);
  if (!(n > 0.0)) throw Error("hypcore", "isometryMatching", "distinct points", "direction is undefined");
  t /= n;
  Eigen::Matrix3d m;
  m.col(0) = p.ambient();
  m.col(1) = t;
  m.col(2) = lorentz_cross(p.ambient(), t);
  return m;
}

double minOf(const std::array<double, 3>& b) { return std::min({b[0], b[1], b[2]}); }

} // namespace

Isometry isometryMatching(const HPoint& from, const HPoint& fromToward, const HPoint& to, const HPoint& toToward) {
  return lorentzFrame(to, toToward) * lorentzFrame(from, fromToward).inverse();
}

Atlas::Atlas(const ConeSurface& surface) : surface_(surface) {
  const ConeSurface& s = surface_;
  faceVertices_.resize(s.numFaces());
  for (int f = 0; f < s.numFaces(); ++f) faceVertices_[f] = s.faceTriangle(f).realize();
  chartToFace_.resize(s.numFaces());
  faceToChart_.resize(s.numFaces());
  const HPoint origin, xAxis = HPoint::fromPolar(1.0, 0.0);
  for (int v = 0; v < s.numVertices(); ++v) {
    const auto& fan = s.vertexFaces(v);
    int prev = -1;
    for (int f : fan) {
      const int k = s.localIndex(f, v);
      Isometry toChart;
      if (prev < 0) {
        const auto& V = faceVertices_[f];
        toChart = isometryMatching(V[k], V[(k + 1) % 3], origin, xAxis);
      } else {
        toChart = faceToChart_[prev][s.localIndex(prev, v)] * faceToFace(f, prev);
      }
      faceToChart_[f][k] = toChart;
      chartToFace_[f][k] = toChart.inverse();
      prev = f;
    }
  }
}

Isometry Atlas::faceToFace(int f, int g) const {
  const auto& tf = surface_.face(f);
  int p = -1, q = -1;
  for (int k = 0; k < 3; ++k) {
    if (surface_.localIndex(g, tf[k]) >= 0) {
      if (p < 0) p = tf[k];
      else q = tf[k];
    }
  }
  if (q < 0 || f == g) throw Error("surface", "faceToFace", "adjacent faces", "faces do not share an edge");
  const auto& F = faceVertices_[f];
  const auto& G = faceVertices_[g];
  return isometryMatching(F[surface_.localIndex(f, p)], F[surface_.localIndex(f, q)], G[surface_.localIndex(g, p)],
                          G[surface_.localIndex(g, q)]);
}

HPoint Atlas::facePoint(const SurfacePoint& p) const { return projectiveCombination(faceVertices_[p.face], p.bary); }

SurfacePoint Atlas::locate(int v, const HPoint& chartPoint) const {
  const ConeSurface& s = surface_;
  int best = -1;
  std::array<double, 3> bestBary{};
  HPoint bestPoint;
  for (int f : s.vertexFaces(v)) {
    const HPoint y = apply(chartToFace_[f][s.localIndex(f, v)], chartPoint);
    const auto b = projectiveBarycentric(faceVertices_[f], y);
    if (best < 0 || minOf(b) > minOf(bestBary)) {
      best = f;
      bestBary = b;
      bestPoint = y;
    }
  }
  int f = best;
  std::array<double, 3> b = bestBary;
  HPoint y = bestPoint;
  for (int step = 0; step < s.numFaces() && minOf(b) < -1e-12; ++step) {
    const int j = static_cast<int>(std::min_element(b.begin(), b.end()) - b.begin());
    const auto& ef = s.edgeFaces(s.faceEdge(f, j));
    const int g = ef[0] == f ? ef[1] : ef[0];
    if (g < 0) break; // outside a boundary edge: clamp below
    y = apply(faceToFace(f, g), y);
    f = g;
    b = projectiveBarycentric(faceVertices_[f], y);
  }
  double sum = 0.0;
  for (double& x : b) sum += (x = std::max(x, 0.0));
  for (double& x : b) x /= sum;
  return {f, b};
}

HPoint Atlas::toChart(int v, const SurfacePoint& p) const {
  const ConeSurface& s = surface_;
  if (p.face < 0 || p.face >= s.numFaces()) throw Error("harmonic", "toChart", "valid face id", "face id out of range");
  std::vector<int> parent(s.numFaces(), -2);
  std::queue<int> q;
  parent[p.face] = -1;
  q.push(p.face);
  int hit = -1;
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    if (s.localIndex(f, v) >= 0) {
      hit = f;
      break;
    }
    for (int k = 0; k < 3; ++k) {
      const auto& ef = s.edgeFaces(s.faceEdge(f, k));
      const int g = ef[0] == f ? ef[1] : ef[0];
      if (g >= 0 && parent[g] == -2) {
        parent[g] = f;
        q.push(g);
      }
    }
  }
  if (hit < 0) throw Error("harmonic", "toChart", "connected surface", "no face path to the vertex star");
  std::vector<int> path;
  for (int f = hit; f >= 0; f = parent[f]) path.push_back(f);
  std::reverse(path.begin(), path.end());
  Isometry m = Isometry::Identity();
  for (std::size_t i = 1; i < path.size(); ++i) m = faceToFace(path[i - 1], path[i]) * m;
  return apply(faceToChart_[hit][s.localIndex(hit, v)] * m, facePoint(p));
}

} // namespace conemin
