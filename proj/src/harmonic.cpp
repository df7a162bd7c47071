#include "conemin/harmonic.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conemin {

namespace {

std::array<Vec2, 3> realizeFlat(double l0, double l1, double l2) {
  const double x = (l1 * l1 + l2 * l2 - l0 * l0) / (2.0 * l2);
  const double y2 = l1 * l1 - x * x;
  return {Vec2(0.0, 0.0), Vec2(l2, 0.0), Vec2(x, std::sqrt(std::max(y2, 0.0)))};
}

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Pure translation taking c to the origin.
Isometry boostToOrigin(const HPoint& c) {
  if (c.radius() < 1e-14) return Isometry::Identity();
  const HPoint origin;
  return isometryMatching(c, origin, origin, HPoint::fromPolar(1.0, c.angle() + std::numbers::pi));
}

} // namespace

FaceDifferential affineDifferential(const std::array<Complex, 3>& z, const std::array<Complex, 3>& w) {
  const Complex z1 = z[1] - z[0], z2 = z[2] - z[0], w1 = w[1] - w[0], w2 = w[2] - w[0];
  const Complex det = z1 * std::conj(z2) - z2 * std::conj(z1);
  if (std::abs(det) == 0.0) throw Error("harmonic", "face_differential", "nondegenerate domain face", "zero area");
  FaceDifferential out;
  out.dz = (w1 * std::conj(z2) - w2 * std::conj(z1)) / det;
  out.dzbar = (z1 * w2 - z2 * w1) / det;
  return out;
}

VertexMap VertexMap::identity(const ConeSurface& domain) {
  VertexMap u;
  u.image.assign(domain.numVertices(), HPoint());
  u.pinned.resize(domain.numVertices());
  for (int v = 0; v < domain.numVertices(); ++v) u.pinned[v] = domain.vertex(v).marked || domain.vertex(v).boundary;
  return u;
}

EuclideanFace euclideanFace(double l0, double l1, double l2) {
  if (!(l0 < l1 + l2 && l1 < l0 + l2 && l2 < l0 + l1))
    throw Error("harmonic", "dirichlet_weights", "triangle inequality", "domain face is degenerate");
  EuclideanFace f;
  f.p = realizeFlat(l0, l1, l2);
  f.area = 0.5 * cross2(f.p[1] - f.p[0], f.p[2] - f.p[0]);
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = f.p[(k + 1) % 3] - f.p[k], b = f.p[(k + 2) % 3] - f.p[k];
    f.cot[k] = a.dot(b) / (2.0 * f.area);
  }
  return f;
}

std::array<double, 3> hyperbolicAreaWeights(const HTriangle& t) {
  const auto& l = t.lengths;
  const auto& th = t.angles;
  std::array<double, 3> dA{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const double dii = std::sinh(l[i]) / (std::sinh(l[j]) * std::sinh(l[k]) * std::sin(th[i]));
    dA[i] -= dii;
    dA[j] += dii * std::cos(th[k]);
    dA[k] += dii * std::cos(th[j]);
  }
  return {dA[0] / l[0], dA[1] / l[1], dA[2] / l[2]};
}

std::vector<double> dirichletWeights(const ConeSurface& domain, WeightModel model) {
  std::vector<double> w(domain.numEdges(), 0.0);
  for (int f = 0; f < domain.numFaces(); ++f) {
    std::array<double, 3> c;
    if (model == WeightModel::Cotangent) {
      const EuclideanFace ef = euclideanFace(domain.faceLength(f, 0), domain.faceLength(f, 1), domain.faceLength(f, 2));
      for (int k = 0; k < 3; ++k) c[k] = 0.5 * ef.cot[k];
    } else {
      c = hyperbolicAreaWeights(domain.faceTriangle(f));
    }
    for (int k = 0; k < 3; ++k) w[domain.faceEdge(f, k)] += c[k];
  }
  return w;
}

HarmonicProblem::HarmonicProblem(const ConeSurface& domain, const ConeSurface& target, WeightModel model)
    : domain_(domain), atlas_(target), model_(model) {
  if (!domain.sameCombinatorics(target))
    throw Error("harmonic", "HarmonicProblem", "shared combinatorics", "domain and target faces differ");
  const ConeSurface& t = atlas_.surface();
  spokes_.resize(t.numVertices());
  for (int e = 0; e < t.numEdges(); ++e) {
    const auto [a, b] = t.edge(e);
    const int f = t.edgeFaces(e)[0];
    const Isometry bToA = atlas_.faceToChart(f, t.localIndex(f, a)) * atlas_.chartToFace(f, t.localIndex(f, b));
    spokes_[a].push_back({e, b, bToA});
    spokes_[b].push_back({e, a, bToA.inverse()});
  }
  rebuildDomain();
}

void HarmonicProblem::setDomainLengths(const std::vector<double>& lengths) {
  domain_.setLengths(lengths);
  rebuildDomain();
}

void HarmonicProblem::rebuildDomain() {
  weights_ = dirichletWeights(domain_, model_);
  domainFaces_.resize(domain_.numFaces());
  for (int f = 0; f < domain_.numFaces(); ++f)
    domainFaces_[f] = euclideanFace(domain_.faceLength(f, 0), domain_.faceLength(f, 1), domain_.faceLength(f, 2));
}

std::array<HPoint, 3> HarmonicProblem::faceImage(const VertexMap& u, int f) const {
  const auto& tri = target().face(f);
  std::array<HPoint, 3> x;
  for (int k = 0; k < 3; ++k) x[k] = apply(atlas_.chartToFace(f, k), u.image[tri[k]]);
  return x;
}

double HarmonicProblem::imageLength(const VertexMap& u, int e) const {
  const int a = target().edge(e)[0];
  for (const Spoke& s : spokes_[a])
    if (s.edge == e) return dist(u.image[a], apply(s.otherToHere, u.image[s.other]));
  throw Error("harmonic", "imageLength", "edge incidence", "edge not found");
}

double HarmonicProblem::energy(const VertexMap& u) const {
  double sum = 0.0;
  for (int e = 0; e < domain_.numEdges(); ++e) {
    const double d = imageLength(u, e);
    sum += 0.5 * weights_[e] * d * d;
  }
  return sum;
}

EnergyReport HarmonicProblem::energyReport(const VertexMap& u) const {
  EnergyReport r;
  r.value = energy(u);
  for (int f = 0; f < domain_.numFaces(); ++f)
    if (!(faceJacobian(u, f) > 0.0)) r.flippedFaces.push_back(f);
  return r;
}

double HarmonicProblem::faceJacobian(const VertexMap& u, int f) const {
  return faceDifferential(u, f).jacobian();
}

FaceDifferential HarmonicProblem::faceDifferential(const VertexMap& u, int f, ChartKind kind) const {
  const auto x = faceImage(u, f);
  FaceDifferential out;
  std::array<Complex, 3> z, w;
  if (kind == ChartKind::Intrinsic) {
    const EuclideanFace& D = domainFaces_[f];
    auto q = realizeFlat(dist(x[1], x[2]), dist(x[2], x[0]), dist(x[0], x[1]));
    if (orientation(x[0], x[1], x[2]) < 0.0) q[2].y() = -q[2].y();
    for (int k = 0; k < 3; ++k) {
      z[k] = {D.p[k].x(), D.p[k].y()};
      w[k] = {q[k].x(), q[k].y()};
    }
  } else {
    const auto P = solveTriangle(domain_.faceLength(f, 0), domain_.faceLength(f, 1), domain_.faceLength(f, 2)).realize();
    const Isometry B = boostToOrigin(projectiveCombination(P, {1.0 / 3, 1.0 / 3, 1.0 / 3}));
    for (int k = 0; k < 3; ++k) z[k] = apply(B, P[k]).toPoincare();
    out.rho2 = 4.0;
    const HPoint c = projectiveCombination(x, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    int cone = -1;
    for (int k = 0; k < 3; ++k)
      if (target().vertex(target().face(f)[k]).alpha < 1.0) cone = k;
    if (cone < 0) {
      const Isometry T = boostToOrigin(c);
      for (int k = 0; k < 3; ++k) w[k] = apply(T, x[k]).toPoincare();
      out.sigma2 = 4.0;
    } else {
      const ConeChart chart{target().vertex(target().face(f)[cone]).alpha};
      const Isometry T = atlas_.faceToChart(f, cone);
      const HPoint cc = apply(T, c);
      const double ref = cc.angle();
      auto toChart = [&](const HPoint& p) -> Complex {
        const HPoint y = apply(T, p);
        const double r = y.radius();
        if (r < 1e-14) return {0.0, 0.0};
        double th = y.angle();
        while (th - ref > std::numbers::pi) th -= 2.0 * std::numbers::pi;
        while (th - ref <= -std::numbers::pi) th += 2.0 * std::numbers::pi;
        return chart.fromCylindrical(r, th);
      };
      for (int k = 0; k < 3; ++k) w[k] = toChart(x[k]);
      out.sigma2 = chart.conformalFactor(toChart(c));
    }
  }
  const FaceDifferential a = affineDifferential(z, w);
  out.dz = a.dz;
  out.dzbar = a.dzbar;
  return out;
}

std::vector<Vec3> HarmonicProblem::gradient(const VertexMap& u) const {
  std::vector<Vec3> g(u.size(), Vec3::Zero());
  for (int v = 0; v < u.size(); ++v) {
    if (u.pinned[v]) continue;
    for (const Spoke& s : spokes_[v])
      g[v] -= weights_[s.edge] * logMap(u.image[v], apply(s.otherToHere, u.image[s.other]));
  }
  return g;
}

double HarmonicProblem::maxGradientNorm(const VertexMap& u) const {
  double m = 0.0;
  for (const Vec3& g : gradient(u)) m = std::max(m, tangentNorm(g));
  return m;
}

} // namespace conemin
