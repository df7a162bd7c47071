#include "conemin/minimal.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

namespace conemin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double euclideanAngle(double opposite, double b, double c) {
  return std::acos(std::clamp((b * b + c * c - opposite * opposite) / (2.0 * b * c), -1.0, 1.0));
}

double heron(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  return std::sqrt(std::max(0.0, s * (s - a) * (s - b) * (s - c)));
}

std::vector<double> vertexAreas(const HarmonicProblem& p) {
  std::vector<double> a(p.domain().numVertices(), 0.0);
  for (int f = 0; f < p.domain().numFaces(); ++f)
    for (int v : p.domain().face(f)) a[v] += p.domainFace(f).area / 3.0;
  return a;
}

double inducedArea(const HarmonicProblem& p1, const VertexMap& u1, const HarmonicProblem& p2, const VertexMap& u2) {
  const ConeSurface& s = p1.domain();
  std::vector<double> L(s.numEdges());
  for (int e = 0; e < s.numEdges(); ++e) {
    const double a = p1.imageLength(u1, e), b = p2.imageLength(u2, e);
    L[e] = std::sqrt(a * a + b * b);
  }
  double area = 0.0;
  for (int f = 0; f < s.numFaces(); ++f) area += heron(L[s.faceEdge(f, 0)], L[s.faceEdge(f, 1)], L[s.faceEdge(f, 2)]);
  return area;
}

} // namespace

HPoint composeAt(const ProductGraph& g, const SurfacePoint& y, int hint, int chart) {
  const Atlas& A1 = g.p1->atlas();
  const Atlas& A2 = g.p2->atlas();
  const ConeSurface& s = g.p1->domain();
  std::vector<bool> seen(s.numFaces(), false);
  std::vector<int> queue;
  for (int f : s.vertexFaces(hint)) {
    seen[f] = true;
    queue.push_back(f);
  }
  int best = -1;
  std::array<double, 3> bestBary{};
  double bestMin = -INFINITY;
  const std::size_t limit = std::min<std::size_t>(s.numFaces(), 400);
  for (std::size_t i = 0; i < queue.size() && i < limit; ++i) {
    const int f = queue[i];
    // unfold through the chart of hint when f contains it, matching faceImage
    const int k = std::max(0, s.localIndex(f, hint));
    const HPoint Y = apply(A1.chartToFace(f, k), A1.toChart(s.face(f)[k], y));
    const auto bary = projectiveBarycentric(g.p1->faceImage(g.u1, f), Y);
    const double m = std::min({bary[0], bary[1], bary[2]});
    if (m > bestMin) {
      bestMin = m;
      best = f;
      bestBary = bary;
    }
    if (m >= -1e-12) break;
    for (int v : s.face(f))
      for (int h : s.vertexFaces(v))
        if (!seen[h]) {
          seen[h] = true;
          queue.push_back(h);
        }
  }
  const HPoint Z = projectiveCombination(g.p2->faceImage(g.u2, best), bestBary);
  const int k = std::max(0, s.localIndex(best, hint));
  const int a = s.face(best)[k];
  return A2.toChart(chart, A2.locate(a, apply(A2.faceToChart(best, k), Z)));
}

ProductGraph assemble(const HarmonicProblem& p1, const VertexMap& u1, const HarmonicProblem& p2, const VertexMap& u2) {
  const ConeSurface& s = p1.domain();
  for (int f = 0; f < s.numFaces(); ++f)
    if (!(p1.faceJacobian(u1, f) > 0.0))
      throw Error("minimal", "assemble", "Jacobian(u1) > 0", "not a graph over factor 1 (face " + std::to_string(f) + ")");
  ProductGraph g;
  g.p1 = &p1;
  g.p2 = &p2;
  g.u1 = u1;
  g.u2 = u2;
  g.lengths.resize(s.numEdges());
  for (int e = 0; e < s.numEdges(); ++e) {
    const double a = p1.imageLength(u1, e), b = p2.imageLength(u2, e);
    g.lengths[e] = std::sqrt(a * a + b * b);
  }

  const ConeSurface& T1 = p1.target();
  g.psi.resize(T1.numVertices());
  for (int w = 0; w < T1.numVertices(); ++w) {
    const int f = T1.vertexFaces(w)[0];
    SurfacePoint y{f, {0.0, 0.0, 0.0}};
    y.bary[T1.localIndex(f, w)] = 1.0;
    g.psi[w] = composeAt(g, y, w, w);
  }

  const Atlas& A2 = p2.atlas();
  double signedArea = 0.0;
  for (int f = 0; f < T1.numFaces(); ++f) {
    const auto& t = T1.face(f);
    std::array<HPoint, 3> P;
    for (int k = 0; k < 3; ++k) P[k] = A2.toChart(t[0], A2.locate(t[k], g.psi[t[k]]));
    const double o = orientation(P[0], P[1], P[2]);
    if (!(o > 0.0)) g.psiFlipped.push_back(f);
    const double area = solveTriangle(dist(P[1], P[2]), dist(P[2], P[0]), dist(P[0], P[1])).area();
    signedArea += o > 0.0 ? area : -area;
  }
  g.psiImageAreaRatio = signedArea / targetArea(p2.target());
  return g;
}

double compositionError(const ProductGraph& g) {
  double worst = 0.0;
  for (int v = 0; v < g.u1.size(); ++v) {
    const SurfacePoint y = g.p1->atlas().locate(v, g.u1.image[v]);
    worst = std::max(worst, dist(composeAt(g, y, v, v), g.u2.image[v]));
  }
  return worst;
}

double graphAngleSum(const ProductGraph& g, int v) {
  const ConeSurface& s = g.p1->domain();
  double sum = 0.0;
  for (int f : s.vertexFaces(v)) {
    const int k = s.localIndex(f, v);
    sum += euclideanAngle(g.lengths[s.faceEdge(f, k)], g.lengths[s.faceEdge(f, (k + 1) % 3)],
                          g.lengths[s.faceEdge(f, (k + 2) % 3)]);
  }
  return sum;
}

double graphArea(const ProductGraph& g) {
  const ConeSurface& s = g.p1->domain();
  double area = 0.0;
  for (int f = 0; f < s.numFaces(); ++f)
    area += heron(g.lengths[s.faceEdge(f, 0)], g.lengths[s.faceEdge(f, 1)], g.lengths[s.faceEdge(f, 2)]);
  return area;
}

double targetArea(const ConeSurface& s) {
  double area = 0.0;
  for (int f = 0; f < s.numFaces(); ++f) area += s.faceTriangle(f).area();
  return area;
}

AreaEnergy areaEnergyGap(const ProductGraph& g) {
  const auto d1 = faceDifferentials(*g.p1, g.u1), d2 = faceDifferentials(*g.p2, g.u2);
  AreaEnergy r;
  for (std::size_t f = 0; f < d1.size(); ++f) {
    const double e = d1[f].energyDensity() + d2[f].energyDensity();
    const double phi = std::abs(d1[f].hopf() + d2[f].hopf()) / d1[f].rho2;
    const double disc = e * e - 4.0 * phi * phi;
    if (disc < -1e-12 * e * e)
      throw Error("minimal", "area_energy_gap", "nonnegative discriminant",
                  "face " + std::to_string(f) + " has (e1+e2)^2 < 4|Phi1+Phi2|^2");
    r.area += g.p1->domainFace(static_cast<int>(f)).area * std::sqrt(std::max(0.0, disc));
  }
  r.energy = g.p1->energy(g.u1) + g.p2->energy(g.u2);
  r.gap = r.energy - r.area;
  return r;
}

Certificate conformalityCertificate(const ProductGraph& g) {
  Certificate c;
  const QuadDiffField q = sum(hopfField(*g.p1, g.u1), hopfField(*g.p2, g.u2));
  for (std::size_t f = 0; f < q.phi.size(); ++f) c.maxHopfSum = std::max(c.maxHopfSum, q.norm(static_cast<int>(f)));
  c.areaEnergy = areaEnergyGap(g);
  return c;
}

PowerLawLimit extrapolatePowerLaw(const std::array<double, 3>& h, const std::array<double, 3>& values) {
  const double d1 = values[0] - values[1], d2 = values[1] - values[2];
  if (!(h[0] > h[1] && h[1] > h[2] && h[2] > 0.0))
    throw Error("minimal", "extrapolatePowerLaw", "decreasing positive h", "bad spacings");
  if (!(d1 * d2 > 0.0)) throw Error("minimal", "extrapolatePowerLaw", "monotone samples", "differences change sign");
  const double target = d1 / d2;
  auto ratio = [&](double p) {
    return (std::pow(h[0], p) - std::pow(h[1], p)) / (std::pow(h[1], p) - std::pow(h[2], p));
  };
  // ratio is increasing in p
  double lo = 1e-3, hi = 8.0;
  if (!(ratio(lo) < target && target < ratio(hi)))
    throw Error("minimal", "extrapolatePowerLaw", "exponent in (0.001, 8)", "no power law through the samples");
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }
  PowerLawLimit out;
  out.exponent = 0.5 * (lo + hi);
  out.coefficient = d2 / (std::pow(h[1], out.exponent) - std::pow(h[2], out.exponent));
  out.limit = values[2] - out.coefficient * std::pow(h[2], out.exponent);
  return out;
}

SlopeFit wDifferenceSlope(const ProductGraph& g, int p, int rings) {
  const ConeSurface& s = g.p1->domain();
  const auto d1 = faceDifferentials(*g.p1, g.u1), d2 = faceDifferentials(*g.p2, g.u2);
  const auto dist = geodesicDistances(s, p);
  const ConeChart chart{s.vertex(p).alpha};
  std::vector<double> xs, ys;
  for (const auto& ring : faceRings(s, p, rings))
    for (int f : ring) {
      if (!(d1[f].normDbar() > 0.0 && d2[f].normDbar() > 0.0)) continue;
      double r = 0.0;
      for (int v : s.face(f)) r += dist[v] / 3.0;
      xs.push_back(std::log(std::abs(chart.fromCylindrical(r, 0.0))));
      ys.push_back(std::log(d2[f].normD() / d2[f].normDbar()) - std::log(d1[f].normD() / d1[f].normDbar()));
    }
  SlopeFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 2) return fit;
  const double n = fit.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ss += std::pow(ys[i] - icpt - fit.slope * xs[i], 2);
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

using TangentField = std::vector<Vec3>; // at u.image[v], in the chart of v

TangentField randomField(const HarmonicProblem& p, const VertexMap& u, const std::vector<double>& areas,
                         const StabilityOptions& opts, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  const int nv = u.size();
  TangentField psi(nv, Vec3::Zero());
  for (int v = 0; v < nv; ++v) {
    const Vec2 c(normal(rng), normal(rng));
    if (!u.pinned[v]) psi[v] = frameAt(u.image[v], Vec3(1.0, 0.0, 0.0)).vector(c);
  }
  for (int step = 0; step < opts.smoothing; ++step) {
    TangentField next(nv, Vec3::Zero());
    for (int v = 0; v < nv; ++v) {
      if (u.pinned[v]) continue;
      Vec3 avg = Vec3::Zero();
      const auto& spokes = p.spokes(v);
      for (const auto& sp : spokes) {
        const HPoint from = apply(sp.otherToHere, u.image[sp.other]);
        avg += transport(from, u.image[v], sp.otherToHere * psi[sp.other]);
      }
      next[v] = projectTangent(u.image[v], 0.5 * psi[v] + 0.5 * avg / static_cast<double>(spokes.size()));
    }
    psi = std::move(next);
  }
  double norm2 = 0.0;
  for (int v = 0; v < nv; ++v) norm2 += areas[v] * minkowski(psi[v], psi[v]);
  for (auto& x : psi) x /= std::sqrt(norm2);
  return psi;
}

VertexMap displaced(const VertexMap& u, const TangentField& psi, double t) {
  VertexMap out = u;
  for (int v = 0; v < u.size(); ++v)
    if (!u.pinned[v]) out.image[v] = expMap(u.image[v], t * psi[v]);
  return out;
}

} // namespace

StabilityReport stabilitySuite(const ProductGraph& g, const StabilityOptions& opts) {
  const HarmonicProblem& p1 = *g.p1;
  const HarmonicProblem& p2 = *g.p2;
  const ConeSurface& s = p1.domain();
  StabilityReport r;
  r.hypothesis = true;
  for (int v : s.markedVertices())
    r.hypothesis = r.hypothesis && p1.target().vertex(v).alpha < p2.target().vertex(v).alpha;

  const auto d1 = faceDifferentials(p1, g.u1), d2 = faceDifferentials(p2, g.u2);
  const int nf = s.numFaces();
  r.w1 = scalarField(d1, FieldRole::W).values;
  r.w2 = scalarField(d2, FieldRole::W).values;
  r.e1 = scalarField(d1, FieldRole::EnergyDensity).values;
  r.e2 = scalarField(d2, FieldRole::EnergyDensity).values;
  int wPass = 0, ePass = 0;
  double num = 0.0, den = 0.0;
  for (int f = 0; f < nf; ++f) {
    if (std::isfinite(r.w1[f]) && std::isfinite(r.w2[f])) {
      ++r.wCompared;
      if (r.w2[f] <= r.w1[f] + opts.epsH) ++wPass;
    }
    if (r.e2[f] <= r.e1[f] * (1.0 + opts.epsH)) ++ePass;
    const double diff = d1[f].hopfNorm() - d2[f].hopfNorm();
    r.hopfNormMismatch = std::max(r.hopfNormMismatch, std::abs(diff));
    num += p1.domainFace(f).area * diff * diff;
    den += p1.domainFace(f).area * d1[f].hopfNorm() * d1[f].hopfNorm();
  }
  r.wPassRate = r.wCompared ? static_cast<double>(wPass) / r.wCompared : 1.0;
  r.ePassRate = static_cast<double>(ePass) / nf;
  r.hopfNormMismatchRel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);

  std::mt19937_64 rng(opts.seed);
  const auto areas = vertexAreas(p1);
  const double t = opts.fdStep;
  const double E0 = p2.energy(g.u2), A0 = inducedArea(p1, g.u1, p2, g.u2);
  r.minSecondVariation = INFINITY;
  for (int k = 0; k < opts.samples; ++k) {
    const TangentField psi = randomField(p2, g.u2, areas, opts, rng);
    const VertexMap plus = displaced(g.u2, psi, t), minus = displaced(g.u2, psi, -t);
    StabilitySample smp;
    smp.energyTerm = (p2.energy(plus) - 2.0 * E0 + p2.energy(minus)) / (t * t);
    const auto dp = faceDifferentials(p2, plus), dm = faceDifferentials(p2, minus);
    for (int f = 0; f < nf; ++f) {
      const double dphi = std::abs(dp[f].hopf() - dm[f].hopf()) / (2.0 * t) / d2[f].rho2;
      smp.hopfTerm += 4.0 * p1.domainFace(f).area * dphi * dphi / (r.e1[f] + r.e2[f]);
    }
    smp.secondVariation = smp.energyTerm - smp.hopfTerm;
    smp.directArea = (inducedArea(p1, g.u1, p2, plus) - 2.0 * A0 + inducedArea(p1, g.u1, p2, minus)) / (t * t);
    r.minSecondVariation = std::min(r.minSecondVariation, smp.secondVariation);
    if (smp.secondVariation >= -opts.epsH) ++r.secondVariationPasses;
    r.samples.push_back(smp);
  }
  if (r.samples.empty()) r.minSecondVariation = kNaN;
  return r;
}

void writeMarkedProfileCsv(const ProductGraph& g, const StabilityReport& r, double radius, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("minimal", "writeMarkedProfileCsv", "writable path", "cannot open " + path);
  out << "vertex,face,radius,w1,w2,e1,e2\n" << std::setprecision(17);
  const ConeSurface& s = g.p1->domain();
  for (int p : s.markedVertices()) {
    const auto d = geodesicDistances(s, p);
    for (int f = 0; f < s.numFaces(); ++f) {
      double rf = 0.0;
      for (int v : s.face(f)) rf += d[v] / 3.0;
      if (rf > radius) continue;
      out << p << ',' << f << ',' << rf << ',' << r.w1[f] << ',' << r.w2[f] << ',' << r.e1[f] << ',' << r.e2[f] << '\n';
    }
  }
}

} // namespace conemin
