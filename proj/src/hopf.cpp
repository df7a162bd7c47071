#include "conemin/hopf.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

namespace conemin {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

std::vector<FaceDifferential> faceDifferentials(const HarmonicProblem& problem, const VertexMap& u) {
  std::vector<FaceDifferential> d(problem.domain().numFaces());
  for (int f = 0; f < problem.domain().numFaces(); ++f) d[f] = problem.faceDifferential(u, f);
  return d;
}

QuadDiffField hopfField(const std::vector<FaceDifferential>& d) {
  QuadDiffField q;
  q.phi.reserve(d.size());
  q.rho2.reserve(d.size());
  for (const auto& x : d) {
    q.phi.push_back(x.hopf());
    q.rho2.push_back(x.rho2);
  }
  return q;
}

QuadDiffField hopfField(const HarmonicProblem& problem, const VertexMap& u) {
  return hopfField(faceDifferentials(problem, u));
}

ScalarField scalarField(const std::vector<FaceDifferential>& d, FieldRole role) {
  ScalarField s{role, {}};
  s.values.reserve(d.size());
  for (const auto& x : d) {
    switch (role) {
    case FieldRole::EnergyDensity: s.values.push_back(x.energyDensity()); break;
    case FieldRole::Jacobian: s.values.push_back(x.jacobian()); break;
    case FieldRole::NormD: s.values.push_back(x.normD()); break;
    case FieldRole::NormDbar: s.values.push_back(x.normDbar()); break;
    case FieldRole::W: s.values.push_back(x.normDbar() > 0.0 ? std::log(x.normD() / x.normDbar()) : kNaN); break;
    }
  }
  return s;
}

QuadDiffField sum(const QuadDiffField& a, const QuadDiffField& b) {
  if (a.phi.size() != b.phi.size()) throw Error("hopf", "sum", "same surface", "field sizes differ");
  QuadDiffField s = a;
  for (std::size_t f = 0; f < s.phi.size(); ++f) s.phi[f] += b.phi[f] * (a.rho2[f] / b.rho2[f]);
  return s;
}

double frameRotation(const HarmonicProblem& problem, int f, int g, int e) {
  const ConeSurface& s = problem.domain();
  const auto [a, b] = s.edge(e);
  auto direction = [&](int face) {
    const auto& p = problem.domainFace(face).p;
    const Vec2 d = p[s.localIndex(face, b)] - p[s.localIndex(face, a)];
    return std::atan2(d.y(), d.x());
  };
  return direction(g) - direction(f);
}

double holomorphicityResidual(const HarmonicProblem& problem, const QuadDiffField& q) {
  const ConeSurface& s = problem.domain();
  double den = 0.0;
  for (int f = 0; f < s.numFaces(); ++f) den += problem.domainFace(f).area * std::abs(q.phi[f]);
  if (den == 0.0) return 0.0;
  double num = 0.0;
  for (int e = 0; e < s.numEdges(); ++e) {
    const auto [f, g] = s.edgeFaces(e);
    if (g < 0) continue;
    const double psi = frameRotation(problem, f, g, e);
    const Complex mismatch = q.phi[f] - q.phi[g] * std::polar(1.0, 2.0 * psi);
    num += 0.5 * (problem.domainFace(f).area + problem.domainFace(g).area) * std::abs(mismatch);
  }
  return num / den;
}

BochnerResidual bochnerResidual(const HarmonicProblem& problem, const VertexMap& u, double threshold) {
  const ConeSurface& s = problem.domain();
  const auto d = faceDifferentials(problem, u);
  const int nv = s.numVertices();
  BochnerResidual out;
  std::vector<bool> excluded(s.numFaces(), false);
  for (int f = 0; f < s.numFaces(); ++f)
    if (!(d[f].normDbar() > threshold)) {
      excluded[f] = true;
      out.excludedFaces.push_back(f);
    }

  // area-weighted vertex averages
  enum { L, M, ND2, NDB2, PHI, W, COUNT };
  std::vector<std::array<double, COUNT>> val(nv);
  std::vector<double> area(nv, 0.0);
  std::vector<bool> hasMinus(nv, true);
  for (int v = 0; v < nv; ++v) {
    std::array<double, COUNT> acc{};
    for (int f : s.vertexFaces(v)) {
      const double a = problem.domainFace(f).area;
      area[v] += a / 3.0;
      acc[L] += a * std::log(d[f].normD());
      acc[ND2] += a * d[f].normD() * d[f].normD();
      acc[NDB2] += a * d[f].normDbar() * d[f].normDbar();
      acc[PHI] += a * d[f].hopfNorm();
      if (excluded[f]) {
        hasMinus[v] = false;
      } else {
        acc[M] += a * std::log(d[f].normDbar());
        acc[W] += a * std::log(d[f].normD() / d[f].normDbar());
      }
    }
    const double total = 3.0 * area[v];
    for (double& x : acc) x /= total;
    val[v] = acc;
  }

  out.plus.assign(nv, kNaN);
  out.minus.assign(nv, kNaN);
  out.w.assign(nv, kNaN);
  for (int v = 0; v < nv; ++v) {
    if (s.vertex(v).boundary || s.vertex(v).marked) continue;
    double lapL = 0.0, lapM = 0.0, lapW = 0.0;
    bool minusOk = hasMinus[v];
    for (const auto& sp : problem.spokes(v)) {
      const double w = problem.weights()[sp.edge];
      lapL += w * (val[sp.other][L] - val[v][L]);
      lapM += w * (val[sp.other][M] - val[v][M]);
      lapW += w * (val[sp.other][W] - val[v][W]);
      minusOk = minusOk && hasMinus[sp.other];
    }
    lapL /= area[v];
    lapM /= area[v];
    lapW /= area[v];
    const auto& x = val[v];
    out.plus[v] = lapL - (x[ND2] - x[NDB2] - 1.0);
    if (minusOk) {
      out.minus[v] = lapM - (x[NDB2] - x[ND2] - 1.0);
      out.w[v] = lapW - 4.0 * x[PHI] * std::sinh(x[W]);
    }
  }
  return out;
}

std::vector<std::vector<int>> faceRings(const ConeSurface& s, int p, int count) {
  std::vector<std::vector<int>> rings;
  std::vector<bool> seenV(s.numVertices(), false), seenF(s.numFaces(), false);
  std::vector<int> frontier{p};
  seenV[p] = true;
  for (int r = 0; r < count && !frontier.empty(); ++r) {
    std::vector<int> ring;
    for (int v : frontier)
      for (int f : s.vertexFaces(v))
        if (!seenF[f]) {
          seenF[f] = true;
          ring.push_back(f);
        }
    std::vector<int> next;
    for (int f : ring)
      for (int v : s.face(f))
        if (!seenV[v]) {
          seenV[v] = true;
          next.push_back(v);
        }
    if (ring.empty()) break;
    rings.push_back(std::move(ring));
    frontier = std::move(next);
  }
  return rings;
}

PoleFit poleOrderEstimate(const HarmonicProblem& problem, const QuadDiffField& q, int p, int rings, int minRings) {
  const ConeSurface& s = problem.domain();
  if (!s.vertex(p).marked) throw Error("hopf", "pole_order_estimate", "marked vertex", "vertex is not marked");
  const auto R = faceRings(s, p, rings);
  if (static_cast<int>(R.size()) < minRings)
    throw Error("hopf", "pole_order_estimate", "enough rings", "fewer than " + std::to_string(minRings) + " rings");
  PoleFit fit;
  fit.rings = static_cast<int>(R.size());
  const auto dist = geodesicDistances(s, p);
  const ConeChart chart{s.vertex(p).alpha};
  std::vector<double> xs, ys;
  bool anyNonZero = false;
  for (const auto& ring : R)
    for (int f : ring) {
      const double norm = q.norm(f);
      if (!(norm > 0.0)) continue;
      anyNonZero = true;
      double r = 0.0;
      for (int v : s.face(f)) r += dist[v] / 3.0;
      const double z = std::abs(chart.fromCylindrical(r, 0.0));
      xs.push_back(std::log(z));
      ys.push_back(std::log(norm * chart.conformalFactor(z)));
    }
  if (!anyNonZero) {
    fit.zeroField = true;
    return fit;
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw Error("hopf", "pole_order_estimate", "distinct radii", "degenerate fit");
  fit.slope = (n * sxy - sx * sy) / den;
  const double icpt = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - icpt - fit.slope * xs[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

double hopfL2Near(const HarmonicProblem& problem, const QuadDiffField& q, int p, double radius) {
  const ConeSurface& s = problem.domain();
  const auto dist = geodesicDistances(s, p);
  double sum = 0.0;
  for (int f = 0; f < s.numFaces(); ++f) {
    bool inside = true;
    for (int v : s.face(f)) inside = inside && dist[v] <= radius;
    if (inside) sum += problem.domainFace(f).area * q.norm(f) * q.norm(f);
  }
  return sum;
}

void writeFieldDump(const HarmonicProblem& problem, const VertexMap& u, const std::string& csvPath,
                    const std::string& framesPath) {
  const auto d = faceDifferentials(problem, u);
  std::ofstream out(csvPath);
  if (!out) throw Error("hopf", "writeFieldDump", "writable path", "cannot open " + csvPath);
  out << "face_id,re_phi,im_phi,e,J,norm_d,norm_dbar,w\n" << std::setprecision(17);
  for (std::size_t f = 0; f < d.size(); ++f) {
    const Complex phi = d[f].hopf();
    const double w = d[f].normDbar() > 0.0 ? std::log(d[f].normD() / d[f].normDbar()) : kNaN;
    out << f << ',' << phi.real() << ',' << phi.imag() << ',' << d[f].energyDensity() << ',' << d[f].jacobian() << ','
        << d[f].normD() << ',' << d[f].normDbar() << ',' << w << '\n';
  }
  nlohmann::json frames;
  frames["frame"] = "Euclidean realization of the domain face: origin at faces[f][0], x axis toward faces[f][1]";
  frames["faces"] = problem.domain().faces();
  std::ofstream side(framesPath);
  if (!side) throw Error("hopf", "writeFieldDump", "writable path", "cannot open " + framesPath);
  side << frames.dump(1) << '\n';
}

} // namespace conemin
