#include "conemin/harmonic.h"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <fstream>
#include <iomanip>

namespace conemin {

namespace {

double dcoth(double d) { return d < 1e-6 ? 1.0 + d * d / 3.0 : d / std::tanh(d); }
double dOverSinh(double d) { return d < 1e-6 ? 1.0 - d * d / 6.0 : d / std::sinh(d); }

int firstBadFace(const HarmonicProblem& p, const VertexMap& u, double floor, const std::vector<int>* faces = nullptr) {
  if (faces) {
    for (int f : *faces)
      if (!(p.faceJacobian(u, f) > floor)) return f;
    return -1;
  }
  for (int f = 0; f < p.domain().numFaces(); ++f)
    if (!(p.faceJacobian(u, f) > floor)) return f;
  return -1;
}

// Second derivatives of d^2/2 between x and y: radial and tangential parts at
// each end plus the mixed block, as bilinear forms on ambient tangent vectors.
struct PairHessian {
  HPoint x, y;
  Vec3 ux, nx, uy, ny;
  double d;

  PairHessian(const HPoint& x_, const HPoint& y_) : x(x_), y(y_) {
    d = dist(x, y);
    Vec3 lx = logMap(x, y);
    const double n = tangentNorm(lx);
    if (n > 1e-300) {
      ux = lx / n;
    } else {
      ux = frameAt(x, Vec3(1.0, 0.0, 0.0)).e1;
    }
    nx = lorentz_cross(x.ambient(), ux);
    uy = transport(x, y, ux);
    ny = lorentz_cross(y.ambient(), uy);
  }
  double xx(const Vec3& a, const Vec3& b) const {
    return minkowski(a, ux) * minkowski(b, ux) + dcoth(d) * minkowski(a, nx) * minkowski(b, nx);
  }
  double yy(const Vec3& a, const Vec3& b) const {
    return minkowski(a, uy) * minkowski(b, uy) + dcoth(d) * minkowski(a, ny) * minkowski(b, ny);
  }
  // a tangent at x, b tangent at y
  double xy(const Vec3& a, const Vec3& b) const {
    return -(minkowski(a, ux) * minkowski(b, uy) + dOverSinh(d) * minkowski(a, nx) * minkowski(b, ny));
  }
};

HarmonicResult solveNewton(const HarmonicProblem& p, VertexMap u, const HarmonicOptions& opt) {
  const int n = u.size();
  std::vector<int> idx(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (!u.pinned[v]) idx[v] = m++;
  ConvergenceTrace trace;
  for (int it = 0;; ++it) {
    const double E = p.energy(u);
    const std::vector<Vec3> grad = p.gradient(u);
    double gmax = 0.0;
    for (const Vec3& g : grad) gmax = std::max(gmax, tangentNorm(g));
    trace.push_back({it, E, gmax});
    if (gmax <= opt.tolerance || m == 0) return {std::move(u), std::move(trace)};
    if (it >= opt.maxIterations) throw HarmonicError("convergence", "Newton iteration budget exhausted", trace);

    std::vector<TangentFrame> frame(n);
    Eigen::VectorXd b(2 * m);
    for (int v = 0; v < n; ++v) {
      if (idx[v] < 0) continue;
      frame[v] = frameAt(u.image[v], Vec3(1.0, 0.0, 0.0));
      const Vec2 c = frame[v].coords(grad[v]);
      b.segment<2>(2 * idx[v]) = -c;
    }
    std::vector<Eigen::Triplet<double>> trip;
    auto add = [&](int i, int j, const Eigen::Matrix2d& B) {
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) trip.emplace_back(2 * i + r, 2 * j + c, B(r, c));
    };
    for (int v = 0; v < n; ++v) {
      for (const auto& s : p.spokes(v)) {
        if (s.other < v) continue;
        const int o = s.other;
        if (idx[v] < 0 && idx[o] < 0) continue;
        const double w = p.weights()[s.edge];
        const PairHessian H(u.image[v], apply(s.otherToHere, u.image[o]));
        std::array<Vec3, 2> ev{}, eo{};
        if (idx[v] >= 0) ev = {frame[v].e1, frame[v].e2};
        if (idx[o] >= 0) eo = {s.otherToHere * frame[o].e1, s.otherToHere * frame[o].e2};
        Eigen::Matrix2d Bvv, Boo, Bvo;
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            Bvv(r, c) = w * H.xx(ev[r], ev[c]);
            Boo(r, c) = w * H.yy(eo[r], eo[c]);
            Bvo(r, c) = w * H.xy(ev[r], eo[c]);
          }
        if (idx[v] >= 0) add(idx[v], idx[v], Bvv);
        if (idx[o] >= 0) add(idx[o], idx[o], Boo);
        if (idx[v] >= 0 && idx[o] >= 0) {
          add(idx[v], idx[o], Bvo);
          add(idx[o], idx[v], Bvo.transpose());
        }
      }
    }
    Eigen::SparseMatrix<double> K(2 * m, 2 * m);
    K.setFromTriplets(trip.begin(), trip.end());
    double maxDiag = 0.0;
    for (int i = 0; i < 2 * m; ++i) maxDiag = std::max(maxDiag, std::abs(K.coeff(i, i)));

    Eigen::VectorXd delta;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.analyzePattern(K);
    double mu = 0.0;
    for (int attempt = 0;; ++attempt) {
      Eigen::SparseMatrix<double> Km = K;
      if (mu > 0.0)
        for (int i = 0; i < 2 * m; ++i) Km.coeffRef(i, i) += mu;
      ldlt.factorize(Km);
      if (ldlt.info() == Eigen::Success) {
        delta = ldlt.solve(b);
        const bool positive = (ldlt.vectorD().array() > 0.0).all();
        if (positive && delta.allFinite() && delta.dot(b) > 0.0) break;
      }
      if (attempt > 60) throw HarmonicError("convergence", "no descent direction", trace);
      mu = mu == 0.0 ? 1e-8 * std::max(1.0, maxDiag) : 10.0 * mu;
    }

    const double slope = -delta.dot(b);
    const bool roundoffRegime = -slope < 1e-13 * std::max(1.0, std::abs(E));
    double t = 1.0;
    int badFace = -1;
    bool accepted = false;
    VertexMap trial = u;
    for (int h = 0; h <= opt.maxHalvings; ++h, t *= 0.5) {
      for (int v = 0; v < n; ++v) {
        if (idx[v] < 0) continue;
        const Vec2 dv = delta.segment<2>(2 * idx[v]);
        trial.image[v] = expMap(u.image[v], frame[v].vector(t * dv));
      }
      badFace = firstBadFace(p, trial, opt.jacobianFloor);
      if (badFace >= 0) continue;
      const double Et = p.energy(trial);
      if (Et <= E + 1e-4 * t * slope || roundoffRegime) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (badFace >= 0) throw HarmonicError("degeneration", "Jacobian sign flip", trace, badFace);
      throw HarmonicError("convergence", "line search stalled", trace);
    }
    u = std::move(trial);
  }
}

HarmonicResult solveGaussSeidel(const HarmonicProblem& p, VertexMap u, const HarmonicOptions& opt) {
  const int n = u.size();
  ConvergenceTrace trace;
  std::vector<HPoint> pts;
  std::vector<double> wts;
  for (int sweep = 0;; ++sweep) {
    const double E = p.energy(u);
    const double gmax = p.maxGradientNorm(u);
    trace.push_back({sweep, E, gmax});
    if (gmax <= opt.tolerance) return {std::move(u), std::move(trace)};
    if (sweep >= opt.maxSweeps) throw HarmonicError("convergence", "Gauss-Seidel sweep budget exhausted", trace);
    for (int v = 0; v < n; ++v) {
      if (u.pinned[v]) continue;
      pts.clear();
      wts.clear();
      for (const auto& s : p.spokes(v)) {
        pts.push_back(apply(s.otherToHere, u.image[s.other]));
        wts.push_back(p.weights()[s.edge]);
      }
      const HPoint target = weightedCentroid(pts, wts).point;
      const HPoint old = u.image[v];
      const auto& fan = p.domain().vertexFaces(v);
      double t = 1.0;
      int bad = -1;
      for (int h = 0; h <= opt.maxHalvings; ++h, t *= 0.5) {
        u.image[v] = geodesicPoint(old, target, t);
        bad = firstBadFace(p, u, opt.jacobianFloor, &fan);
        if (bad < 0) break;
      }
      if (bad >= 0) {
        u.image[v] = old;
        throw HarmonicError("degeneration", "Jacobian sign flip", trace, bad);
      }
    }
  }
}

} // namespace

HarmonicResult solveHarmonic(const HarmonicProblem& problem, VertexMap init, const HarmonicOptions& options) {
  if (init.size() != problem.domain().numVertices())
    throw Error("harmonic", "solve_harmonic", "map size", "vertex map does not match the domain");
  for (int v = 0; v < init.size(); ++v)
    if (problem.domain().vertex(v).marked && !init.pinned[v])
      throw Error("harmonic", "solve_harmonic", "marked vertices pinned", "marked vertex " + std::to_string(v) + " is free");
  const int bad = firstBadFace(problem, init, options.jacobianFloor);
  if (bad >= 0) throw HarmonicError("degeneration", "initial map has a non-positive Jacobian", {}, bad);
  if (options.method == HarmonicMethod::GaussSeidel) return solveGaussSeidel(problem, std::move(init), options);
  return solveNewton(problem, std::move(init), options);
}

void writeTraceCsv(const ConvergenceTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("harmonic", "writeTraceCsv", "writable path", "cannot open " + path);
  out << "sweep,energy,max_vertex_gradient\n" << std::setprecision(17);
  for (const auto& r : trace) out << r.sweep << ',' << r.energy << ',' << r.maxGradient << '\n';
}

nlohmann::json vertexMapToJson(const HarmonicProblem& problem, const VertexMap& u) {
  nlohmann::json j = nlohmann::json::object();
  for (int v = 0; v < u.size(); ++v) {
    const SurfacePoint sp = problem.atlas().locate(v, u.image[v]);
    j[std::to_string(v)] = {{"face", sp.face}, {"bary", sp.bary}, {"pinned", static_cast<bool>(u.pinned[v])}};
  }
  return j;
}

VertexMap vertexMapFromJson(const HarmonicProblem& problem, const nlohmann::json& j) {
  VertexMap u = VertexMap::identity(problem.domain());
  try {
    for (int v = 0; v < u.size(); ++v) {
      const auto& e = j.at(std::to_string(v));
      SurfacePoint sp;
      sp.face = e.at("face").get<int>();
      sp.bary = e.at("bary").get<std::array<double, 3>>();
      u.image[v] = problem.atlas().toChart(v, sp);
      if (e.contains("pinned")) u.pinned[v] = e.at("pinned").get<bool>();
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error("harmonic", "vertexMapFromJson", "schema", ex.what());
  }
  return u;
}

} // namespace conemin
