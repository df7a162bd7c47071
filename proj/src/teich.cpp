#include "conemin/teich.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <numeric>

#include "conemin/fixtures.h"

namespace conemin {

using std::numbers::pi;

namespace {

// Rows map a symmetric tensor (h00, h01, h11) to h(e_k, e_k).
Eigen::Matrix3d edgeSystem(const EuclideanFace& face) {
  Eigen::Matrix3d A;
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = face.p[(k + 2) % 3] - face.p[(k + 1) % 3];
    A.row(k) << e.x() * e.x(), 2.0 * e.x() * e.y(), e.y() * e.y();
  }
  return A;
}

} // namespace

Eigen::Matrix2d tensorFromEdges(const EuclideanFace& face, const std::array<double, 3>& values) {
  const Eigen::Vector3d x = edgeSystem(face).partialPivLu().solve(Eigen::Vector3d(values[0], values[1], values[2]));
  Eigen::Matrix2d h;
  h << x(0), x(1), x(1), x(2);
  return h;
}

FaceTensors pullbackTensors(const HarmonicProblem& problem, const VertexMap& u) {
  FaceTensors out(problem.domain().numFaces());
  for (int f = 0; f < problem.domain().numFaces(); ++f) {
    const auto x = problem.faceImage(u, f);
    std::array<double, 3> d2;
    for (int k = 0; k < 3; ++k) {
      const double d = dist(x[(k + 1) % 3], x[(k + 2) % 3]);
      d2[k] = d * d;
    }
    out[f] = tensorFromEdges(problem.domainFace(f), d2);
  }
  return out;
}

Eigen::Matrix2d traceFree(const Eigen::Matrix2d& g) { return g - 0.5 * g.trace() * Eigen::Matrix2d::Identity(); }

double s2Pairing(const HarmonicProblem& problem, const FaceTensors& a, const FaceTensors& b) {
  double sum = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f)
    sum += problem.domainFace(static_cast<int>(f)).area * 0.5 * (a[f] * b[f]).trace();
  return sum;
}

double wpPairing(const HarmonicProblem& problem, const FaceTensors& a, const FaceTensors& b) {
  return 8.0 * s2Pairing(problem, a, b);
}

double wpPairing(const HarmonicProblem& problem, const DeformationDirection& a, const DeformationDirection& b) {
  return wpPairing(problem, a.tensor, b.tensor);
}

FaceTensors metricVariation(const HarmonicProblem& problem, const std::vector<double>& deltaSquaredLength) {
  const ConeSurface& s = problem.domain();
  FaceTensors out(s.numFaces());
  for (int f = 0; f < s.numFaces(); ++f) {
    std::array<double, 3> v;
    for (int k = 0; k < 3; ++k) v[k] = deltaSquaredLength[s.faceEdge(f, k)];
    out[f] = tensorFromEdges(problem.domainFace(f), v);
  }
  return out;
}

std::vector<double> squaredLengthGradient(const HarmonicProblem& problem, const FaceTensors& t) {
  const ConeSurface& s = problem.domain();
  std::vector<double> g(s.numEdges(), 0.0);
  for (int f = 0; f < s.numFaces(); ++f) {
    const EuclideanFace& face = problem.domainFace(f);
    const Eigen::Vector3d c(t[f](0, 0), 2.0 * t[f](0, 1), t[f](1, 1));
    const Eigen::Vector3d y = edgeSystem(face).transpose().partialPivLu().solve(c);
    for (int k = 0; k < 3; ++k) g[s.faceEdge(f, k)] += 0.5 * face.area * y(k);
  }
  return g;
}

namespace {

bool triangleInequalities(const ConeSurface& s, const std::vector<double>& l) {
  for (int f = 0; f < s.numFaces(); ++f) {
    const double a = l[s.faceEdge(f, 0)], b = l[s.faceEdge(f, 1)], c = l[s.faceEdge(f, 2)];
    if (!(a < b + c && b < a + c && c < a + b)) return false;
  }
  return true;
}

} // namespace

TorusChart::TorusChart(ConeSurface reference, const std::vector<Vec2>& xi, double beta)
    : reference_(std::move(reference)), xi_(xi), beta_(beta) {
  if (static_cast<int>(xi.size()) != reference_.numVertices())
    throw Error("teich", "TorusChart", "one lattice point per vertex", "coordinate count mismatch");
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("teich", "TorusChart", "0 < beta <= 1", "invalid cone factor");
  delta_.resize(reference_.numEdges());
  for (int e = 0; e < reference_.numEdges(); ++e) {
    Vec2 d = xi[reference_.edge(e)[1]] - xi[reference_.edge(e)[0]];
    d.x() -= std::round(d.x());
    d.y() -= std::round(d.y());
    delta_[e] = d;
  }
}

TorusChart TorusChart::forGrid(const ConeSurface& grid, double beta) {
  const int n = static_cast<int>(std::lround(std::sqrt(grid.numVertices() / 2.0)));
  if (2 * n * n != grid.numVertices()) throw Error("teich", "TorusChart", "torus grid", "vertex count is not 2 n^2");
  return TorusChart(grid, torusGridCoordinates(n), beta);
}

namespace {

// theta_1(v | tau) = 2 sum (-1)^n q^((n+1/2)^2) sin((2n+1) v), q = exp(i pi tau),
// with its derivatives in v and tau.
struct Theta {
  Complex value, dv, dtau;
};

Theta theta1(Complex v, Complex tau) {
  const Complex I(0.0, 1.0);
  Theta t{0.0, 0.0, 0.0};
  for (int n = 0; n < 12; ++n) {
    const double m = n + 0.5, sign = n % 2 ? -1.0 : 1.0;
    const Complex q = std::exp(I * pi * tau * m * m);
    const double k = 2.0 * n + 1.0;
    t.value += 2.0 * sign * q * std::sin(k * v);
    t.dv += 2.0 * sign * q * k * std::cos(k * v);
    t.dtau += 2.0 * sign * I * pi * m * m * q * std::sin(k * v);
  }
  return t;
}

} // namespace

TorusChart::Factor TorusChart::factor(int v, Complex tau) const {
  Factor out;
  if (beta_ == 1.0 || v == 0) return out;
  // Green's function log|theta_1(pi z)/theta_1'(0)| - pi (Im z)^2 / Im tau at z = a + tau b
  const double a = xi_[v].x() - std::round(xi_[v].x()), b = xi_[v].y() - std::round(xi_[v].y());
  const Complex z = a + tau * b;
  const Theta th = theta1(pi * z, tau), d0 = theta1(0.0, tau);
  // theta_1'(0) = d0.dv; its tau derivative from the series of k cos(k v) at v = 0
  Complex d0tau = 0.0;
  for (int n = 0; n < 12; ++n) {
    const double m = n + 0.5, sign = n % 2 ? -1.0 : 1.0;
    d0tau += 2.0 * sign * Complex(0.0, 1.0) * pi * m * m * std::exp(Complex(0.0, 1.0) * pi * tau * m * m) * (2.0 * n + 1.0);
  }
  const double G = std::log(std::abs(th.value / d0.dv)) - pi * b * b * tau.imag();
  // holomorphic tau derivative of log(theta_1(pi z)/theta_1'(0))
  const Complex F = (th.dv * pi * b + th.dtau) / th.value - d0tau / d0.dv;
  out.phi = (beta_ - 1.0) * G;
  out.dphi(0) = (beta_ - 1.0) * F.real();
  out.dphi(1) = (beta_ - 1.0) * (-F.imag() - pi * b * b);
  return out;
}

std::vector<double> TorusChart::lengths(Complex tau) const {
  std::vector<double> l(delta_.size());
  for (std::size_t e = 0; e < l.size(); ++e) {
    const auto [a, b] = reference_.edge(static_cast<int>(e));
    const double flat = std::abs(delta_[e].x() + tau * delta_[e].y());
    if (a == 0 && beta_ != 1.0)
      l[e] = flat * std::exp(factor(b, tau).phi) / beta_;
    else
      l[e] = flat * std::exp(0.5 * (factor(a, tau).phi + factor(b, tau).phi));
  }
  return l;
}

std::array<std::vector<double>, 2> TorusChart::squaredLengthJacobian(Complex tau) const {
  std::array<std::vector<double>, 2> J{std::vector<double>(delta_.size()), std::vector<double>(delta_.size())};
  const auto l = lengths(tau);
  for (std::size_t e = 0; e < delta_.size(); ++e) {
    const Vec2& d = delta_[e];
    const auto [a, b] = reference_.edge(static_cast<int>(e));
    const double flat2 = std::norm(d.x() + tau * d.y());
    const double l2 = l[e] * l[e];
    Eigen::Vector2d dlog(2.0 * (d.x() + tau.real() * d.y()) * d.y() / flat2, 2.0 * tau.imag() * d.y() * d.y() / flat2);
    if (a == 0 && beta_ != 1.0)
      dlog += 2.0 * factor(b, tau).dphi;
    else
      dlog += factor(a, tau).dphi + factor(b, tau).dphi;
    J[0][e] = l2 * dlog(0);
    J[1][e] = l2 * dlog(1);
  }
  return J;
}

ConeSurface TorusChart::surface(Complex tau) const {
  std::vector<VertexInfo> verts(reference_.numVertices());
  for (int v = 0; v < reference_.numVertices(); ++v)
    verts[v] = {reference_.vertex(v).marked, v == 0 ? beta_ : 1.0, false};
  ConeSurface s(std::move(verts), reference_.faces());
  const auto l = lengths(tau);
  for (int e = 0; e < s.numEdges(); ++e) s.setLength(e, l[e]);
  return s;
}

nlohmann::json ConformalState::toJson(const std::string& referencePath) const {
  return {{"reference", referencePath}, {"tau", {tau.real(), tau.imag()}}};
}

double DeformationDirection::wpNorm() const {
  return std::sqrt(std::max(0.0, chartGradient.dot(chartMetric.ldlt().solve(chartGradient))));
}

TeichProblem::TeichProblem(TorusChart chart, const ConeSurface& g1, const ConeSurface& g2, HarmonicOptions inner)
    : chart_(std::move(chart)), p1_(chart_.surface({0.0, 1.0}), g1), p2_(chart_.surface({0.0, 1.0}), g2),
      inner_(inner) {}

TotalEnergy TeichProblem::energyAt(const std::vector<double>& l, const TotalEnergy* warm) {
  if (!triangleInequalities(p1_.domain(), l))
    throw Error("teich", "total_energy", "triangle inequality", "domain lengths violate a triangle inequality");
  p1_.setDomainLengths(l);
  p2_.setDomainLengths(l);
  TotalEnergy t;
  t.u1 = solveHarmonic(p1_, warm ? warm->u1 : VertexMap::identity(p1_.domain()), inner_).map;
  t.u2 = solveHarmonic(p2_, warm ? warm->u2 : VertexMap::identity(p2_.domain()), inner_).map;
  t.E1 = p1_.energy(t.u1);
  t.E2 = p2_.energy(t.u2);
  t.E = t.E1 + t.E2;
  return t;
}

TotalEnergy TeichProblem::totalEnergy(const ConformalState& c, const TotalEnergy* warm) {
  if (!(c.tau.imag() > 0.0)) throw Error("teich", "total_energy", "Im tau > 0", "modulus outside the upper half plane");
  return energyAt(chart_.lengths(c.tau), warm);
}

DeformationDirection TeichProblem::wpGradient(const ConformalState& c, const TotalEnergy& t) const {
  const FaceTensors g1 = pullbackTensors(p1_, t.u1), g2 = pullbackTensors(p2_, t.u2);
  DeformationDirection d;
  d.tensor.resize(g1.size());
  for (std::size_t f = 0; f < g1.size(); ++f) d.tensor[f] = -traceFree(g1[f] + g2[f]);
  const std::vector<double> sq = squaredLengthGradient(p1_, d.tensor);
  d.logScaleGradient.resize(sq.size());
  for (std::size_t e = 0; e < sq.size(); ++e) {
    const double l = p1_.domain().length(static_cast<int>(e));
    d.logScaleGradient[e] = sq[e] * 2.0 * l * l;
  }
  const auto J = chart_.squaredLengthJacobian(c.tau);
  std::array<FaceTensors, 2> h;
  for (int a = 0; a < 2; ++a) {
    d.chartGradient(a) = std::inner_product(sq.begin(), sq.end(), J[a].begin(), 0.0);
    h[a] = metricVariation(p1_, J[a]);
    for (auto& x : h[a]) x = traceFree(x);
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) d.chartMetric(a, b) = wpPairing(p1_, h[a], h[b]);
  return d;
}

double TeichProblem::predictedDerivative(const DeformationDirection& grad, const std::vector<double>& eta) const {
  const ConeSurface& s = p1_.domain();
  double sum = 0.0;
  for (int e = 0; e < s.numEdges(); ++e) sum += grad.logScaleGradient[e] * eta[e];
  return sum;
}

double TeichProblem::maxHopfSum(const TotalEnergy& t) const {
  const QuadDiffField q = sum(hopfField(p1_, t.u1), hopfField(p2_, t.u2));
  double m = 0.0;
  for (std::size_t f = 0; f < q.phi.size(); ++f) m = std::max(m, q.norm(static_cast<int>(f)));
  return m;
}

DescentResult TeichProblem::descend(ConformalState c, const DescentOptions& opts) {
  TotalEnergy t = totalEnergy(c);
  DescentTrace trace;
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero(); // inverse Hessian estimate
  Eigen::Vector2d prevX, prevG;
  double step = 0.0, first = 0.0;
  for (int iter = 0;; ++iter) {
    const DeformationDirection grad = wpGradient(c, t);
    DescentRow row;
    row.iter = iter;
    row.E = t.E;
    row.E1 = t.E1;
    row.E2 = t.E2;
    row.wpGradNorm = grad.wpNorm();
    row.step = step;
    row.tau = c.tau;
    const QuadDiffField q = sum(hopfField(p1_, t.u1), hopfField(p2_, t.u2));
    for (std::size_t f = 0; f < q.phi.size(); ++f)
      row.hopfSumMax = std::max(row.hopfSumMax, q.norm(static_cast<int>(f)));
    row.hopfSumResidual = holomorphicityResidual(p1_, q);
    trace.push_back(row);
    if (iter == 0) first = row.wpGradNorm;
    if (row.wpGradNorm <= std::max(opts.tolerance, opts.relativeTolerance * first))
      return {c, std::move(t), std::move(trace)};
    if (iter >= opts.maxIterations) throw DescentError("convergence", "outer iteration budget exhausted", trace);

    const Eigen::Vector2d x(c.tau.real(), c.tau.imag()), g = grad.chartGradient;
    if (iter == 0) {
      H = grad.chartMetric.inverse();
    } else {
      const Eigen::Vector2d s = x - prevX, y = g - prevG;
      const double sy = s.dot(y);
      if (sy > 1e-14 * s.norm() * y.norm()) {
        const Eigen::Matrix2d V = Eigen::Matrix2d::Identity() - y * s.transpose() / sy;
        H = V.transpose() * H * V + s * s.transpose() / sy;
      }
    }
    Eigen::Vector2d d = -H * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      H = grad.chartMetric.inverse();
      d = -H * g;
      slope = g.dot(d);
    }
    double tau = std::min(1.0, 0.5 * c.tau.imag() / d.norm());
    bool accepted = false;
    for (; tau >= opts.minStep; tau *= 0.5) {
      const ConformalState cn{c.tau + tau * Complex(d(0), d(1))};
      if (!(cn.tau.imag() > 0.0)) continue;
      TotalEnergy tn;
      try {
        tn = totalEnergy(cn, &t);
      } catch (const HarmonicError&) {
        continue;
      }
      if (tn.E <= t.E + opts.armijo * tau * slope) {
        c = cn;
        t = std::move(tn);
        step = tau;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      totalEnergy(c, &t); // restore the domain of the inner problems
      throw DescentError("stalled", "step underflow in the line search", trace);
    }
    prevX = x;
    prevG = g;
  }
}

std::vector<AuditRow> TeichProblem::gradientAudit(const ConformalState& c,
                                                  const std::vector<std::vector<double>>& directions, double eps) {
  const std::vector<double> l = chart_.lengths(c.tau);
  for (const auto& eta : directions) {
    if (eta.size() != l.size())
      throw Error("teich", "wp_gradient", "direction size", "direction does not match the edge count");
    if (std::all_of(eta.begin(), eta.end(), [](double x) { return x == 0.0; }))
      throw Error("teich", "wp_gradient", "nonzero direction", "zero perturbation direction");
  }
  const TotalEnergy base = energyAt(l);
  const DeformationDirection grad = wpGradient(c, base);
  std::vector<AuditRow> rows;
  for (const auto& eta : directions) rows.push_back({0.0, predictedDerivative(grad, eta), 0.0});
  for (std::size_t i = 0; i < directions.size(); ++i) {
    std::vector<double> plus = l, minus = l;
    for (std::size_t e = 0; e < l.size(); ++e) {
      plus[e] *= std::exp(eps * directions[i][e]);
      minus[e] *= std::exp(-eps * directions[i][e]);
    }
    const double ep = energyAt(plus, &base).E, em = energyAt(minus, &base).E;
    rows[i].fd = (ep - em) / (2.0 * eps);
    rows[i].relError = std::abs(rows[i].fd - rows[i].predicted) / std::max(std::abs(rows[i].predicted), 1e-300);
  }
  energyAt(l, &base);
  return rows;
}

void writeDescentCsv(const DescentTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("teich", "writeDescentCsv", "writable path", "cannot open " + path);
  out << "iter,E,E1,E2,wp_grad_norm,step,hopf_sum_residual,hopf_sum_max,tau_re,tau_im\n" << std::setprecision(17);
  for (const auto& r : trace)
    out << r.iter << ',' << r.E << ',' << r.E1 << ',' << r.E2 << ',' << r.wpGradNorm << ',' << r.step << ','
        << r.hopfSumResidual << ',' << r.hopfSumMax << ',' << r.tau.real() << ',' << r.tau.imag() << '\n';
}

std::vector<ProbeRow> propernessProbe(TeichProblem& problem, const std::vector<std::pair<double, ConformalState>>& path) {
  std::vector<ProbeRow> rows;
  TotalEnergy prev;
  bool havePrev = false;
  for (const auto& [param, state] : path) {
    try {
      TotalEnergy t = problem.totalEnergy(state, havePrev ? &prev : nullptr);
      rows.push_back({param, t.E, true});
      prev = std::move(t);
      havePrev = true;
    } catch (const Error&) {
      rows.push_back({param, 0.0, false});
      break;
    }
  }
  return rows;
}

bool propernessVerdict(const std::vector<ProbeRow>& rows, int tail) {
  std::vector<double> E;
  for (const auto& r : rows)
    if (r.valid) E.push_back(r.E);
  if (static_cast<int>(E.size()) < std::max(tail, 2)) return false;
  for (std::size_t i = E.size() - tail + 1; i < E.size(); ++i)
    if (!(E[i] > E[i - 1])) return false;
  return E.back() > 10.0 * E.front();
}

std::vector<double> gaugeNormalizedLengths(const std::vector<double>& lengths, const ConeSurface& s) {
  double area = 0.0;
  for (int f = 0; f < s.numFaces(); ++f)
    area += euclideanFace(lengths[s.faceEdge(f, 0)], lengths[s.faceEdge(f, 1)], lengths[s.faceEdge(f, 2)]).area;
  std::vector<double> l = lengths;
  for (double& x : l) x /= std::sqrt(area);
  return l;
}

} // namespace conemin
