#include "conemin/radial.h"

#include "conemin/errors.h"
#include "conemin/fixtures.h"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

namespace conemin {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

struct Overflow {};

struct RadialSystem {
  double k2;
  void operator()(const State& y, State& dy, double r) const {
    const double s = std::sinh(r);
    dy[0] = y[1];
    dy[1] = k2 * std::sinh(y[0]) * std::cosh(y[0]) / (s * s) - y[1] / std::tanh(r);
  }
};

State seriesStart(double c, double k, double r) {
  const double rk = std::pow(r, k), r3k = std::pow(r, 3.0 * k);
  const double b = -c * k / 12.0, d = c * c * c / 12.0;
  return {c * rk + b * rk * r * r + d * r3k, c * k * rk / r + b * (k + 2.0) * rk * r + 3.0 * k * d * r3k / r};
}

constexpr double kBlowUp = 60.0;

// f(R) for launch coefficient c; +inf when the solution blows up.
double shoot(double c, double k, double eps, double R, double tol) {
  State y = seriesStart(c, k, eps);
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_adaptive(stepper, RadialSystem{k * k}, y, eps, R, 1e-3 * eps, [](const State& s, double) {
      if (!(std::abs(s[0]) < kBlowUp)) throw Overflow{};
    });
  } catch (const Overflow&) {
    return INFINITY;
  }
  return y[0];
}

double solveLaunch(double k, double eps, double R, double target, double tol) {
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (shoot(hi, k, eps, R, tol) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw Error("radial", "solve_radial", "bracket", "no launch coefficient reaches the target");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shoot(mid, k, eps, R, tol) < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> sampleGrid(double eps, double R) {
  std::vector<double> g;
  const double split = 0.02 * R;
  const int nGeo = 200, nLin = 2000;
  for (int i = 0; i < nGeo; ++i) g.push_back(eps * std::pow(split / eps, static_cast<double>(i) / nGeo));
  for (int i = 0; i <= nLin; ++i) g.push_back(split + (R - split) * i / nLin);
  return g;
}

void sample(double c, double k, double eps, double tol, const std::vector<double>& grid, std::vector<double>& f,
            std::vector<double>& fp) {
  State y = seriesStart(c, k, eps);
  f.clear();
  fp.clear();
  odeint::integrate_times(odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>()), RadialSystem{k * k},
                          y, grid.begin(), grid.end(), 1e-3 * eps, [&](const State& s, double) {
                            f.push_back(s[0]);
                            fp.push_back(s[1]);
                          });
}

} // namespace

RadialProfile solveRadial(double alpha, double alphaPrime, double R, double target, double tol) {
  if (!(alpha > 0.0 && alpha < 0.5 && alphaPrime > 0.0 && alphaPrime < 0.5))
    throw Error("radial", "solve_radial", "0 < alpha, alpha' < 1/2", "angle fraction out of range");
  if (!(R > 0.0 && target > 0.0 && tol > 0.0))
    throw Error("radial", "solve_radial", "R, R_target > 0", "invalid radius or tolerance");
  RadialProfile p;
  p.alpha = alpha;
  p.alphaPrime = alphaPrime;
  p.R = R;
  p.target = target;
  const double k = p.k(), eps = 1e-6 * R;
  p.c = solveLaunch(k, eps, R, target, tol);
  p.rho = sampleGrid(eps, R);
  sample(p.c, k, eps, tol, p.rho, p.f, p.fPrime);

  const double fine = tol * 1e-3;
  std::vector<double> fr, fpr;
  sample(solveLaunch(k, eps, R, target, fine), k, eps, fine, p.rho, fr, fpr);
  p.residual.resize(p.rho.size());
  for (std::size_t i = 0; i < p.rho.size(); ++i) {
    p.residual[i] = std::abs(p.f[i] - fr[i]) + std::abs(p.fPrime[i] - fpr[i]);
    p.residualBound = std::max(p.residualBound, p.residual[i]);
  }
  for (double d : p.fPrime)
    if (!(d > 0.0)) throw Error("radial", "solve_radial", "f' > 0", "profile is not increasing");
  return p;
}

namespace {

std::size_t interval(const RadialProfile& p, double r) {
  const auto it = std::upper_bound(p.rho.begin(), p.rho.end(), r);
  return std::min<std::size_t>(std::max<std::ptrdiff_t>(it - p.rho.begin(), 1), p.rho.size() - 1) - 1;
}

} // namespace

double RadialProfile::value(double r) const {
  if (r <= rho.front()) return seriesStart(c, k(), r)[0];
  const std::size_t i = interval(*this, r);
  const double h = rho[i + 1] - rho[i], t = (r - rho[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t), h01 = t * t * (3 - 2 * t),
               h11 = t * t * (t - 1);
  return h00 * f[i] + h10 * h * fPrime[i] + h01 * f[i + 1] + h11 * h * fPrime[i + 1];
}

double RadialProfile::derivative(double r) const {
  if (r <= rho.front()) return seriesStart(c, k(), r)[1];
  const std::size_t i = interval(*this, r);
  const double h = rho[i + 1] - rho[i], t = (r - rho[i]) / h;
  const double d00 = 6 * t * (t - 1), d10 = (1 - t) * (1 - 3 * t), d01 = -6 * t * (t - 1), d11 = t * (3 * t - 2);
  return (d00 * f[i] + d01 * f[i + 1]) / h + d10 * fPrime[i] + d11 * fPrime[i + 1];
}

double RadialProfile::energyDensity(double r) const {
  const double a = derivative(r), b = k() * std::sinh(value(r)) / std::sinh(r);
  return 0.5 * (a * a + b * b);
}

double RadialProfile::normD(double r) const {
  return 0.5 * (derivative(r) + k() * std::sinh(value(r)) / std::sinh(r));
}

double RadialProfile::normDbar(double r) const {
  return 0.5 * std::abs(derivative(r) - k() * std::sinh(value(r)) / std::sinh(r));
}

double RadialProfile::hopf(double r) const {
  const double a = derivative(r), b = k() * std::sinh(value(r)) / std::sinh(r);
  return 0.25 * (a * a - b * b);
}

double indicialExponent(const RadialProfile& p, double r) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < p.rho.size() && p.rho[i] <= r; ++i) {
    const double x = std::log(p.rho[i]), y = std::log(p.f[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw Error("radial", "indicialExponent", "at least two samples", "radius too small");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void writeProfileCsv(const RadialProfile& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("radial", "writeProfileCsv", "writable path", "cannot open " + path);
  out << "rho,f,f_prime,ode_residual\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.rho.size(); ++i)
    out << p.rho[i] << ',' << p.f[i] << ',' << p.fPrime[i] << ',' << p.residual[i] << '\n';
}

MeshComparison compareWithMesh(const RadialProfile& p, double h, WeightModel model, const HarmonicOptions& options) {
  AnnulusGrid g = annulusGridForResolution(p.alpha, p.R, h);
  AnnulusGrid gt = g;
  gt.alpha = p.alphaPrime;
  gt.rhoMax = p.target;
  const ConeSurface D = buildConeAnnulus(g), T = buildConeAnnulus(gt);
  const HarmonicProblem problem(D, T, model);
  const VertexMap u = solveHarmonic(problem, VertexMap::identity(D), options).map;
  const Atlas& A = problem.atlas();
  const double period = 2.0 * std::numbers::pi * p.alphaPrime;
  MeshComparison out;
  out.h = h;
  double sum = 0.0;
  for (int v = 1; v < D.numVertices(); ++v) {
    if (D.vertex(v).boundary) continue;
    // position in the chart of the cone point, against (f(rho), k theta)
    const HPoint y = A.toChart(0, A.locate(v, u.image[v]));
    const HPoint y0 = A.toChart(0, A.locate(v, HPoint()));
    const double dtheta = std::remainder(y.angle() - y0.angle(), period);
    const double e = dist(HPoint::fromPolar(y.radius(), 0.0), HPoint::fromPolar(p.value(g.rho(g.ringOf(v))), dtheta));
    out.linf = std::max(out.linf, e);
    sum += e * e;
    ++out.vertices;
  }
  out.l2 = out.vertices > 0 ? std::sqrt(sum / out.vertices) : 0.0;
  return out;
}

} // namespace conemin
