#include "conemin/hyperbolic.h"

#include "conemin/errors.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace conemin {

namespace {

double sinhc(double x) { return std::abs(x) < 1e-8 ? 1.0 + x * x / 6.0 : std::sinh(x) / x; }

// d coth d, the tangential eigenvalue of the Hessian of d^2/2.
double dcoth(double d) { return std::abs(d) < 1e-6 ? 1.0 + d * d / 3.0 : d / std::tanh(d); }

} // namespace

HPoint HPoint::fromAmbient(const Vec3& v) {
  const double q = minkowski(v, v);
  if (!(q < 0.0) || !(v.z() > 0.0))
    throw Error("hypcore", "HPoint", "future timelike", "vector is not future timelike");
  return HPoint(v / std::sqrt(-q));
}

HPoint HPoint::fromPoincare(Complex z) {
  const double r2 = std::norm(z);
  if (!(r2 < 1.0)) throw Error("hypcore", "fromPoincare", "|z| < 1", "point outside the unit disk");
  const double s = 1.0 / (1.0 - r2);
  return HPoint(Vec3(2.0 * z.real() * s, 2.0 * z.imag() * s, (1.0 + r2) * s));
}

HPoint HPoint::fromPolar(double radius, double angle) {
  const double s = std::sinh(radius);
  return HPoint(Vec3(s * std::cos(angle), s * std::sin(angle), std::cosh(radius)));
}

double HPoint::radius() const { return std::asinh(std::hypot(x_.x(), x_.y())); }

double dist(const HPoint& a, const HPoint& b) {
  const Vec3 diff = a.ambient() - b.ambient();
  const double chord2 = std::max(0.0, minkowski(diff, diff));
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

double poincareDist(Complex a, Complex b) {
  const double num = std::abs(a - b);
  const double den = std::abs(1.0 - std::conj(a) * b);
  return 2.0 * std::atanh(num / den);
}

double tangentNorm(const Vec3& v) { return std::sqrt(std::max(0.0, minkowski(v, v))); }

Vec3 projectTangent(const HPoint& x, const Vec3& v) { return v + minkowski(x.ambient(), v) * x.ambient(); }

Vec3 logMap(const HPoint& x, const HPoint& y) {
  const double d = dist(x, y);
  if (d == 0.0) return Vec3::Zero();
  const Vec3 u = projectTangent(x, y.ambient());
  const double n = tangentNorm(u);
  if (n == 0.0) return Vec3::Zero();
  return (d / n) * u;
}

HPoint expMap(const HPoint& x, const Vec3& v) {
  const double n = tangentNorm(v);
  return HPoint::fromAmbient(std::cosh(n) * x.ambient() + sinhc(n) * v);
}

Vec3 transport(const HPoint& from, const HPoint& to, const Vec3& v) {
  const Vec3& X = to.ambient();
  const Vec3& Y = from.ambient();
  return v + (minkowski(X, v) / (1.0 - minkowski(X, Y))) * (X + Y);
}

HPoint geodesicPoint(const HPoint& a, const HPoint& b, double t) { return expMap(a, t * logMap(a, b)); }

double orientation(const HPoint& a, const HPoint& b, const HPoint& c) {
  Eigen::Matrix3d m;
  m.col(0) = a.ambient();
  m.col(1) = b.ambient();
  m.col(2) = c.ambient();
  return m.determinant();
}

HPoint projectiveCombination(const std::array<HPoint, 3>& v, const std::array<double, 3>& bary) {
  return HPoint::fromAmbient(bary[0] * v[0].ambient() + bary[1] * v[1].ambient() + bary[2] * v[2].ambient());
}

std::array<double, 3> projectiveBarycentric(const std::array<HPoint, 3>& v, const HPoint& p) {
  Eigen::Matrix3d m;
  for (int k = 0; k < 3; ++k) m.col(k) = v[k].ambient();
  const Vec3 lambda = m.partialPivLu().solve(p.ambient());
  const double s = lambda.sum();
  return {lambda[0] / s, lambda[1] / s, lambda[2] / s};
}

double angleFromLengths(double a, double b, double c) {
  if (b <= 0.0 || c <= 0.0)
    throw Error("hypcore", "angleFromLengths", "positive adjacent sides", "degenerate triangle side");
  const double s = 0.5 * (a + b + c);
  const double p = std::max(0.0, std::sinh(s - b) * std::sinh(s - c));
  const double q = std::max(0.0, std::sinh(s) * std::sinh(s - a));
  return 2.0 * std::atan2(std::sqrt(p), std::sqrt(q));
}

HPoint placeThird(const HPoint& a, const HPoint& b, double da, double db) {
  const double dab = dist(a, b);
  if (dab == 0.0) throw Error("hypcore", "placeThird", "distinct base points", "base points coincide");
  const double theta = angleFromLengths(db, da, dab);
  const Vec3 t = logMap(a, b) / dab;
  const Vec3 n = lorentz_cross(a.ambient(), t);
  return expMap(a, da * (std::cos(theta) * t + std::sin(theta) * n));
}

TangentFrame frameAt(const HPoint& x, const Vec3& reference) {
  Vec3 e1 = projectTangent(x, reference);
  const double n = tangentNorm(e1);
  if (!(n > 0.0)) throw Error("hypcore", "frameAt", "non-degenerate reference", "reference parallel to point");
  e1 /= n;
  return {e1, lorentz_cross(x.ambient(), e1)};
}

double HTriangle::area() const { return std::numbers::pi - angleSum(); }

std::array<HPoint, 3> HTriangle::realize() const {
  const HPoint v0;
  const HPoint v1 = HPoint::fromPolar(lengths[2], 0.0);
  return {v0, v1, placeThird(v0, v1, lengths[1], lengths[0])};
}

HTriangle solveTriangle(double l0, double l1, double l2) {
  if (!(l0 > 0.0 && l1 > 0.0 && l2 > 0.0))
    throw Error("hypcore", "solveTriangle", "positive lengths", "non-positive edge length");
  if (l0 >= l1 + l2 || l1 >= l0 + l2 || l2 >= l0 + l1)
    throw Error("hypcore", "solveTriangle", "triangle inequality", "edge lengths violate the triangle inequality");
  HTriangle t;
  t.lengths = {l0, l1, l2};
  t.angles = {angleFromLengths(l0, l1, l2), angleFromLengths(l1, l2, l0), angleFromLengths(l2, l0, l1)};
  return t;
}

HTriangle solveTriangleSAS(double b, double c, double angleA) {
  const double ch = std::cosh(b) * std::cosh(c) - std::sinh(b) * std::sinh(c) * std::cos(angleA);
  return solveTriangle(std::acosh(std::max(1.0, ch)), b, c);
}

HTriangle solveTriangleASA(double angleB, double a, double angleC) {
  const double cosA = -std::cos(angleB) * std::cos(angleC) + std::sin(angleB) * std::sin(angleC) * std::cosh(a);
  const double A = std::acos(std::clamp(cosA, -1.0, 1.0));
  const double chb = (std::cos(angleB) + std::cos(A) * std::cos(angleC)) / (std::sin(A) * std::sin(angleC));
  const double chc = (std::cos(angleC) + std::cos(A) * std::cos(angleB)) / (std::sin(A) * std::sin(angleB));
  return solveTriangle(a, std::acosh(std::max(1.0, chb)), std::acosh(std::max(1.0, chc)));
}

Complex ConeChart::fromCylindrical(double rho, double theta) const {
  if (!(rho > 0.0)) throw Error("hypcore", "cone_chart_convert", "rho > 0", "cone point has no chart image");
  const double r = std::pow(alpha * std::tanh(0.5 * rho), 1.0 / alpha);
  return std::polar(r, theta / alpha);
}

std::pair<double, double> ConeChart::toCylindrical(Complex z) const {
  const double r = std::abs(z);
  const double t = std::pow(r, alpha) / alpha;
  if (!(t < 1.0)) throw Error("hypcore", "toCylindrical", "|z|^alpha < alpha", "point outside the cone chart");
  double arg = std::arg(z);
  if (arg < 0.0) arg += 2.0 * std::numbers::pi;
  return {2.0 * std::atanh(t), alpha * arg};
}

double ConeChart::conformalFactor(Complex z) const {
  const double r = std::abs(z);
  const double t = std::pow(r, alpha) / alpha;
  const double den = 1.0 - t * t;
  return 4.0 * std::pow(r, 2.0 * alpha - 2.0) / (den * den);
}

double coneSeparationBound(double alpha1, double alpha2) {
  using std::numbers::pi;
  if (!(alpha1 > 0.0 && alpha1 < 0.5 && alpha2 > 0.0 && alpha2 < 0.5))
    throw Error("hypcore", "coneSeparationBound", "0 < alpha < 1/2", "cone parameter out of range");
  const double c = (1.0 + std::cos(pi * alpha1) * std::cos(pi * alpha2)) / (std::sin(pi * alpha1) * std::sin(pi * alpha2));
  return std::acosh(c);
}

CentroidResult weightedCentroid(std::span<const HPoint> points, std::span<const double> weights, double tolerance) {
  if (points.empty() || points.size() != weights.size())
    throw Error("hypcore", "weightedCentroid", "matching non-empty inputs", "points and weights mismatch");
  double wsum = 0.0;
  double wabs = 0.0;
  Vec3 acc = Vec3::Zero();
  for (std::size_t i = 0; i < points.size(); ++i) {
    wsum += weights[i];
    wabs += std::abs(weights[i]);
    acc += std::max(weights[i], 0.0) * points[i].ambient();
  }
  if (!(wsum > 0.0)) throw Error("hypcore", "weightedCentroid", "positive total weight", "total weight not positive");

  CentroidResult res;
  res.point = HPoint::fromAmbient(acc);
  for (int it = 0; it < 100; ++it) {
    const TangentFrame fr = frameAt(res.point, std::abs(res.point.ambient().x()) < 0.5 ? Vec3(1, 0, 0) : Vec3(0, 1, 0));
    Vec2 g = Vec2::Zero();
    Mat2 H = Mat2::Zero();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec2 l = fr.coords(logMap(res.point, points[i]));
      const double d = l.norm();
      g += weights[i] * l;
      if (d > 0.0) {
        const Vec2 u = l / d;
        const double k = dcoth(d);
        H += weights[i] * (u * u.transpose() + k * (Mat2::Identity() - u * u.transpose()));
      } else {
        H += weights[i] * Mat2::Identity();
      }
    }
    res.gradientNorm = g.norm();
    res.iterations = it;
    if (res.gradientNorm <= tolerance) break;
    Vec2 step;
    if (H.determinant() > 0.0 && H.trace() > 0.0) step = H.ldlt().solve(g);
    else step = g / wabs;
    res.point = expMap(res.point, fr.vector(step));
  }
  return res;
}

} // namespace conemin
