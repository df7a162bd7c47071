#pragma once

// Hyperbolic-plane primitives on the hyperboloid model, plus the cone-model
// charts used near cone points.
//
// Points live on the upper sheet { x^2 + y^2 - t^2 = -1, t > 0 } of Minkowski
// space R^{2,1}. Tangent vectors at a point X are ambient 3-vectors v with
// <X, v> = 0 for the Minkowski product. All angle parameters are fractions:
// a cone of total angle 2*pi*alpha is described by alpha.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <complex>
#include <span>

namespace conemin {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Complex = std::complex<double>;

inline double minkowski(const Vec3& a, const Vec3& b) { return a.x() * b.x() + a.y() * b.y() - a.z() * b.z(); }

// Lorentzian cross product; for X on the hyperboloid and a unit tangent v,
// lorentz_cross(X, v) is v rotated by +pi/2 in T_X.
inline Vec3 lorentz_cross(const Vec3& a, const Vec3& b) {
  Vec3 c = a.cross(b);
  c.z() = -c.z();
  return c;
}

class HPoint {
public:
  HPoint() : x_(0.0, 0.0, 1.0) {}

  // Projects an arbitrary future-timelike vector onto the hyperboloid.
  static HPoint fromAmbient(const Vec3& v);
  static HPoint fromPoincare(Complex z);
  static HPoint fromPolar(double radius, double angle);

  const Vec3& ambient() const { return x_; }
  Complex toPoincare() const { return {x_.x() / (1.0 + x_.z()), x_.y() / (1.0 + x_.z())}; }
  Vec2 toKlein() const { return {x_.x() / x_.z(), x_.y() / x_.z()}; }
  double radius() const; // distance to the origin (0,0,1)
  double angle() const { return std::atan2(x_.y(), x_.x()); }

private:
  explicit HPoint(const Vec3& x) : x_(x) {}
  Vec3 x_;
};

double dist(const HPoint& a, const HPoint& b);
// Distance in the Poincare disk, used as an independent cross-model check.
double poincareDist(Complex a, Complex b);

// Riemannian exponential / logarithm and parallel transport along geodesics.
Vec3 logMap(const HPoint& x, const HPoint& y);
HPoint expMap(const HPoint& x, const Vec3& v);
Vec3 transport(const HPoint& from, const HPoint& to, const Vec3& v);
Vec3 projectTangent(const HPoint& x, const Vec3& v);
double tangentNorm(const Vec3& v);

// Point at fraction t along the geodesic from a to b.
HPoint geodesicPoint(const HPoint& a, const HPoint& b, double t);

// Positive for counter-clockwise triples (Klein model orientation).
double orientation(const HPoint& a, const HPoint& b, const HPoint& c);

// Projective barycentric coordinates: the point normalize(sum b_k V_k). These
// are invariant under isometries and straight in the Klein model.
HPoint projectiveCombination(const std::array<HPoint, 3>& v, const std::array<double, 3>& bary);
std::array<double, 3> projectiveBarycentric(const std::array<HPoint, 3>& v, const HPoint& p);

// Places c so that d(a,c) = da, d(b,c) = db and (a,b,c) is counter-clockwise.
HPoint placeThird(const HPoint& a, const HPoint& b, double da, double db);

// Orthonormal frame of T_X.
struct TangentFrame {
  Vec3 e1;
  Vec3 e2;
  Vec2 coords(const Vec3& v) const { return {minkowski(v, e1), minkowski(v, e2)}; }
  Vec3 vector(const Vec2& c) const { return c.x() * e1 + c.y() * e2; }
};
// Frame whose first axis is the tangent projection of `reference`, which must
// not be parallel to x.
TangentFrame frameAt(const HPoint& x, const Vec3& reference);

struct HTriangle {
  std::array<double, 3> lengths; // lengths[k] is the side opposite vertex k
  std::array<double, 3> angles;  // interior angle at vertex k

  double angleSum() const { return angles[0] + angles[1] + angles[2]; }
  double area() const;
  // Vertex 0 at the origin, vertex 1 on the positive x axis, counter-clockwise.
  std::array<HPoint, 3> realize() const;
};

// Solves a hyperbolic triangle from its three side lengths (law of cosines).
HTriangle solveTriangle(double l0, double l1, double l2);
// Third side and remaining angles from two sides and the included angle.
HTriangle solveTriangleSAS(double b, double c, double angleA);
// Remaining data from one side and its two adjacent angles.
HTriangle solveTriangleASA(double angleB, double a, double angleC);

// Angle at the vertex between sides of length b and c, opposite side a.
double angleFromLengths(double a, double b, double c);

// Conformal cone chart of H^2_alpha: z~ = z^alpha / alpha maps it to the
// Poincare disk. (rho, theta) are cylindrical coordinates, theta in [0, 2*pi*alpha).
struct ConeChart {
  double alpha;

  Complex fromCylindrical(double rho, double theta) const;
  std::pair<double, double> toCylindrical(Complex z) const;
  // sigma^2 with g_alpha = sigma^2 |dz|^2
  double conformalFactor(Complex z) const;
};

// Lower bound on the distance between two cone points of angles 2*pi*a1, 2*pi*a2.
double coneSeparationBound(double alpha1, double alpha2);

// Minimizer of sum_i w_i d(x, p_i)^2.
struct CentroidResult {
  HPoint point;
  double gradientNorm = 0.0;
  int iterations = 0;
};
CentroidResult weightedCentroid(std::span<const HPoint> points, std::span<const double> weights,
                                double tolerance = 1e-12);

} // namespace conemin
