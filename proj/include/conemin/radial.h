#pragma once

// Rotationally symmetric harmonic maps between cone models.
//
// In cylindrical coordinates the map (rho, theta) -> (f(rho), k theta) with
// k = alpha'/alpha has energy density (f'^2 + k^2 sinh^2 f / sinh^2 rho) / 2,
// and its Euler-Lagrange equation is
//
//   f'' + coth(rho) f' - k^2 sinh(f) cosh(f) / sinh^2(rho) = 0.
//
// Near 0 the solutions behave like c rho^k; substituting
// f = c rho^k + b rho^(k+2) + d rho^(3k) gives b = -c k / 12 and d = c^3 / 12,
// which recovers f = rho for k = 1, c = 1. The problem is solved by shooting
// on c from rho = 1e-6 R.

#include "conemin/harmonic.h"

#include <string>
#include <vector>

namespace conemin {

struct RadialProfile {
  double alpha = 0.0;
  double alphaPrime = 0.0;
  double R = 0.0;
  double target = 0.0; // f(R)
  double c = 0.0;      // f ~ c rho^k at 0
  std::vector<double> rho, f, fPrime;
  std::vector<double> residual; // pointwise error estimate against a tighter solve
  double residualBound = 0.0;

  double k() const { return alphaPrime / alpha; }
  // Cubic Hermite interpolation of the samples; the series near 0.
  double value(double r) const;
  double derivative(double r) const;
  // Invariant norms of the map at radius r.
  double energyDensity(double r) const;
  double normD(double r) const;
  double normDbar(double r) const;
  // Hopf coefficient in the orthonormal frame (radial, angular): real.
  double hopf(double r) const;
};

// Throws Error("radial", ...) when c cannot be bracketed.
RadialProfile solveRadial(double alpha, double alphaPrime, double R, double target, double tol = 1e-10);

// Least-squares slope of ln f against ln rho over the samples with rho <= r.
double indicialExponent(const RadialProfile& p, double r);

void writeProfileCsv(const RadialProfile& p, const std::string& path);

struct MeshComparison {
  double h = 0.0;
  int vertices = 0;
  double linf = 0.0; // max over interior vertices of the target distance to the profile
  double l2 = 0.0;   // rms of the same distances
};
// Solves the discrete harmonic map between the annulus of angle alpha and
// radius p.R and the annulus of angle alpha' and radius p.target, with the
// boundary ring pinned to (p.target, k theta), and compares it with p.
MeshComparison compareWithMesh(const RadialProfile& p, double h, WeightModel model = WeightModel::Cotangent,
                               const HarmonicOptions& options = {});

} // namespace conemin
