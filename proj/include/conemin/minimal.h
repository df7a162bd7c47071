#pragma once

// The graph of (u1, u2) in the product of the two targets, its induced metric
// and the checks run on it: conformality (Phi1 + Phi2 = 0), area against
// energy, and the inequalities w2 <= w1, e(u2) <= e(u1) and the second
// variation of area along deformations of u2.

#include "conemin/hopf.h"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace conemin {

struct ProductGraph {
  const HarmonicProblem* p1 = nullptr;
  const HarmonicProblem* p2 = nullptr;
  VertexMap u1, u2;
  std::vector<double> lengths;   // per edge, sqrt(d1^2 + d2^2)
  std::vector<HPoint> psi;       // Psi = u2 o u1^-1 at target-1 vertex w, in the target-2 chart of w
  std::vector<int> psiFlipped;   // target-1 faces whose Psi image is not positively oriented
  double psiImageAreaRatio = 0;  // signed area of the Psi image over the area of target 2
};

// Throws "not a graph over factor 1" when u1 has a face with Jacobian <= 0.
ProductGraph assemble(const HarmonicProblem& p1, const VertexMap& u1, const HarmonicProblem& p2, const VertexMap& u2);

// Psi at a point of target 1, as a point of target 2 in the chart of vertex
// `chart`. Searches domain faces outward from the star of `hint`.
HPoint composeAt(const ProductGraph& g, const SurfacePoint& y, int hint, int chart);
// max_v dist(Psi(u1(v)), u2(v)) over domain vertices.
double compositionError(const ProductGraph& g);

// Sum of the Euclidean angles at v of the induced triangles.
double graphAngleSum(const ProductGraph& g, int v);
double graphArea(const ProductGraph& g);
double targetArea(const ConeSurface& s); // hyperbolic area of all faces

struct AreaEnergy {
  double area = 0.0;   // sum of area_f sqrt((e1 + e2)^2 - 4 |Phi1 + Phi2|^2)
  double energy = 0.0; // E(u1) + E(u2)
  double gap = 0.0;
};
// Throws when a face discriminant is below -1e-12 (e1 + e2)^2.
AreaEnergy areaEnergyGap(const ProductGraph& g);

struct Certificate {
  double maxHopfSum = 0.0;
  AreaEnergy areaEnergy;
  double gapRatio() const { return areaEnergy.gap / areaEnergy.energy; }
};
Certificate conformalityCertificate(const ProductGraph& g);

// Fit A(h) = limit + C h^p through three (h, A) samples with distinct h;
// p from the ratio of successive differences.
struct PowerLawLimit {
  double limit = 0.0;
  double exponent = 0.0;
  double coefficient = 0.0;
};
PowerLawLimit extrapolatePowerLaw(const std::array<double, 3>& h, const std::array<double, 3>& values);

struct SlopeFit {
  double slope = 0.0;
  double residual = 0.0;
  int points = 0;
};
// Least-squares slope of w2 - w1 against ln|z| over the faces of combinatorial
// rings 1..rings around marked vertex p; |z| from the cone chart of the domain.
SlopeFit wDifferenceSlope(const ProductGraph& g, int p, int rings = 4);

struct StabilityOptions {
  double epsH = 0.0;        // slack for the pointwise and A'' checks
  int samples = 50;
  int smoothing = 3;        // Laplacian steps applied to the random fields
  std::uint64_t seed = 1;
  double fdStep = 1e-3;     // along psi normalized to unit L2 norm
};

struct StabilitySample {
  double secondVariation = 0.0; // E2'' - 4 sum area |Phi2'|^2 / (e1 + e2)
  double energyTerm = 0.0;      // E2''
  double hopfTerm = 0.0;
  double directArea = 0.0;      // second difference of the graph area
};

struct StabilityReport {
  bool hypothesis = false; // alpha_i < alpha'_i at every marked vertex
  std::vector<double> w1, w2, e1, e2;
  int wCompared = 0;
  double wPassRate = 0.0;
  double ePassRate = 0.0;
  double hopfNormMismatch = 0.0;    // max over faces of | |Phi1| - |Phi2| |
  double hopfNormMismatchRel = 0.0; // L2 of the difference over L2 of |Phi1|
  std::vector<StabilitySample> samples;
  double minSecondVariation = 0.0;  // over samples; psi has unit norm
  int secondVariationPasses = 0;
};
StabilityReport stabilitySuite(const ProductGraph& g, const StabilityOptions& opts);

// Rows (vertex, face, radius, w1, w2, e1, e2) for faces within `radius` of each marked vertex.
void writeMarkedProfileCsv(const ProductGraph& g, const StabilityReport& r, double radius, const std::string& path);

} // namespace conemin
