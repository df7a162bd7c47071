#pragma once

// Discrete harmonic maps between two triangulations with the same
// combinatorics: a domain carrying a conformal structure (through its edge
// lengths) and a hyperbolic cone target.
//
// The image of domain vertex v is a point in the target chart of vertex v
// (see Atlas). Images of adjacent vertices are compared after developing both
// into a common face frame, so edge images are the geodesics homotopic to the
// target edges.

#include "conemin/atlas.h"
#include "conemin/errors.h"

#include <nlohmann/json.hpp>

#include <cmath>
#include <string>
#include <vector>

namespace conemin {

struct VertexMap {
  std::vector<HPoint> image; // image of v in the target chart of v
  std::vector<bool> pinned;

  int size() const { return static_cast<int>(image.size()); }
  // Identity map; marked and boundary vertices are pinned.
  static VertexMap identity(const ConeSurface& domain);
};

// Euclidean realization of a domain face with the same edge lengths.
struct EuclideanFace {
  std::array<Vec2, 3> p; // p[0] = 0, p[1] on the positive x axis
  std::array<double, 3> cot;
  double area = 0.0;
};
EuclideanFace euclideanFace(double l0, double l1, double l2);

enum class WeightModel {
  // w_e = (cot a + cot b) / 2 over the angles opposite e in the Euclidean
  // realizations. Invariant under scaling of the domain lengths.
  Cotangent,
  // Per face, c_k = (dA/dl_k) / l_k for the hyperbolic area A. The gradient of
  // the energy at the identity then equals the gradient of the total area of
  // the star, so the identity of a hyperbolic surface is an exact critical
  // point. Only meaningful when the domain lengths form a hyperbolic metric.
  HyperbolicArea,
};

std::vector<double> dirichletWeights(const ConeSurface& domain, WeightModel model = WeightModel::Cotangent);
// (dA/dl_k) / l_k for a hyperbolic triangle.
std::array<double, 3> hyperbolicAreaWeights(const HTriangle& t);

struct EnergyReport {
  double value = 0.0;
  std::vector<int> flippedFaces; // faces with Jacobian <= 0
};

// Per-face first-order data of the piecewise map. dz, dzbar are the complex
// derivatives in the given charts and rho2, sigma2 the domain and target
// conformal factors at the face centroid.
struct FaceDifferential {
  Complex dz;
  Complex dzbar;
  double rho2 = 1.0;
  double sigma2 = 1.0;

  double energyDensity() const { return sigma2 / rho2 * (std::norm(dz) + std::norm(dzbar)); }
  double jacobian() const { return sigma2 / rho2 * (std::norm(dz) - std::norm(dzbar)); }
  double normD() const { return std::sqrt(sigma2 / rho2) * std::abs(dz); }
  double normDbar() const { return std::sqrt(sigma2 / rho2) * std::abs(dzbar); }
  Complex hopf() const { return sigma2 * dz * std::conj(dzbar); }
  double hopfNorm() const { return std::abs(hopf()) / rho2; }
};

// Affine map w = a z + b conj(z) + c through three point pairs; returns a, b
// with unit conformal factors.
FaceDifferential affineDifferential(const std::array<Complex, 3>& z, const std::array<Complex, 3>& w);

enum class ChartKind {
  // Flat charts: the domain face in its Euclidean realization frame and the
  // image triangle realized flat with its hyperbolic edge lengths. This is the
  // representation in which the energy is exactly sum(e * area).
  Intrinsic,
  // Poincare disks centered at the domain and image centroids; the cone chart
  // when the image face touches a target cone point.
  Poincare,
};

class HarmonicProblem {
public:
  HarmonicProblem(const ConeSurface& domain, const ConeSurface& target, WeightModel model = WeightModel::Cotangent);

  const ConeSurface& domain() const { return domain_; }
  const ConeSurface& target() const { return atlas_.surface(); }
  const Atlas& atlas() const { return atlas_; }
  const std::vector<double>& weights() const { return weights_; }
  WeightModel weightModel() const { return model_; }
  const EuclideanFace& domainFace(int f) const { return domainFaces_[f]; }
  void setDomainLengths(const std::vector<double>& lengths);

  // Edges at v; for each, the other endpoint and the map from its chart into
  // the chart of v.
  struct Spoke {
    int edge;
    int other;
    Isometry otherToHere;
  };
  const std::vector<Spoke>& spokes(int v) const { return spokes_[v]; }

  std::array<HPoint, 3> faceImage(const VertexMap& u, int f) const; // in the frame of target face f
  double imageLength(const VertexMap& u, int e) const;
  double energy(const VertexMap& u) const;
  EnergyReport energyReport(const VertexMap& u) const;
  double faceJacobian(const VertexMap& u, int f) const;
  FaceDifferential faceDifferential(const VertexMap& u, int f, ChartKind kind = ChartKind::Intrinsic) const;

  // Intrinsic gradient of the energy at each vertex, as an ambient tangent
  // vector in the chart of the vertex (zero on pinned vertices).
  std::vector<Vec3> gradient(const VertexMap& u) const;
  double maxGradientNorm(const VertexMap& u) const;

private:
  void rebuildDomain();

  ConeSurface domain_;
  Atlas atlas_;
  WeightModel model_;
  std::vector<double> weights_;
  std::vector<EuclideanFace> domainFaces_;
  std::vector<std::vector<Spoke>> spokes_;
};

struct TraceRow {
  int sweep = 0;
  double energy = 0.0;
  double maxGradient = 0.0;
};
using ConvergenceTrace = std::vector<TraceRow>;
void writeTraceCsv(const ConvergenceTrace& trace, const std::string& path);

class HarmonicError : public Error {
public:
  HarmonicError(const std::string& invariant, const std::string& message, ConvergenceTrace trace, int face = -1)
      : Error("harmonic", "solve_harmonic", invariant, message), trace_(std::move(trace)), face_(face) {}
  const ConvergenceTrace& trace() const { return trace_; }
  int face() const { return face_; }

private:
  ConvergenceTrace trace_;
  int face_;
};

enum class HarmonicMethod { Newton, GaussSeidel };

struct HarmonicOptions {
  double tolerance = 1e-10; // on the per-vertex gradient norm
  HarmonicMethod method = HarmonicMethod::Newton;
  int maxIterations = 200;   // Newton steps
  int maxSweeps = 100000;    // Gauss-Seidel sweeps
  double jacobianFloor = 1e-10;
  int maxHalvings = 30;
};

struct HarmonicResult {
  VertexMap map;
  ConvergenceTrace trace;
};

// Throws HarmonicError with invariant "degeneration" when no damped step keeps
// every Jacobian above the floor, and "convergence" when the iteration budget
// runs out.
HarmonicResult solveHarmonic(const HarmonicProblem& problem, VertexMap init, const HarmonicOptions& options = {});

// {vertex_id: {face, bary, pinned}} with faces of the target.
nlohmann::json vertexMapToJson(const HarmonicProblem& problem, const VertexMap& u);
VertexMap vertexMapFromJson(const HarmonicProblem& problem, const nlohmann::json& j);

} // namespace conemin
