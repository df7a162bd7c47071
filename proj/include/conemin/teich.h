#pragma once

// Outer loop: descent of E(c) = E(u1) + E(u2) over conformal structures c of
// the domain, where u_i is the harmonic map from (domain, c) to g_i.
//
// For the cotangent energy the derivative of E in any edge-length variation,
// written per face as a metric variation h, is exactly
//   sum_f area_f <h_f, -2 Re(Phi_1 + Phi_2)_f>,   <a, b> = tr(a b) / 2
// in the orthonormal face frame. The conformal structures themselves are
// parametrized by a Teichmueller chart: for a once-marked torus, the flat
// torus C / (Z + tau Z) carrying the reference combinatorics.

#include "conemin/hopf.h"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace conemin {

// Symmetric tensor per face in the orthonormal frame of its Euclidean realization.
using FaceTensors = std::vector<Eigen::Matrix2d>;

// Tensor h on face f with h(e_k, e_k) = values[k] for the three edge vectors.
Eigen::Matrix2d tensorFromEdges(const EuclideanFace& face, const std::array<double, 3>& values);
// Pullback of the target metric, flattened: G(e_k, e_k) = d_k^2.
FaceTensors pullbackTensors(const HarmonicProblem& problem, const VertexMap& u);
Eigen::Matrix2d traceFree(const Eigen::Matrix2d& g);

// <a, b> = tr(a b) / 2 on each face, weighted by area.
double s2Pairing(const HarmonicProblem& problem, const FaceTensors& a, const FaceTensors& b);
// Weil-Petersson pairing: 8 times the S^2 pairing.
double wpPairing(const HarmonicProblem& problem, const FaceTensors& a, const FaceTensors& b);

// Metric variation per face induced by per-edge changes of squared length.
FaceTensors metricVariation(const HarmonicProblem& problem, const std::vector<double>& deltaSquaredLength);
// Adjoint of metricVariation: d/d(l_e^2) of s2Pairing(t, metricVariation(.)).
std::vector<double> squaredLengthGradient(const HarmonicProblem& problem, const FaceTensors& t);

// Torus C / (Z + tau Z) with vertex v at lattice coordinates xi_v; each edge
// is the shortest straight segment between its endpoints, scaled by the
// conformal factor exp(phi) at its endpoints. phi = (beta - 1) G with G the
// Green's function of the flat torus with pole at vertex 0, so the metric has
// a cone of angle 2 pi beta there and is smooth elsewhere; beta = 1 is flat.
// Edges at vertex 0 get the exact cone length |z|^beta-scaled.
class TorusChart {
public:
  TorusChart(ConeSurface reference, const std::vector<Vec2>& xi, double beta = 1.0);
  // Chart for buildConeTorusGrid(alpha, n, aspect).
  static TorusChart forGrid(const ConeSurface& grid, double beta = 1.0);

  const ConeSurface& reference() const { return reference_; }
  std::vector<double> lengths(Complex tau) const;
  // d(l_e^2)/d(Re tau) and d(l_e^2)/d(Im tau).
  std::array<std::vector<double>, 2> squaredLengthJacobian(Complex tau) const;
  // Reference combinatorics with the chart lengths; vertex 0 carries alpha = beta.
  ConeSurface surface(Complex tau) const;

private:
  struct Factor {
    double phi = 0.0;
    Eigen::Vector2d dphi = Eigen::Vector2d::Zero(); // d/d(Re tau), d/d(Im tau)
  };
  Factor factor(int v, Complex tau) const;

  ConeSurface reference_;
  std::vector<Vec2> xi_;
  std::vector<Vec2> delta_; // lattice displacement along each edge, edge(e)[0] -> edge(e)[1]
  double beta_;
};

struct ConformalState {
  Complex tau{0.0, 1.0};
  nlohmann::json toJson(const std::string& referencePath) const;
};

struct DeformationDirection {
  FaceTensors tensor;                   // -2 Re(Phi_1 + Phi_2), the gradient
  std::vector<double> logScaleGradient; // dE/ds_e for per-edge log offsets s_e
  Eigen::Vector2d chartGradient;        // dE/d(Re tau), dE/d(Im tau)
  Eigen::Matrix2d chartMetric;          // WP pairing of the trace-free chart directions
  double wpNorm() const;                // of the chart gradient, dual to chartMetric
};

struct TotalEnergy {
  double E = 0.0, E1 = 0.0, E2 = 0.0;
  VertexMap u1, u2;
};

struct DescentOptions {
  double tolerance = 1e-8;         // on the WP norm of the chart gradient
  double relativeTolerance = 1e-6; // of the initial norm
  int maxIterations = 200;
  double armijo = 1e-4;
  double minStep = 1e-14;
};

struct DescentRow {
  int iter = 0;
  double E = 0.0, E1 = 0.0, E2 = 0.0;
  double wpGradNorm = 0.0;
  double step = 0.0;
  double hopfSumMax = 0.0;      // max over faces of |Phi_1 + Phi_2|
  double hopfSumResidual = 0.0; // holomorphicity residual of Phi_1 + Phi_2
  Complex tau;
};
using DescentTrace = std::vector<DescentRow>;
void writeDescentCsv(const DescentTrace& trace, const std::string& path);

class DescentError : public Error {
public:
  DescentError(const std::string& invariant, const std::string& message, DescentTrace trace)
      : Error("teich", "descend", invariant, message), trace_(std::move(trace)) {}
  const DescentTrace& trace() const { return trace_; }

private:
  DescentTrace trace_;
};

struct DescentResult {
  ConformalState state;
  TotalEnergy energy;
  DescentTrace trace;
};

struct AuditRow {
  double fd = 0.0;
  double predicted = 0.0;
  double relError = 0.0;
};

class TeichProblem {
public:
  TeichProblem(TorusChart chart, const ConeSurface& g1, const ConeSurface& g2, HarmonicOptions inner = {});

  const TorusChart& chart() const { return chart_; }
  const HarmonicProblem& problem1() const { return p1_; }
  const HarmonicProblem& problem2() const { return p2_; }

  // Sets the domain lengths and solves both maps, warm started from `warm`
  // when given (identity otherwise).
  TotalEnergy energyAt(const std::vector<double>& lengths, const TotalEnergy* warm = nullptr);
  TotalEnergy totalEnergy(const ConformalState& c, const TotalEnergy* warm = nullptr);
  // Gradient at the state last passed to totalEnergy, with t the maps there.
  DeformationDirection wpGradient(const ConformalState& c, const TotalEnergy& t) const;
  // Directional derivative of E for per-edge log-scale direction eta.
  double predictedDerivative(const DeformationDirection& grad, const std::vector<double>& eta) const;
  double maxHopfSum(const TotalEnergy& t) const;

  DescentResult descend(ConformalState c0, const DescentOptions& opts = {});
  // Central differences of E along per-edge log-scale directions at the
  // lengths of c, against the gradient.
  std::vector<AuditRow> gradientAudit(const ConformalState& c, const std::vector<std::vector<double>>& directions,
                                      double eps = 1e-5);

private:
  TorusChart chart_;
  HarmonicProblem p1_, p2_;
  HarmonicOptions inner_;
};

struct ProbeRow {
  double param = 0.0;
  double E = 0.0;
  bool valid = true;
};
// Energies along a path of structures; truncated at the first inner-solver
// failure, which is reported as an invalid row.
std::vector<ProbeRow> propernessProbe(TeichProblem& problem, const std::vector<std::pair<double, ConformalState>>& path);
// Last `tail` valid rows strictly increasing, ending above 10x the first row.
bool propernessVerdict(const std::vector<ProbeRow>& rows, int tail);

// Edge lengths scaled so that the total Euclidean area of the faces is one.
std::vector<double> gaugeNormalizedLengths(const std::vector<double>& lengths, const ConeSurface& combinatorics);

} // namespace conemin
