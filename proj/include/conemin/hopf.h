#pragma once

// Field diagnostics of a discrete harmonic map: Hopf differential, energy
// density, Jacobian, the norms of du split into (1,0) and (0,1) parts, and
// w = ln(|du^(1,0)| / |du^(0,1)|).
//
// Per-face complex quantities are expressed in the Euclidean realization frame
// of the domain face: origin at local vertex 0, positive x axis toward local
// vertex 1. Between adjacent faces the frames differ by the rotation taking the
// shared edge direction of one to the other.

#include "conemin/harmonic.h"

#include <string>
#include <vector>

namespace conemin {

struct QuadDiffField {
  std::vector<Complex> phi;  // coefficient in the face frame
  std::vector<double> rho2;  // domain conformal factor of that frame
  double norm(int f) const { return std::abs(phi[f]) / rho2[f]; }
};

enum class FieldRole { EnergyDensity, Jacobian, NormD, NormDbar, W };

struct ScalarField {
  FieldRole role;
  std::vector<double> values; // NaN where undefined (w at zeros of the (0,1) part)
};

std::vector<FaceDifferential> faceDifferentials(const HarmonicProblem& problem, const VertexMap& u);
QuadDiffField hopfField(const HarmonicProblem& problem, const VertexMap& u);
QuadDiffField hopfField(const std::vector<FaceDifferential>& d);
ScalarField scalarField(const std::vector<FaceDifferential>& d, FieldRole role);
QuadDiffField sum(const QuadDiffField& a, const QuadDiffField& b);

// Rotation psi with z_g = exp(i psi) z_f for frames of faces f, g sharing edge e.
double frameRotation(const HarmonicProblem& problem, int f, int g, int e);

// Area-weighted edge mismatch of adjacent coefficients after the weight-2
// frame change, normalized by sum(area * |phi|). Zero for the zero field.
double holomorphicityResidual(const HarmonicProblem& problem, const QuadDiffField& q);

struct BochnerResidual {
  // Per vertex; NaN at boundary, marked and excluded vertices.
  std::vector<double> plus;  // Lap ln|du'| - (|du'|^2 - |du''|^2 - 1)
  std::vector<double> minus; // Lap ln|du''| - (|du''|^2 - |du'|^2 - 1)
  std::vector<double> w;     // Lap w - 4 |Phi| sinh w
  std::vector<int> excludedFaces; // |du''| below the threshold
};
// Vertex values are area-weighted averages of the face values; the Laplacian
// is the weighted graph Laplacian of the problem weights over barycentric areas.
BochnerResidual bochnerResidual(const HarmonicProblem& problem, const VertexMap& u, double threshold = 1e-12);

// Faces of combinatorial rings 1..count around vertex p (ring 1 is the star).
std::vector<std::vector<int>> faceRings(const ConeSurface& s, int p, int count);

struct PoleFit {
  double slope = 0.0;    // of ln|psi| against ln|z| in the cone chart
  double residual = 0.0; // rms of the fit
  bool zeroField = false;
  int rings = 0;
};
// Fits the cone-chart coefficient psi = phi * sigma^2(z) over combinatorial
// face rings 1..rings around marked vertex p. Throws when fewer than
// minRings rings are available.
PoleFit poleOrderEstimate(const HarmonicProblem& problem, const QuadDiffField& q, int p, int rings = 4,
                          int minRings = 3);

// sum(area * |Phi|^2) over faces whose vertices all lie within `radius` of p.
double hopfL2Near(const HarmonicProblem& problem, const QuadDiffField& q, int p, double radius);

// CSV (face_id, re_phi, im_phi, e, J, norm_d, norm_dbar, w) and a JSON sidecar
// describing the face frames.
void writeFieldDump(const HarmonicProblem& problem, const VertexMap& u, const std::string& csvPath,
                    const std::string& framesPath);

} // namespace conemin
