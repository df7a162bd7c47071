#pragma once

// Generators for the test surfaces: cone tori, the cone-model annulus and
// spheres with three cone points.

#include "conemin/surface.h"

namespace conemin {

// Genus-1 surface with one cone point (vertex 0) of angle 2*pi*alpha, glued
// from a centrally symmetric hyperbolic quadrilateral whose half-diagonals are
// perpendicular with ratio `aspect` (1 gives the square torus). The
// quadrilateral is cut into n x n cells, each split into four triangles
// around a center vertex, so every vertex has valence 8.
ConeSurface buildConeTorusGrid(double alpha, int n, double aspect = 1.0);
// Lattice coordinates in [0,1)^2 of the vertices of buildConeTorusGrid(., n, .):
// grid vertex (i, j) at (i/n, j/n), cell centers at ((i+1/2)/n, (j+1/2)/n).
std::vector<Vec2> torusGridCoordinates(int n);
// Picks n so that grid edges are at most h.
ConeSurface buildConeTorus(double alpha, double h, double aspect = 1.0);
// Cells needed for grid spacing h on the quadrilateral for (alpha, aspect).
int torusCellsForResolution(double alpha, double h, double aspect = 1.0);
double torusSideLength(double alpha, double aspect = 1.0);

// Genus-1 surface with two cone points of equal angle 2*pi*alpha (vertices 0
// and 1), glued from a regular hyperbolic hexagon.
ConeSurface buildTwoConeTorus(double alpha, double h);

// Sphere with cone points 0, 1, 2 obtained by doubling the hyperbolic triangle
// with angles pi*alpha_i.
ConeSurface buildThreeConeSphere(double alpha0, double alpha1, double alpha2, double h);

// Polar grid on the cone model of angle 2*pi*alpha truncated at rhoMax: the
// cone point is vertex 0, ring k (1..rings) sits at rho = k*rhoMax/rings and
// holds `sectors` vertices at theta = 2*pi*alpha*j/sectors.
struct AnnulusGrid {
  double alpha = 0.3;
  double rhoMax = 1.0;
  int rings = 8;
  int sectors = 16;

  int vertex(int ring, int sector) const { return ring == 0 ? 0 : 1 + (ring - 1) * sectors + sector % sectors; }
  double rho(int ring) const { return rhoMax * ring / rings; }
  double theta(int sector) const;
  int ringOf(int v) const { return v == 0 ? 0 : 1 + (v - 1) / sectors; }
  int sectorOf(int v) const { return v == 0 ? 0 : (v - 1) % sectors; }
};
ConeSurface buildConeAnnulus(const AnnulusGrid& grid);
// Grid with rings = ceil(rhoMax / h) and sectors chosen so that ring arcs stay near h (at least 8).
AnnulusGrid annulusGridForResolution(double alpha, double rhoMax, double h);
ConeSurface buildConeAnnulus(double alpha, double rhoMax, double h);

} // namespace conemin
