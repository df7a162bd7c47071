#pragma once

// Local developments of a target cone surface into the hyperboloid.
//
// Every face has a frame in which it is realized with local vertex 0 at the
// origin and local vertex 1 on the positive x axis. Every vertex v has a chart
// in which v sits at the origin; the chart agrees with the developments of all
// faces around v (for a cone vertex the fan leaves a wedge uncovered). All maps
// between frames are Lorentz isometries stored as 3x3 matrices.

#include "conemin/surface.h"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace conemin {

using Isometry = Eigen::Matrix3d;

inline HPoint apply(const Isometry& m, const HPoint& p) { return HPoint::fromAmbient(m * p.ambient()); }

// Orientation-preserving isometry taking `from` to `to` and the direction of
// `fromToward` (seen from `from`) to the direction of `toToward`.
Isometry isometryMatching(const HPoint& from, const HPoint& fromToward, const HPoint& to, const HPoint& toToward);

struct SurfacePoint {
  int face = -1;
  std::array<double, 3> bary{1.0, 0.0, 0.0};
};

class Atlas {
public:
  explicit Atlas(const ConeSurface& surface);

  const ConeSurface& surface() const { return surface_; }
  const std::array<HPoint, 3>& faceVertices(int f) const { return faceVertices_[f]; }
  // Chart of vertex face(f)[k] to the frame of f.
  const Isometry& chartToFace(int f, int k) const { return chartToFace_[f][k]; }
  const Isometry& faceToChart(int f, int k) const { return faceToChart_[f][k]; }
  // Frame of f to the frame of an adjacent face g.
  Isometry faceToFace(int f, int g) const;

  // Locates a chart point of vertex v on the surface by walking across faces.
  SurfacePoint locate(int v, const HPoint& chartPoint) const;
  HPoint facePoint(const SurfacePoint& p) const; // position in the frame of p.face
  // Coordinates of a surface point in the chart of vertex v, developed along
  // the shortest face path from p.face into the star of v.
  HPoint toChart(int v, const SurfacePoint& p) const;

private:
  ConeSurface surface_;
  std::vector<std::array<HPoint, 3>> faceVertices_;
  std::vector<std::array<Isometry, 3>> chartToFace_;
  std::vector<std::array<Isometry, 3>> faceToChart_;
};

} // namespace conemin
