#pragma once

// Triangulated marked surfaces carrying a hyperbolic edge-length metric.

#include "conemin/hyperbolic.h"

#include <nlohmann/json.hpp>

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

namespace conemin {

struct VertexInfo {
  bool marked = false;
  double alpha = 1.0; // cone angle is 2*pi*alpha; 1 for regular vertices
  bool boundary = false;
};

class ConeSurface {
public:
  ConeSurface() = default;
  // Builds the edge/face incidence; every length starts at zero.
  ConeSurface(std::vector<VertexInfo> vertices, std::vector<std::array<int, 3>> faces);

  int numVertices() const { return static_cast<int>(vertices_.size()); }
  int numFaces() const { return static_cast<int>(faces_.size()); }
  int numEdges() const { return static_cast<int>(edges_.size()); }

  const VertexInfo& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& face(int f) const { return faces_[f]; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::array<int, 2>& edge(int e) const { return edges_[e]; }
  int edgeId(int a, int b) const; // -1 when a and b are not adjacent
  // Edge opposite local vertex k of face f.
  int faceEdge(int f, int k) const { return faceEdges_[f][k]; }
  // Faces on either side of e; the second entry is -1 on the boundary. The
  // first face contains e oriented from edge(e)[0] to edge(e)[1] when possible.
  const std::array<int, 2>& edgeFaces(int e) const { return edgeFaces_[e]; }
  bool isBoundaryEdge(int e) const { return edgeFaces_[e][1] < 0; }
  // Faces around v in counter-clockwise order; for boundary vertices the fan
  // starts at the face whose clockwise side is on the boundary.
  const std::vector<int>& vertexFaces(int v) const { return vertexFaces_[v]; }
  int localIndex(int f, int v) const;

  double length(int e) const { return lengths_[e]; }
  const std::vector<double>& lengths() const { return lengths_; }
  void setLength(int e, double l) { lengths_[e] = l; }
  void setLengths(std::vector<double> l);
  void setLength(int a, int b, double l);
  double faceLength(int f, int k) const { return lengths_[faceEdges_[f][k]]; }
  HTriangle faceTriangle(int f) const;

  std::vector<int> markedVertices() const;
  bool hasBoundary() const;
  int eulerCharacteristic() const { return numVertices() - numEdges() + numFaces(); }
  // chi + sum(alpha_i - 1); must be negative for a hyperbolic cone metric.
  double gaussBonnetCharacteristic() const;
  double angleSum(int v) const;
  double area() const; // sum of hyperbolic triangle areas
  double maxEdgeLength() const;
  // Whether the pairwise cone separation bound applies: it needs a closed
  // geodesic around each pair, which fails on spheres with at most three cones.
  bool separationApplies() const;

  // Shares faces with another surface (required for maps between surfaces).
  bool sameCombinatorics(const ConeSurface& other) const { return faces_ == other.faces_; }

private:
  std::vector<VertexInfo> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<double> lengths_;
  std::vector<std::array<int, 3>> faceEdges_;
  std::vector<std::array<int, 2>> edgeFaces_;
  std::vector<std::vector<int>> vertexFaces_;
  std::unordered_map<long long, int> edgeIndex_;
};

struct InvariantCheck {
  std::string name;
  bool passed = true;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct InvariantReport {
  std::vector<InvariantCheck> checks;
  bool ok() const;
  nlohmann::json toJson() const;
};

struct InvariantTolerances {
  double angle = 1e-6;
  double gaussBonnet = 1e-4;
  double separationSlack = 0.2; // usually 2h
};

InvariantReport checkInvariants(const ConeSurface& s, const InvariantTolerances& tol = {});

// 1-to-4 subdivision through geodesic midpoints of the realized triangles.
ConeSurface refine(const ConeSurface& s);

// Shortest path length through the triangulation, with triangle unfolding
// updates so that geodesics crossing faces are not restricted to edges.
double geodesicDistance(const ConeSurface& s, int a, int b);
std::vector<double> geodesicDistances(const ConeSurface& s, int source);

nlohmann::json surfaceToJson(const ConeSurface& s);
ConeSurface surfaceFromJson(const nlohmann::json& j);
void writeSurface(const ConeSurface& s, const std::string& path);
ConeSurface readSurface(const std::string& path);

} // namespace conemin
