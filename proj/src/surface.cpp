#include "conemin/surface.h"

#include "conemin/errors.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

namespace conemin {

namespace {

long long edgeKey(int a, int b, int n) {
  if (a > b) std::swap(a, b);
  return static_cast<long long>(a) * n + b;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

ConeSurface::ConeSurface(std::vector<VertexInfo> vertices, std::vector<std::array<int, 3>> faces)
    : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int nv = numVertices();
  faceEdges_.resize(faces_.size());
  std::unordered_map<long long, int> halfedges; // directed a->b keyed by a*nv+b
  for (int f = 0; f < numFaces(); ++f) {
    const auto& t = faces_[f];
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= nv) throw Error("surface", "ConeSurface", "valid vertex ids", "face references a missing vertex");
      if (t[k] == t[(k + 1) % 3]) throw Error("surface", "ConeSurface", "non-degenerate faces", "face repeats a vertex");
    }
    for (int k = 0; k < 3; ++k) {
      const int a = t[(k + 1) % 3], b = t[(k + 2) % 3];
      const long long directed = static_cast<long long>(a) * nv + b;
      if (!halfedges.emplace(directed, f).second)
        throw Error("surface", "ConeSurface", "consistent orientation",
                    "edge " + std::to_string(a) + "-" + std::to_string(b) + " used twice in the same direction");
      const long long key = edgeKey(a, b, nv);
      auto it = edgeIndex_.find(key);
      int e;
      if (it == edgeIndex_.end()) {
        e = numEdges();
        edgeIndex_.emplace(key, e);
        edges_.push_back({std::min(a, b), std::max(a, b)});
        edgeFaces_.push_back({-1, -1});
      } else {
        e = it->second;
      }
      faceEdges_[f][k] = e;
    }
  }
  for (int e = 0; e < numEdges(); ++e) {
    const auto [a, b] = edges_[e];
    auto fwd = halfedges.find(static_cast<long long>(a) * nv + b);
    auto bwd = halfedges.find(static_cast<long long>(b) * nv + a);
    if (fwd != halfedges.end()) {
      edgeFaces_[e] = {fwd->second, bwd != halfedges.end() ? bwd->second : -1};
    } else {
      edgeFaces_[e] = {bwd->second, -1};
    }
  }
  lengths_.assign(edges_.size(), 0.0);

  // counter-clockwise fans: face (v, a, b) is followed by the face across (v, b)
  std::vector<std::vector<int>> incident(nv);
  for (int f = 0; f < numFaces(); ++f)
    for (int v : faces_[f]) incident[v].push_back(f);
  vertexFaces_.resize(nv);
  for (int v = 0; v < nv; ++v) {
    if (incident[v].empty()) throw Error("surface", "ConeSurface", "no isolated vertices", "vertex without faces");
    int guardCount = 0;
    auto across = [&](int f, int w) -> int { // the other face on edge (v, w)
      const auto& ef = edgeFaces_[edgeId(v, w)];
      return ef[0] == f ? ef[1] : ef[0];
    };
    int start = incident[v].front();
    for (int cur = start;;) {
      const int prev = across(cur, faces_[cur][(localIndex(cur, v) + 1) % 3]);
      if (prev < 0) {
        start = cur;
        break;
      }
      if (prev == incident[v].front()) break;
      cur = prev;
      if (++guardCount > static_cast<int>(incident[v].size()))
        throw Error("surface", "ConeSurface", "manifold vertex", "fan does not close");
    }
    std::vector<int> fan{start};
    int cur = start;
    while (true) {
      const int k = localIndex(cur, v);
      const int next = across(cur, faces_[cur][(k + 2) % 3]);
      if (next < 0 || next == start) break;
      if (fan.size() > incident[v].size()) throw Error("surface", "ConeSurface", "manifold vertex", "fan does not close");
      fan.push_back(next);
      cur = next;
    }
    if (fan.size() != incident[v].size())
      throw Error("surface", "ConeSurface", "manifold vertex", "vertex " + std::to_string(v) + " has a non-manifold fan");
    vertexFaces_[v] = std::move(fan);
  }
}

int ConeSurface::edgeId(int a, int b) const {
  auto it = edgeIndex_.find(edgeKey(a, b, numVertices()));
  return it == edgeIndex_.end() ? -1 : it->second;
}

int ConeSurface::localIndex(int f, int v) const {
  const auto& t = faces_[f];
  for (int k = 0; k < 3; ++k)
    if (t[k] == v) return k;
  return -1;
}

void ConeSurface::setLengths(std::vector<double> l) {
  if (l.size() != edges_.size()) throw Error("surface", "setLengths", "one length per edge", "length count mismatch");
  lengths_ = std::move(l);
}

void ConeSurface::setLength(int a, int b, double l) {
  const int e = edgeId(a, b);
  if (e < 0) throw Error("surface", "setLength", "existing edge", "vertices are not adjacent");
  lengths_[e] = l;
}

HTriangle ConeSurface::faceTriangle(int f) const {
  return solveTriangle(faceLength(f, 0), faceLength(f, 1), faceLength(f, 2));
}

std::vector<int> ConeSurface::markedVertices() const {
  std::vector<int> out;
  for (int v = 0; v < numVertices(); ++v)
    if (vertices_[v].marked) out.push_back(v);
  return out;
}

bool ConeSurface::hasBoundary() const {
  return std::any_of(edgeFaces_.begin(), edgeFaces_.end(), [](const auto& ef) { return ef[1] < 0; });
}

double ConeSurface::gaussBonnetCharacteristic() const {
  double c = eulerCharacteristic();
  for (const auto& v : vertices_)
    if (v.marked) c += v.alpha - 1.0;
  return c;
}

double ConeSurface::angleSum(int v) const {
  double s = 0.0;
  for (int f : vertexFaces_[v]) s += faceTriangle(f).angles[localIndex(f, v)];
  return s;
}

double ConeSurface::area() const {
  double a = 0.0;
  for (int f = 0; f < numFaces(); ++f) a += faceTriangle(f).area();
  return a;
}

double ConeSurface::maxEdgeLength() const { return *std::max_element(lengths_.begin(), lengths_.end()); }

bool ConeSurface::separationApplies() const {
  if (hasBoundary()) return false;
  const int genus = (2 - eulerCharacteristic()) / 2;
  return genus >= 1 || markedVertices().size() >= 4;
}

bool InvariantReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

nlohmann::json InvariantReport::toJson() const {
  nlohmann::json j;
  j["ok"] = ok();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"tolerance", c.tolerance},
                           {"detail", c.detail}});
  return j;
}

InvariantReport checkInvariants(const ConeSurface& s, const InvariantTolerances& tol) {
  using std::numbers::pi;
  InvariantReport rep;

  {
    InvariantCheck c{"faces.triangle_inequality", true, 0.0, 0.0, ""};
    int bad = 0;
    for (int f = 0; f < s.numFaces(); ++f) {
      const double a = s.faceLength(f, 0), b = s.faceLength(f, 1), d = s.faceLength(f, 2);
      if (!(a > 0 && b > 0 && d > 0 && a < b + d && b < a + d && d < a + b)) {
        if (bad == 0) c.detail = "first violation at face " + std::to_string(f);
        ++bad;
      }
    }
    c.value = bad;
    c.passed = bad == 0;
    rep.checks.push_back(c);
    if (bad) return rep;
  }

  {
    InvariantCheck reg{"vertices.regular_angle_sum", true, 0.0, tol.angle, ""};
    InvariantCheck cone{"vertices.cone_angle_sum", true, 0.0, tol.angle, ""};
    InvariantCheck range{"vertices.alpha_range", true, 0.0, 0.0, ""};
    for (int v = 0; v < s.numVertices(); ++v) {
      const auto& info = s.vertex(v);
      if (info.marked && !(info.alpha > 0.0 && info.alpha < 0.5)) {
        range.passed = false;
        range.detail = "vertex " + std::to_string(v) + " has alpha outside (0, 1/2)";
      }
      if (info.boundary) continue;
      const double target = 2.0 * pi * (info.marked ? info.alpha : 1.0);
      const double err = std::abs(s.angleSum(v) - target);
      InvariantCheck& c = info.marked ? cone : reg;
      if (err > c.value) {
        c.value = err;
        c.detail = "worst at vertex " + std::to_string(v);
      }
    }
    reg.passed = reg.value <= tol.angle;
    cone.passed = cone.value <= tol.angle;
    rep.checks.push_back(reg);
    rep.checks.push_back(cone);
    rep.checks.push_back(range);
  }

  if (!s.hasBoundary()) {
    const double chi = s.gaussBonnetCharacteristic();
    rep.checks.push_back({"gauss_bonnet.negative_characteristic", chi < 0.0, chi, 0.0, "chi + sum(alpha - 1)"});
    const double expected = -2.0 * pi * chi;
    const double err = std::abs(s.area() - expected);
    rep.checks.push_back({"gauss_bonnet.area", err <= tol.gaussBonnet, err, tol.gaussBonnet,
                          "expected area " + std::to_string(expected)});
  }

  if (s.separationApplies()) {
    const auto marked = s.markedVertices();
    InvariantCheck c{"marked.separation", true, kInf, tol.separationSlack, ""};
    for (std::size_t i = 0; i < marked.size(); ++i) {
      const auto d = geodesicDistances(s, marked[i]);
      for (std::size_t j = i + 1; j < marked.size(); ++j) {
        const double margin =
            d[marked[j]] - coneSeparationBound(s.vertex(marked[i]).alpha, s.vertex(marked[j]).alpha);
        if (margin < c.value) {
          c.value = margin;
          c.detail = "distance minus bound, worst pair " + std::to_string(marked[i]) + "," + std::to_string(marked[j]);
        }
      }
    }
    if (marked.size() >= 2) {
      c.passed = c.value >= -tol.separationSlack;
      rep.checks.push_back(c);
    }
  }
  return rep;
}

ConeSurface refine(const ConeSurface& s) {
  const int nv = s.numVertices();
  std::vector<VertexInfo> verts;
  verts.reserve(nv + s.numEdges());
  for (int v = 0; v < nv; ++v) verts.push_back(s.vertex(v));
  for (int e = 0; e < s.numEdges(); ++e) verts.push_back({false, 1.0, s.isBoundaryEdge(e)});

  std::vector<std::array<int, 3>> faces;
  faces.reserve(4 * s.numFaces());
  for (int f = 0; f < s.numFaces(); ++f) {
    const auto& t = s.face(f);
    // m[k] is the midpoint of the edge opposite local vertex k
    const int m0 = nv + s.faceEdge(f, 0), m1 = nv + s.faceEdge(f, 1), m2 = nv + s.faceEdge(f, 2);
    faces.push_back({t[0], m2, m1});
    faces.push_back({m2, t[1], m0});
    faces.push_back({m1, m0, t[2]});
    faces.push_back({m2, m0, m1});
  }
  ConeSurface out(std::move(verts), std::move(faces));
  for (int e = 0; e < s.numEdges(); ++e) {
    const auto [a, b] = s.edge(e);
    out.setLength(a, nv + e, 0.5 * s.length(e));
    out.setLength(b, nv + e, 0.5 * s.length(e));
  }
  for (int f = 0; f < s.numFaces(); ++f) {
    const auto v = s.faceTriangle(f).realize();
    std::array<HPoint, 3> mid;
    for (int k = 0; k < 3; ++k) mid[k] = geodesicPoint(v[(k + 1) % 3], v[(k + 2) % 3], 0.5);
    for (int k = 0; k < 3; ++k) {
      const int a = nv + s.faceEdge(f, (k + 1) % 3), b = nv + s.faceEdge(f, (k + 2) % 3);
      out.setLength(a, b, dist(mid[(k + 1) % 3], mid[(k + 2) % 3]));
    }
  }
  for (int f = 0; f < out.numFaces(); ++f) {
    const double a = out.faceLength(f, 0), b = out.faceLength(f, 1), c = out.faceLength(f, 2);
    if (!(a < b + c && b < a + c && c < a + b))
      throw Error("surface", "refine", "triangle inequality", "subdivided face " + std::to_string(f) + " is degenerate");
  }
  return out;
}

std::vector<double> geodesicDistances(const ConeSurface& s, int source) {
  const int nv = s.numVertices();
  std::vector<double> d(nv, kInf);
  std::vector<char> done(nv, 0);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  d[source] = 0.0;
  pq.push({0.0, source});

  // distance to c through the face (a, b, c) from a virtual source seen by a and b
  auto unfold = [&](int a, int b, int c) -> double {
    const double lab = s.length(s.edgeId(a, b));
    const double lac = s.length(s.edgeId(a, c));
    const double lbc = s.length(s.edgeId(b, c));
    const double da = d[a], db = d[b];
    if (!(std::abs(da - db) < lab && lab < da + db)) return kInf;
    const HPoint pa, pb = HPoint::fromPolar(lab, 0.0);
    const HPoint pc = placeThird(pa, pb, lac, lbc);
    const HPoint src = placeThird(pb, pa, db, da);
    if (orientation(src, pc, pa) * orientation(src, pc, pb) > 0.0) return kInf;
    return dist(src, pc);
  };

  while (!pq.empty()) {
    const auto [dv, v] = pq.top();
    pq.pop();
    if (done[v] || dv > d[v]) continue;
    done[v] = 1;
    for (int f : s.vertexFaces(v)) {
      const auto& t = s.face(f);
      const int k = s.localIndex(f, v);
      for (int step = 1; step <= 2; ++step) {
        const int c = t[(k + step) % 3];
        const int b = t[(k + 3 - step) % 3];
        if (done[c]) continue;
        double cand = d[v] + s.length(s.edgeId(v, c));
        if (done[b]) cand = std::min(cand, unfold(v, b, c));
        if (cand < d[c]) {
          d[c] = cand;
          pq.push({cand, c});
        }
      }
    }
  }
  for (double x : d)
    if (!std::isfinite(x)) throw Error("surface", "geodesic_distance", "connected mesh", "mesh is disconnected");
  return d;
}

double geodesicDistance(const ConeSurface& s, int a, int b) {
  if (a == b) return 0.0;
  const auto d = geodesicDistances(s, a);
  return std::min(d[b], geodesicDistances(s, b)[a]);
}

nlohmann::json surfaceToJson(const ConeSurface& s) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < s.numVertices(); ++v) {
    nlohmann::json jv{{"id", v}, {"marked", s.vertex(v).marked}};
    if (s.vertex(v).marked) jv["alpha"] = s.vertex(v).alpha;
    if (s.vertex(v).boundary) jv["boundary"] = true;
    j["vertices"].push_back(jv);
  }
  j["faces"] = s.faces();
  j["edge_lengths"] = nlohmann::json::array();
  for (int e = 0; e < s.numEdges(); ++e)
    j["edge_lengths"].push_back({{"i", s.edge(e)[0]}, {"j", s.edge(e)[1]}, {"l", s.length(e)}});
  return j;
}

ConeSurface surfaceFromJson(const nlohmann::json& j) {
  try {
    const auto& jv = j.at("vertices");
    std::vector<VertexInfo> verts(jv.size());
    for (const auto& v : jv) {
      const int id = v.at("id").get<int>();
      if (id < 0 || id >= static_cast<int>(verts.size()))
        throw Error("surface", "read", "dense vertex ids", "vertex id out of range");
      verts[id].marked = v.at("marked").get<bool>();
      verts[id].alpha = v.value("alpha", 1.0);
      verts[id].boundary = v.value("boundary", false);
    }
    ConeSurface s(std::move(verts), j.at("faces").get<std::vector<std::array<int, 3>>>());
    std::vector<char> seen(s.numEdges(), 0);
    for (const auto& el : j.at("edge_lengths")) {
      const int e = s.edgeId(el.at("i").get<int>(), el.at("j").get<int>());
      if (e < 0) throw Error("surface", "read", "lengths on existing edges", "edge length for a non-edge");
      s.setLength(e, el.at("l").get<double>());
      seen[e] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
      throw Error("surface", "read", "every edge has a length", "missing edge length");
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw Error("surface", "read", "surface file schema", ex.what());
  }
}

void writeSurface(const ConeSurface& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("surface", "write", "writable path", "cannot open " + path);
  out << surfaceToJson(s).dump(1) << '\n';
}

ConeSurface readSurface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("surface", "read", "readable path", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw Error("surface", "read", "valid JSON", ex.what());
  }
  return surfaceFromJson(j);
}

} // namespace conemin
