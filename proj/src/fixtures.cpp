#include "conemin/fixtures.h"

#include "conemin/errors.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

namespace conemin {

using std::numbers::pi;

namespace {

double cornerAngle(const HPoint& at, const HPoint& a, const HPoint& b) {
  const Vec3 u = logMap(at, a), v = logMap(at, b);
  const double c = minkowski(u, v) / (tangentNorm(u) * tangentNorm(v));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

// Largest s in (lo, hi) with f(s) = target for decreasing f.
double bisectDecreasing(const std::function<double(double)>& f, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Extended precision hyperboloid points for the torus grid: its corner cells
// are thin, and glued copies of an edge must agree closely for the vertex
// angle sums to close.
struct LPoint {
  long double x = 0, y = 0, t = 1;
};

LPoint lpolar(long double r, long double theta) {
  return {std::sinh(r) * std::cos(theta), std::sinh(r) * std::sin(theta), std::cosh(r)};
}

long double ldist(const LPoint& a, const LPoint& b) {
  const long double dx = a.x - b.x, dy = a.y - b.y, dt = a.t - b.t;
  const long double chord2 = std::max(0.0L, dx * dx + dy * dy - dt * dt);
  return 2.0L * std::asinh(0.5L * std::sqrt(chord2));
}

LPoint lgeodesic(const LPoint& a, const LPoint& b, long double s) {
  const long double d = ldist(a, b);
  if (d == 0.0L) return a;
  const long double wa = std::sinh((1.0L - s) * d) / std::sinh(d), wb = std::sinh(s * d) / std::sinh(d);
  return {wa * a.x + wb * b.x, wa * a.y + wb * b.y, wa * a.t + wb * b.t};
}

HPoint toHPoint(const LPoint& p) {
  return HPoint::fromAmbient(Vec3(static_cast<double>(p.x), static_cast<double>(p.y), static_cast<double>(p.t)));
}

// Angle at a of the triangle (a, b, c), by the law of cosines.
long double lcorner(const LPoint& a, const LPoint& b, const LPoint& c) {
  const long double x = ldist(a, b), y = ldist(a, c), z = ldist(b, c);
  const long double cs = (std::cosh(x) * std::cosh(y) - std::cosh(z)) / (std::sinh(x) * std::sinh(y));
  return std::acos(std::clamp(cs, -1.0L, 1.0L));
}

std::array<LPoint, 4> torusQuad(double alpha, double aspect) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error("surface", "build_cone_torus", "0 < alpha < 1/2", "infeasible alpha");
  if (!(aspect > 0.0)) throw Error("surface", "build_cone_torus", "positive aspect", "invalid aspect");
  constexpr long double lpi = std::numbers::pi_v<long double>;
  auto quad = [aspect](long double r) {
    return std::array<LPoint, 4>{lpolar(r, 0.0L), lpolar(aspect * r, 0.5L * lpi), lpolar(r, lpi),
                                 lpolar(aspect * r, 1.5L * lpi)};
  };
  auto angleSum = [&](long double r) {
    const auto q = quad(r);
    long double sum = 0.0L;
    for (int k = 0; k < 4; ++k) sum += lcorner(q[k], q[(k + 3) % 4], q[(k + 1) % 4]);
    return sum;
  };
  long double lo = 1e-6L, hi = 30.0L / std::max(1.0, aspect);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    (angleSum(mid) > 2.0L * lpi * alpha ? lo : hi) = mid;
  }
  return quad(0.5L * (lo + hi));
}

// Sets every edge length from realized positions, checking glued copies agree.
class LengthAssigner {
public:
  explicit LengthAssigner(ConeSurface& s) : s_(s), set_(s.numEdges(), 0) {}
  void add(int a, int b, double l, const char* op) {
    const int e = s_.edgeId(a, b);
    if (set_[e] && std::abs(s_.length(e) - l) > 1e-9 * (1.0 + l))
      throw Error("surface", op, "glued edges have equal length", "inconsistent lengths on a glued edge");
    s_.setLength(e, l);
    set_[e] = 1;
  }

private:
  ConeSurface& s_;
  std::vector<char> set_;
};

} // namespace

double torusSideLength(double alpha, double aspect) {
  const auto q = torusQuad(alpha, aspect);
  return static_cast<double>(std::max(ldist(q[0], q[1]), ldist(q[1], q[2])));
}

int torusCellsForResolution(double alpha, double h, double aspect) {
  if (!(h > 0.0)) throw Error("surface", "build_cone_torus", "h > 0", "resolution must be positive");
  return std::max(3, static_cast<int>(std::ceil(torusSideLength(alpha, aspect) / h)));
}

ConeSurface buildConeTorusGrid(double alpha, int n, double aspect) {
  if (n < 3) throw Error("surface", "build_cone_torus", "n >= 3", "grid too coarse for a simplicial torus");
  const auto P = torusQuad(alpha, aspect);
  auto grid = [n](int i, int j) { return (i % n) + n * (j % n); };
  auto center = [n](int i, int j) { return n * n + i + n * j; };

  std::vector<LPoint> A(n + 1), B(n + 1);
  for (int i = 0; i <= n; ++i) {
    A[i] = lgeodesic(P[0], P[1], static_cast<long double>(i) / n);
    B[i] = lgeodesic(P[3], P[2], static_cast<long double>(i) / n);
  }
  auto position = [&](long double u, long double v) {
    return lgeodesic(lgeodesic(P[0], P[1], u), lgeodesic(P[3], P[2], u), v);
  };
  std::vector<std::vector<LPoint>> X(n + 1, std::vector<LPoint>(n + 1));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) X[i][j] = lgeodesic(A[i], B[i], static_cast<long double>(j) / n);

  std::vector<VertexInfo> verts(2 * n * n);
  verts[0] = {true, alpha, false};
  std::vector<std::array<int, 3>> faces;
  struct Placed {
    int id;
    LPoint p;
  };
  std::vector<std::array<Placed, 3>> placed;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Placed c00{grid(i, j), X[i][j]}, c10{grid(i + 1, j), X[i + 1][j]};
      const Placed c11{grid(i + 1, j + 1), X[i + 1][j + 1]}, c01{grid(i, j + 1), X[i][j + 1]};
      const Placed m{center(i, j), position((i + 0.5L) / n, (j + 0.5L) / n)};
      for (const auto& tri : {std::array<Placed, 3>{c00, c10, m}, std::array<Placed, 3>{c10, c11, m},
                              std::array<Placed, 3>{c11, c01, m}, std::array<Placed, 3>{c01, c00, m}}) {
        if (!(orientation(toHPoint(tri[0].p), toHPoint(tri[1].p), toHPoint(tri[2].p)) > 0.0))
          throw Error("surface", "build_cone_torus", "positive orientation", "grid produced an inverted triangle");
        faces.push_back({tri[0].id, tri[1].id, tri[2].id});
        placed.push_back(tri);
      }
    }
  }
  ConeSurface s(std::move(verts), std::move(faces));
  LengthAssigner assign(s);
  for (const auto& tri : placed)
    for (int k = 0; k < 3; ++k)
      assign.add(tri[k].id, tri[(k + 1) % 3].id, static_cast<double>(ldist(tri[k].p, tri[(k + 1) % 3].p)),
                 "build_cone_torus");
  return s;
}

std::vector<Vec2> torusGridCoordinates(int n) {
  std::vector<Vec2> xi(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      xi[i + n * j] = Vec2(i, j) / n;
      xi[n * n + i + n * j] = Vec2(i + 0.5, j + 0.5) / n;
    }
  return xi;
}

ConeSurface buildConeTorus(double alpha, double h, double aspect) {
  return buildConeTorusGrid(alpha, torusCellsForResolution(alpha, h, aspect), aspect);
}

ConeSurface buildTwoConeTorus(double alpha, double h) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw Error("surface", "build_two_cone_torus", "0 < alpha < 1/2", "infeasible alpha");
  if (!(h > 0.0)) throw Error("surface", "build_two_cone_torus", "h > 0", "resolution must be positive");
  auto hexagon = [](double r) {
    std::array<HPoint, 6> v;
    for (int k = 0; k < 6; ++k) v[k] = HPoint::fromPolar(r, k * pi / 3.0);
    return v;
  };
  const double corner = 2.0 * pi * alpha / 3.0;
  const double r = bisectDecreasing(
      [&](double x) {
        const auto v = hexagon(x);
        return cornerAngle(v[0], v[5], v[1]);
      },
      corner, 1e-6, 30.0);
  const auto V = hexagon(r);
  const HPoint O;
  const int m = std::max(2, static_cast<int>(std::ceil(dist(V[0], V[1]) / h)));

  // canonical ids for sector points (k, a, b): weights a/m on V_k, b/m on V_{k+1}
  std::map<std::tuple<int, int, int>, int> ids;
  int next = 2; // 0 and 1 are the cone points
  auto idOf = [&](int k, int a, int b) -> int {
    if (a == m) return k % 2;             // corner V_k
    if (b == m) return (k + 1) % 2;       // corner V_{k+1}
    std::tuple<int, int, int> key;
    if (a == 0 && b == 0) key = {-1, 0, 0};                    // hexagon center
    else if (b == 0) key = {-2, k, a};                              // ray towards V_k
    else if (a == 0) key = {-2, (k + 1) % 6, b};               // ray towards V_{k+1}
    else if (a + b == m) key = k < 3 ? std::tuple{-3, k, b} : std::tuple{-3, k - 3, m - b}; // glued sides
    else key = {k, a, b};
    auto [it, inserted] = ids.emplace(key, next);
    if (inserted) ++next;
    return it->second;
  };
  auto position = [&](int k, int a, int b) {
    const double w0 = static_cast<double>(m - a - b) / m;
    return HPoint::fromAmbient(w0 * O.ambient() + (static_cast<double>(a) / m) * V[k].ambient() +
                               (static_cast<double>(b) / m) * V[(k + 1) % 6].ambient());
  };

  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<std::pair<int, HPoint>, 3>> placed;
  for (int k = 0; k < 6; ++k) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; a + b < m; ++b) {
        std::vector<std::array<std::pair<int, int>, 3>> tris{{{{a, b}, {a + 1, b}, {a, b + 1}}}};
        if (a + b < m - 1) tris.push_back({{{a + 1, b}, {a + 1, b + 1}, {a, b + 1}}});
        for (const auto& t : tris) {
          std::array<std::pair<int, HPoint>, 3> tri;
          for (int q = 0; q < 3; ++q)
            tri[q] = {idOf(k, t[q].first, t[q].second), position(k, t[q].first, t[q].second)};
          faces.push_back({tri[0].first, tri[1].first, tri[2].first});
          placed.push_back(tri);
        }
      }
    }
  }
  std::vector<VertexInfo> verts(next);
  verts[0] = {true, alpha, false};
  verts[1] = {true, alpha, false};
  ConeSurface s(std::move(verts), std::move(faces));
  LengthAssigner assign(s);
  for (const auto& tri : placed)
    for (int q = 0; q < 3; ++q)
      assign.add(tri[q].first, tri[(q + 1) % 3].first, dist(tri[q].second, tri[(q + 1) % 3].second),
                 "build_two_cone_torus");
  return s;
}

ConeSurface buildThreeConeSphere(double alpha0, double alpha1, double alpha2, double h) {
  const std::array<double, 3> al{alpha0, alpha1, alpha2};
  for (double a : al)
    if (!(a > 0.0 && a < 0.5)) throw Error("surface", "build_three_cone_sphere", "0 < alpha < 1/2", "infeasible alpha");
  if (!(alpha0 + alpha1 + alpha2 < 1.0))
    throw Error("surface", "build_three_cone_sphere", "chi + sum(alpha - 1) < 0", "angles too large for a hyperbolic metric");
  if (!(h > 0.0)) throw Error("surface", "build_three_cone_sphere", "h > 0", "resolution must be positive");
  std::array<double, 3> side;
  for (int k = 0; k < 3; ++k) {
    const double A = pi * al[k], B = pi * al[(k + 1) % 3], C = pi * al[(k + 2) % 3];
    side[k] = std::acosh((std::cos(A) + std::cos(B) * std::cos(C)) / (std::sin(B) * std::sin(C)));
  }
  HTriangle tri;
  tri.lengths = side;
  const auto V = tri.realize();
  const int m = std::max(3, static_cast<int>(std::ceil(std::max({side[0], side[1], side[2]}) / h)));

  std::map<std::tuple<int, int, int>, int> ids; // (copy, a, b), copy 0 for boundary points
  int next = 3;
  auto idOf = [&](int copy, int a, int b) -> int {
    const int c = m - a - b;
    if (c == m) return 0;
    if (a == m) return 1;
    if (b == m) return 2;
    const bool onBoundary = a == 0 || b == 0 || c == 0;
    auto [it, inserted] = ids.emplace(std::tuple{onBoundary ? 0 : copy, a, b}, next);
    if (inserted) ++next;
    return it->second;
  };
  auto position = [&](int a, int b) {
    return projectiveCombination(V, {static_cast<double>(m - a - b) / m, static_cast<double>(a) / m,
                                     static_cast<double>(b) / m});
  };
  std::vector<std::array<int, 3>> faces;
  std::vector<std::array<std::pair<int, HPoint>, 3>> placed;
  // Barycentric grid with the three corner diagonals flipped: otherwise each
  // corner has an interior edge between two boundary points, which the
  // doubling would make non-manifold.
  using Tri = std::array<std::pair<int, int>, 3>;
  std::vector<Tri> grid;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; a + b < m; ++b) {
      const bool up0 = (a == 0 && b == 0) || (a == m - 1 && b == 0) || (a == 0 && b == m - 1);
      const bool down0 = (a == 0 && b == 0) || (a == m - 2 && b == 0) || (a == 0 && b == m - 2);
      if (!up0) grid.push_back({{{a, b}, {a + 1, b}, {a, b + 1}}});
      if (a + b < m - 1 && !down0) grid.push_back({{{a + 1, b}, {a + 1, b + 1}, {a, b + 1}}});
    }
  }
  grid.push_back({{{0, 0}, {1, 0}, {1, 1}}});
  grid.push_back({{{0, 0}, {1, 1}, {0, 1}}});
  grid.push_back({{{m - 1, 0}, {m, 0}, {m - 2, 1}}});
  grid.push_back({{{m, 0}, {m - 1, 1}, {m - 2, 1}}});
  grid.push_back({{{0, m}, {1, m - 2}, {1, m - 1}}});
  grid.push_back({{{0, m - 1}, {1, m - 2}, {0, m}}});
  for (int copy = 1; copy <= 2; ++copy) {
    for (auto t : grid) {
      if (copy == 2) std::swap(t[1], t[2]);
      std::array<std::pair<int, HPoint>, 3> p;
      for (int q = 0; q < 3; ++q) p[q] = {idOf(copy, t[q].first, t[q].second), position(t[q].first, t[q].second)};
      faces.push_back({p[0].first, p[1].first, p[2].first});
      placed.push_back(p);
    }
  }
  std::vector<VertexInfo> verts(next);
  for (int k = 0; k < 3; ++k) verts[k] = {true, al[k], false};
  ConeSurface s(std::move(verts), std::move(faces));
  LengthAssigner assign(s);
  for (const auto& p : placed)
    for (int q = 0; q < 3; ++q)
      assign.add(p[q].first, p[(q + 1) % 3].first, dist(p[q].second, p[(q + 1) % 3].second), "build_three_cone_sphere");
  return s;
}

double AnnulusGrid::theta(int sector) const { return 2.0 * pi * alpha * sector / sectors; }

ConeSurface buildConeAnnulus(const AnnulusGrid& g) {
  if (!(g.alpha > 0.0 && g.alpha < 0.5)) throw Error("surface", "build_cone_annulus", "0 < alpha < 1/2", "infeasible alpha");
  if (!(g.rhoMax > 0.0)) throw Error("surface", "build_cone_annulus", "rho_max > 0", "radius must be positive");
  if (g.rings < 1 || g.sectors < 8) throw Error("surface", "build_cone_annulus", "rings >= 1, sectors >= 8", "grid too coarse");
  const int n = g.sectors;
  std::vector<VertexInfo> verts(1 + g.rings * n);
  verts[0] = {true, g.alpha, false};
  for (int j = 0; j < n; ++j) verts[g.vertex(g.rings, j)].boundary = true;
  std::vector<std::array<int, 3>> faces;
  for (int j = 0; j < n; ++j) faces.push_back({0, g.vertex(1, j), g.vertex(1, j + 1)});
  for (int k = 1; k < g.rings; ++k) {
    for (int j = 0; j < n; ++j) {
      const int a = g.vertex(k, j), b = g.vertex(k, j + 1), c = g.vertex(k + 1, j + 1), d = g.vertex(k + 1, j);
      faces.push_back({a, d, c});
      faces.push_back({a, c, b});
    }
  }
  ConeSurface s(std::move(verts), std::move(faces));
  auto coneDist = [&](int v, int w) {
    const double r1 = g.rho(g.ringOf(v)), r2 = g.rho(g.ringOf(w));
    if (r1 == 0.0 || r2 == 0.0) return r1 + r2;
    int dj = std::abs(g.sectorOf(v) - g.sectorOf(w));
    dj = std::min(dj, n - dj);
    const double dth = 2.0 * pi * g.alpha * dj / n;
    // cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos dth, written to avoid cancellation
    const double s2 = std::sinh(0.5 * (r1 - r2));
    const double arg = s2 * s2 + std::sinh(r1) * std::sinh(r2) * std::sin(0.5 * dth) * std::sin(0.5 * dth);
    return 2.0 * std::asinh(std::sqrt(arg));
  };
  for (int e = 0; e < s.numEdges(); ++e) s.setLength(e, coneDist(s.edge(e)[0], s.edge(e)[1]));
  return s;
}

AnnulusGrid annulusGridForResolution(double alpha, double rhoMax, double h) {
  if (!(h > 0.0)) throw Error("surface", "build_cone_annulus", "h > 0", "resolution must be positive");
  AnnulusGrid g;
  g.alpha = alpha;
  g.rhoMax = rhoMax;
  g.rings = std::max(1, static_cast<int>(std::ceil(rhoMax / h)));
  g.sectors = std::max(8, static_cast<int>(std::ceil(2.0 * pi * alpha * std::sinh(rhoMax) / h)));
  return g;
}

ConeSurface buildConeAnnulus(double alpha, double rhoMax, double h) {
  return buildConeAnnulus(annulusGridForResolution(alpha, rhoMax, h));
}

} // namespace conemin
