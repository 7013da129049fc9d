#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "covsim/errors.hpp"

namespace covsim {

/// Absolute tolerance for vertex dedup, convexity checks and point classification.
inline constexpr double eps_geom = 1e-12;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
inline Point2 operator/(Point2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

/// Closed half-plane { z : <normal, z> <= offset } with unit normal.
struct HalfPlane {
  Point2 normal{1.0, 0.0};
  double offset = 0.0;

  HalfPlane() = default;

  /// Normalizes the pair so the stored normal is unit length.
  HalfPlane(Point2 n, double o) {
    const double len = norm(n);
    if (!(len > eps_geom) || !std::isfinite(len) || !std::isfinite(o)) {
      throw InvalidConfig("half-plane normal must be finite and non-degenerate");
    }
    normal = n / len;
    offset = o / len;
  }

  /// Negative inside the half-plane, positive outside.
  double signed_distance(Point2 z) const { return dot(normal, z) - offset; }
};

/// Convex polygon as a CCW vertex list; an empty vertex list is the empty set.
struct ConvexPolygon {
  std::vector<Point2> vertices;

  bool empty() const { return vertices.empty(); }
  std::size_t size() const { return vertices.size(); }

  double area() const {
    double twice = 0.0;
    const std::size_t m = vertices.size();
    for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
      twice += cross(vertices[e1], vertices[e2]);
    }
    return 0.5 * twice;
  }

  /// Arithmetic mean of the vertices; inside the polygon by convexity.
  Point2 vertex_average() const {
    Point2 s{};
    for (const Point2& v : vertices) s = s + v;
    return s / static_cast<double>(vertices.size());
  }

  /// Membership up to a signed distance tolerance from every edge line.
  bool contains(Point2 z, double tol = eps_geom) const {
    const std::size_t m = vertices.size();
    if (m < 3) return false;
    for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
      const Point2 edge = vertices[e2] - vertices[e1];
      const double len = norm(edge);
      if (cross(edge, z - vertices[e1]) < -tol * len) return false;
    }
    return true;
  }

  /// Throws InvalidConfig unless empty or a CCW convex polygon with
  /// finite vertices, no near-duplicate consecutive vertices, and
  /// every consecutive edge turn >= -eps_geom.
  void validate() const {
    if (vertices.empty()) return;
    const std::size_t m = vertices.size();
    if (m < 3) throw InvalidConfig("polygon needs at least 3 vertices or none");
    for (const Point2& v : vertices) {
      if (!is_finite(v)) throw InvalidConfig("polygon vertex is not finite");
    }
    for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
      if (distance(vertices[e1], vertices[e2]) <= eps_geom) {
        throw InvalidConfig("consecutive polygon vertices nearly coincide");
      }
    }
    for (std::size_t i = 0; i != m; ++i) {
      const Point2& a = vertices[i];
      const Point2& b = vertices[(i + 1) % m];
      const Point2& c = vertices[(i + 2) % m];
      if (cross(b - a, c - b) < -eps_geom) {
        throw InvalidConfig("polygon is not convex in CCW order");
      }
    }
    if (!(area() > 0.0)) throw InvalidConfig("polygon area must be positive");
  }
};

/// CCW order with the lexicographically smallest vertex (x, then y) first.
inline ConvexPolygon normalized(const ConvexPolygon& poly) {
  if (poly.empty()) return poly;
  ConvexPolygon out = poly;
  if (out.area() < 0.0) std::reverse(out.vertices.begin(), out.vertices.end());
  const auto lex_less = [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  };
  const auto first = std::min_element(out.vertices.begin(), out.vertices.end(), lex_less);
  std::rotate(out.vertices.begin(), first, out.vertices.end());
  return out;
}

/// Intersection of a convex polygon with one half-plane; empty when disjoint.
inline ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& half) {
  if (poly.empty()) return {};
  const std::size_t m = poly.vertices.size();
  std::vector<Point2> out;
  out.reserve(m + 1);
  for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
    const Point2& a = poly.vertices[e1];
    const Point2& b = poly.vertices[e2];
    const double da = half.signed_distance(a);
    const double db = half.signed_distance(b);
    const bool ina = da <= eps_geom;
    const bool inb = db <= eps_geom;
    if (ina != inb) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
    if (inb) out.push_back(b);
  }
  // Drop near-duplicate consecutive vertices introduced by grazing cuts.
  std::vector<Point2> dedup;
  dedup.reserve(out.size());
  for (const Point2& v : out) {
    if (dedup.empty() || distance(dedup.back(), v) > eps_geom) dedup.push_back(v);
  }
  while (dedup.size() > 1 && distance(dedup.front(), dedup.back()) <= eps_geom) {
    dedup.pop_back();
  }
  if (dedup.size() < 3) return {};
  ConvexPolygon result{std::move(dedup)};
  if (!(result.area() > 0.0)) return {};
  return result;
}

/// Half-plane of points at least as close to p as to q.
inline HalfPlane bisector_halfplane(Point2 p, Point2 q) {
  const double sep = distance(p, q);
  if (sep <= eps_geom) {
    throw CoincidentAgents("agent positions closer than eps_geom admit no bisector");
  }
  const Point2 n = (q - p) / sep;
  const Point2 mid = 0.5 * (p + q);
  return HalfPlane(n, dot(n, mid));
}

namespace detail {

inline void check_configuration(const std::vector<Point2>& positions,
                                std::size_t index,
                                const ConvexPolygon& workspace) {
  if (positions.size() < 2) {
    throw InvalidConfig("a coverage configuration needs at least 2 agents");
  }
  if (index >= positions.size()) {
    throw InvalidConfig("agent index out of range");
  }
  if (workspace.empty()) throw InvalidConfig("workspace polygon is empty");
  for (std::size_t p = 0; p != positions.size(); ++p) {
    if (!workspace.contains(positions[p], eps_geom)) {
      throw PositionOutsideWorkspace("agent " + std::to_string(p) +
                                     " lies outside the workspace");
    }
  }
}

}  // namespace detail

/// Voronoi cell of agent `index` inside `workspace`, normalized CCW.
inline ConvexPolygon voronoi_cell(const std::vector<Point2>& positions,
                                  std::size_t index,
                                  const ConvexPolygon& workspace) {
  detail::check_configuration(positions, index, workspace);
  ConvexPolygon cell = workspace;
  for (std::size_t q = 0; q != positions.size(); ++q) {
    if (q == index) continue;
    cell = clip(cell, bisector_halfplane(positions[index], positions[q]));
    if (cell.empty()) break;
  }
  return normalized(cell);
}

/// Agents whose bisector contributes a cell edge longer than eps_geom.
inline std::vector<std::size_t> voronoi_neighbors(const std::vector<Point2>& positions,
                                                  std::size_t index,
                                                  const ConvexPolygon& workspace) {
  const ConvexPolygon cell = voronoi_cell(positions, index, workspace);
  std::vector<std::size_t> neighbors;
  if (cell.empty()) return neighbors;
  const double on_line_tol = 1e-9;
  const std::size_t m = cell.vertices.size();
  for (std::size_t q = 0; q != positions.size(); ++q) {
    if (q == index) continue;
    const HalfPlane h = bisector_halfplane(positions[index], positions[q]);
    double shared = 0.0;
    for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
      if (std::abs(h.signed_distance(cell.vertices[e1])) <= on_line_tol &&
          std::abs(h.signed_distance(cell.vertices[e2])) <= on_line_tol) {
        shared += distance(cell.vertices[e1], cell.vertices[e2]);
      }
    }
    if (shared > eps_geom) neighbors.push_back(q);
  }
  return neighbors;
}

}  // namespace covsim
