#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "covsim/density.hpp"
#include "covsim/geometry.hpp"

namespace covsim {

/// Controls the adaptive polygon integrator: the cell is fan-triangulated
/// from its vertex average, each triangle carries a fixed symmetric
/// degree-5 rule, and the whole fan is uniformly subdivided until two
/// successive refinements agree to rel_tol (or the depth cap is hit).
struct QuadratureSpec {
  int max_subdivision_depth = 10;
  double rel_tol = 1e-9;
};

namespace detail {

struct TriangleRule5 {
  std::array<double, 3> b1;  // barycentric coordinate of the first vertex
  std::array<double, 3> b2;
  std::array<double, 3> w;
  double wc;

  TriangleRule5() {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double a2 = (6.0 + s15) / 21.0;
    b1 = {1.0 - 2.0 * a1, a1, a1};
    b2 = {1.0 - 2.0 * a2, a2, a2};
    w = {(155.0 - s15) / 1200.0, (155.0 + s15) / 1200.0, 9.0 / 40.0};
    wc = w[2];
  }
};

inline const TriangleRule5& triangle_rule5() {
  static const TriangleRule5 rule;
  return rule;
}

template <std::size_t K, class F>
void rule_on_triangle(Point2 a, Point2 b, Point2 c, F&& f, std::array<double, K>& acc) {
  const TriangleRule5& r = triangle_rule5();
  const double area = 0.5 * cross(b - a, c - a);
  const auto add = [&](Point2 z, double w) {
    const std::array<double, K> fv = f(z);
    for (std::size_t k = 0; k != K; ++k) acc[k] += w * area * fv[k];
  };
  add((a + b + c) / 3.0, r.wc);
  for (int rot = 0; rot != 3; ++rot) {
    const Point2 va = rot == 0 ? a : (rot == 1 ? b : c);
    const Point2 vb = rot == 0 ? b : (rot == 1 ? c : a);
    const Point2 vc = rot == 0 ? c : (rot == 1 ? a : b);
    add(r.b1[0] * va + r.b1[1] * vb + r.b1[2] * vc, r.w[0]);
    add(r.b2[0] * va + r.b2[1] * vb + r.b2[2] * vc, r.w[1]);
  }
}

template <std::size_t K, class F>
void subdivided_triangle(Point2 a, Point2 b, Point2 c, int depth, F&& f,
                         std::array<double, K>& acc) {
  if (depth == 0) {
    rule_on_triangle<K>(a, b, c, f, acc);
    return;
  }
  const Point2 ab = 0.5 * (a + b);
  const Point2 bc = 0.5 * (b + c);
  const Point2 ca = 0.5 * (c + a);
  subdivided_triangle<K>(a, ab, ca, depth - 1, f, acc);
  subdivided_triangle<K>(ab, b, bc, depth - 1, f, acc);
  subdivided_triangle<K>(ca, bc, c, depth - 1, f, acc);
  subdivided_triangle<K>(ab, bc, ca, depth - 1, f, acc);
}

}  // namespace detail

/// Fan quadrature of a K-component integrand at a fixed subdivision depth.
template <std::size_t K, class F>
std::array<double, K> integrate_fixed_depth(const ConvexPolygon& cell, F&& f, int depth) {
  if (cell.empty()) throw EmptyRegion("cannot integrate over an empty cell");
  std::array<double, K> acc{};
  const Point2 apex = cell.vertex_average();
  const std::size_t m = cell.vertices.size();
  for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
    detail::subdivided_triangle<K>(apex, cell.vertices[e1], cell.vertices[e2], depth, f, acc);
  }
  return acc;
}

/// Adaptive fan quadrature: refines until every component moves by at most
/// rel_tol relative to the largest component magnitude.
template <std::size_t K, class F>
std::array<double, K> integrate(const ConvexPolygon& cell, F&& f, const QuadratureSpec& quad) {
  std::array<double, K> prev = integrate_fixed_depth<K>(cell, f, 0);
  for (int depth = 1; depth <= quad.max_subdivision_depth; ++depth) {
    const std::array<double, K> cur = integrate_fixed_depth<K>(cell, f, depth);
    double scale = 0.0;
    for (double v : cur) scale = std::max(scale, std::abs(v));
    bool converged = true;
    for (std::size_t k = 0; k != K; ++k) {
      if (std::abs(cur[k] - prev[k]) > quad.rel_tol * scale) converged = false;
    }
    prev = cur;
    if (converged) break;
  }
  return prev;
}

/// Integral of the density over the cell; strictly positive.
inline double mass(const ConvexPolygon& cell, const DensityField& density,
                   const QuadratureSpec& quad) {
  const auto m = integrate<1>(
      cell, [&](Point2 z) { return std::array<double, 1>{density(z)}; }, quad);
  return m[0];
}

/// Density-weighted centroid of the cell; lies inside the cell.
inline Point2 weighted_centroid(const ConvexPolygon& cell, const DensityField& density,
                                const QuadratureSpec& quad) {
  const auto m = integrate<3>(
      cell,
      [&](Point2 z) {
        const double phi = density(z);
        return std::array<double, 3>{phi, z.x * phi, z.y * phi};
      },
      quad);
  return Point2{m[1] / m[0], m[2] / m[0]};
}

/// Density-weighted second moment of the cell about the point x_p.
inline double cell_cost(Point2 x_p, const ConvexPolygon& cell, const DensityField& density,
                        const QuadratureSpec& quad) {
  const auto m = integrate<1>(
      cell,
      [&](Point2 z) { return std::array<double, 1>{norm_sq(x_p - z) * density(z)}; },
      quad);
  return m[0];
}

/// Sum of per-agent cell costs over the Voronoi partition of the workspace.
inline double locational_cost(const std::vector<Point2>& positions,
                              const ConvexPolygon& workspace, const DensityField& density,
                              const QuadratureSpec& quad) {
  double total = 0.0;
  for (std::size_t p = 0; p != positions.size(); ++p) {
    total += cell_cost(positions[p], voronoi_cell(positions, p, workspace), density, quad);
  }
  return total;
}

}  // namespace covsim
