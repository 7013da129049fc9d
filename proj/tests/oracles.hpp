#pragma once

// Reference computations for the tests, kept deliberately independent of the
// library's own clipping and quadrature: plain grids, scanlines and closed
// forms only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "covsim/geometry.hpp"

namespace oracle {

using covsim::Point2;

inline bool point_in_convex_ccw(const std::vector<Point2>& poly, double x, double y) {
  const std::size_t m = poly.size();
  for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
    const Point2& a = poly[e1];
    const Point2& b = poly[e2];
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross < 0.0) return false;
  }
  return true;
}

/// Voronoi cell areas by brute force: a uniform grid over the workspace
/// bounding box, each sample assigned to its nearest site (ties to the lower
/// index). Accuracy is O(perimeter * cell_size), about 0.1% at 2000x2000.
inline std::vector<double> grid_cell_areas(const std::vector<Point2>& sites,
                                           const std::vector<Point2>& workspace,
                                           int resolution = 2000) {
  double x_lo = workspace.front().x, x_hi = x_lo;
  double y_lo = workspace.front().y, y_hi = y_lo;
  for (const Point2& v : workspace) {
    x_lo = std::min(x_lo, v.x);
    x_hi = std::max(x_hi, v.x);
    y_lo = std::min(y_lo, v.y);
    y_hi = std::max(y_hi, v.y);
  }
  const double dx = (x_hi - x_lo) / resolution;
  const double dy = (y_hi - y_lo) / resolution;
  const double cell = dx * dy;
  std::vector<double> areas(sites.size(), 0.0);
  for (int iy = 0; iy != resolution; ++iy) {
    const double y = y_lo + (iy + 0.5) * dy;
    for (int ix = 0; ix != resolution; ++ix) {
      const double x = x_lo + (ix + 0.5) * dx;
      if (!point_in_convex_ccw(workspace, x, y)) continue;
      std::size_t best = 0;
      double best_d = (x - sites[0].x) * (x - sites[0].x) + (y - sites[0].y) * (y - sites[0].y);
      for (std::size_t p = 1; p != sites.size(); ++p) {
        const double d =
            (x - sites[p].x) * (x - sites[p].x) + (y - sites[p].y) * (y - sites[p].y);
        if (d < best_d) {
          best_d = d;
          best = p;
        }
      }
      areas[best] += cell;
    }
  }
  return areas;
}

/// Riemann sum over a convex CCW polygon organized as horizontal scanlines.
/// Rows are placed between consecutive vertex ordinates so every chord is an
/// exact polygon cross-section; columns use the midpoint rule on the chord.
/// With ~4096 rows and 4096 columns the smooth-integrand error is well below
/// 1e-6 relative.
inline double scanline_integral(const std::vector<Point2>& poly,
                                const std::function<double(double, double)>& f,
                                int target_rows = 4096, int columns = 4096) {
  std::vector<double> ys;
  for (const Point2& v : poly) ys.push_back(v.y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-14; }),
           ys.end());
  const double height = ys.back() - ys.front();

  double total = 0.0;
  for (std::size_t band = 0; band + 1 < ys.size(); ++band) {
    const double y0 = ys[band], y1 = ys[band + 1];
    const int rows = std::max(1, static_cast<int>(std::lround(target_rows * (y1 - y0) / height)));
    const double row_h = (y1 - y0) / rows;
    for (int r = 0; r != rows; ++r) {
      const double y = y0 + (r + 0.5) * row_h;
      double x_lo = 0.0, x_hi = 0.0;
      bool found = false;
      const std::size_t m = poly.size();
      for (std::size_t e2 = 0, e1 = m - 1; e2 != m; e1 = e2++) {
        const Point2& a = poly[e1];
        const Point2& b = poly[e2];
        if ((a.y <= y) == (b.y <= y)) continue;
        const double x = a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (!found) {
          x_lo = x_hi = x;
          found = true;
        } else {
          x_lo = std::min(x_lo, x);
          x_hi = std::max(x_hi, x);
        }
      }
      if (!found || x_hi - x_lo <= 0.0) continue;
      const double col_w = (x_hi - x_lo) / columns;
      double row_sum = 0.0;
      for (int c = 0; c != columns; ++c) {
        row_sum += f(x_lo + (c + 0.5) * col_w, y);
      }
      total += row_sum * col_w * row_h;
    }
  }
  return total;
}

struct ScanlineMoments {
  double mass = 0.0;
  Point2 centroid;
};

inline ScanlineMoments scanline_moments(const std::vector<Point2>& poly,
                                        const std::function<double(double, double)>& phi) {
  ScanlineMoments out;
  out.mass = scanline_integral(poly, phi);
  const double mx = scanline_integral(poly, [&](double x, double y) { return x * phi(x, y); });
  const double my = scanline_integral(poly, [&](double x, double y) { return y * phi(x, y); });
  out.centroid = {mx / out.mass, my / out.mass};
  return out;
}

inline double scanline_cost(const std::vector<Point2>& poly, Point2 site,
                            const std::function<double(double, double)>& phi) {
  return scanline_integral(poly, [&](double x, double y) {
    const double dx = x - site.x, dy = y - site.y;
    return (dx * dx + dy * dy) * phi(x, y);
  });
}

/// Random convex polygon: an affinely distorted regular K-gon. Affine maps
/// preserve convexity, and a reflection-free map preserves CCW orientation.
inline std::vector<Point2> random_convex_polygon(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> sides(3, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = sides(rng);
  const double rot = unit(rng) * 6.283185307179586;
  const double sx = 0.5 + 2.5 * unit(rng);
  const double sy = 0.5 + 2.5 * unit(rng);
  const double shear = (unit(rng) - 0.5) * 1.0;
  const double cx = unit(rng) * 10.0, cy = unit(rng) * 8.0;
  std::vector<Point2> poly;
  for (int i = 0; i != k; ++i) {
    const double th = rot + 6.283185307179586 * i / k;
    const double ux = std::cos(th), uy = std::sin(th);
    poly.push_back({cx + sx * ux + shear * uy, cy + sy * uy});
  }
  return poly;
}

}  // namespace oracle
