#pragma once

#include <cmath>

#include "covsim/geometry.hpp"

namespace covsim {

/// Strictly positive weight over the workspace: uniform 1, or
/// exp(-coefficient * |z - center|^2).
struct DensityField {
  enum class Kind { uniform, gaussian };

  Kind kind = Kind::uniform;
  Point2 center{};
  double coefficient = 0.0;

  static DensityField uniform() { return {}; }

  static DensityField gaussian(Point2 center, double coefficient) {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient) || !is_finite(center)) {
      throw InvalidConfig("gaussian density needs a finite center and coefficient > 0");
    }
    DensityField d;
    d.kind = Kind::gaussian;
    d.center = center;
    d.coefficient = coefficient;
    return d;
  }

  double operator()(Point2 z) const {
    if (kind == Kind::uniform) return 1.0;
    return std::exp(-coefficient * norm_sq(z - center));
  }
};

}  // namespace covsim
