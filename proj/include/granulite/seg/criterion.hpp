#pragma once

#include <cmath>

#include "granulite/geometry/types.hpp"

namespace granulite::seg {

// Threshold used for the aggregate stockpiles, roughly a 45 degree opening
// between the center-difference vector and the face normal.
inline constexpr double kDefaultThreshold = 0.7;

struct CriterionParams {
  double threshold = kDefaultThreshold;

  void check() const {
    if (!(threshold >= -2.0 && threshold <= 2.0))
      throw Error("curvature threshold must lie in [-2, 2], got " + std::to_string(threshold));
  }
};

// (c + n_next) . n_cur, the quantity compared against the threshold.
inline double criterion_value(const Vec3& c, const Vec3& n_next, const Vec3& n_cur) { return (c + n_next).dot(n_cur); }

// Curvature test between the current face and a candidate neighbor:
// true means the neighbor continues the current particle, false marks a boundary.
// Ties go to the boundary.
inline bool curvature_criterion(const Vec3& c, const Vec3& n_next, const Vec3& n_cur, const CriterionParams& params) {
  auto unit = [](const Vec3& v, const char* name) {
    if (!(std::abs(v.norm() - 1.0) <= kUnitNormTolerance))
      throw NonUnitInput(std::string(name) + " is not unit length (norm " + std::to_string(v.norm()) + ")");
  };
  unit(c, "center difference");
  unit(n_next, "neighbor normal");
  unit(n_cur, "current normal");
  return criterion_value(c, n_next, n_cur) > params.threshold;
}

}  // namespace granulite::seg
