#pragma once

#include <cstddef>
#include <vector>

#include "stokeswave/errors.hpp"

namespace stokeswave {

/// One accepted continuation point: steepness, speed, the conserved-quantity
/// columns (contour-integral convention), the mass-constraint residual, and
/// the grid size used.
struct BranchPoint {
  double s = 0.0;
  double c = 0.0;
  double H = 0.0;           // wave energy
  double P = 0.0;           // wave momentum
  double E = 0.0;           // wave action, E = c P - H
  double m_residual = 0.0;  // |M(eta)|
  std::size_t n = 0;
};

/// Ordered branch summary; s strictly increasing.
struct Branch {
  std::vector<BranchPoint> points;

  void check_monotone() const {
    for (std::size_t i = 1; i < points.size(); ++i)
      if (!(points[i].s > points[i - 1].s))
        throw MonotonicityViolation("branch steepness is not strictly increasing");
  }

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

}  // namespace stokeswave
