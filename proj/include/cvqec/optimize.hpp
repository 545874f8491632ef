#pragma once

#include <functional>

namespace cvqec {

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  // False when the coarse scan's best point sat on a bracket edge; the edge
  // point is returned unrefined.
  bool interior = true;
};

// Coarse scan on `grid_points` points (log-spaced when lower > 0, else linear),
// then golden-section refinement on the neighbours of the best point, to `tol`
// in argument units. Throws NumericalError on non-finite f.
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lower, double upper,
                              double tol = 1e-6, int grid_points = 32);

}  // namespace cvqec
