#include "cvqec/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvqec/common.hpp"

namespace cvqec {

namespace {

double checked(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) throw NumericalError("minimize_scalar: objective is not finite");
  return y;
}

}  // namespace

ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lower, double upper,
                              double tol, int grid_points) {
  if (!(lower < upper)) throw std::invalid_argument("minimize_scalar: lower must be < upper");
  if (!(tol > 0.0)) throw std::invalid_argument("minimize_scalar: tol must be positive");
  if (grid_points < 3) throw std::invalid_argument("minimize_scalar: need at least 3 grid points");

  const bool log_spaced = lower > 0.0;
  std::vector<double> xs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    xs[i] = log_spaced ? lower * std::pow(upper / lower, t) : lower + t * (upper - lower);
  }
  xs.front() = lower;
  xs.back() = upper;

  int best = 0;
  double best_value = checked(f, xs[0]);
  for (int i = 1; i < grid_points; ++i) {
    const double y = checked(f, xs[i]);
    if (y < best_value) {
      best_value = y;
      best = i;
    }
  }
  if (best == 0 || best == grid_points - 1) return {xs[best], best_value, false};

  // Golden section on [xs[best-1], xs[best+1]].
  constexpr double kInvPhi = 0.6180339887498949;
  double a = xs[best - 1];
  double b = xs[best + 1];
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = checked(f, c);
  double fd = checked(f, d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = checked(f, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = checked(f, d);
    }
  }
  ScalarMinimum result{0.5 * (a + b), 0.0, true};
  result.value = checked(f, result.argmin);
  // Never report worse than the scanned grid point.
  for (double x : {c, d}) {
    const double y = x == c ? fc : fd;
    if (y < result.value) result = {x, y, true};
  }
  if (best_value < result.value) result = {xs[best], best_value, true};
  return result;
}

}  // namespace cvqec
