#pragma once

#include <functional>
#include <vector>

namespace cvqec {

enum class QuadratureMethod { gauss_hermite, adaptive };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::gauss_hermite;
  int nodes = 200;
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;

  // Throws std::invalid_argument unless nodes >= 16 and both tolerances > 0.
  void validate() const;
};

// Nodes and weights for the weight function exp(-t^2) on the real line.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached per size; the returned reference stays valid for the program lifetime.
const GaussHermiteRule& gauss_hermite_rule(int n);

using RealFunction = std::function<double(double)>;

// Definite integral on [lower, upper] by adaptive Gauss-Kronrod bisection.
// The node budget bounds the recursion depth. Throws QuadratureError (with the
// best estimate and residual) if max(abs_tol, rel_tol * |value|) is not met.
double integrate(const RealFunction& f, double lower, double upper,
                 const QuadratureSpec& spec = {});

// Integral of G(x, sigma) * h(x) over the whole line. Gauss-Hermite after the
// substitution x = sigma * t, or adaptive on [-12 sigma, 12 sigma].
double gaussian_expectation(const RealFunction& h, double sigma,
                            const QuadratureSpec& spec = {});

}  // namespace cvqec
