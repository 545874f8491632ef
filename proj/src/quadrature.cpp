#include "cvqec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cvqec/common.hpp"
#include "cvqec/gaussian.hpp"

namespace cvqec {

void QuadratureSpec::validate() const {
  if (nodes < 16) throw std::invalid_argument("QuadratureSpec: nodes must be >= 16");
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
  }
}

namespace {

// Roots of the symmetric Jacobi matrix as starting points, then Newton on the
// orthonormal Hermite recurrence (stable for n in the hundreds where the monic
// polynomials overflow).
GaussHermiteRule build_gauss_hermite(int n) {
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int j = 1; j < n; ++j) jacobi(j, j - 1) = jacobi(j - 1, j) = std::sqrt(0.5 * j);
  const Eigen::VectorXd guesses = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(jacobi, Eigen::EigenvaluesOnly).eigenvalues();

  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = guesses(i);
    double pp = 0.0;
    bool converged = false;
    for (int it = 0; it < 20; ++it) {
      double p1 = kPiM4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z_old = z;
      z = z_old - p1 / pp;
      if (std::abs(z - z_old) <= 1e-15 * std::max(1.0, std::abs(z))) {
        converged = true;
        break;
      }
    }
    if (!converged || std::abs(z - guesses(i)) > 1e-6 * std::max(1.0, std::abs(z))) {
      throw NumericalError("gauss_hermite_rule: root refinement failed for n=" + std::to_string(n));
    }
    rule.nodes[i] = z;
    rule.weights[i] = 2.0 / (pp * pp);
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite_rule: n must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const GaussHermiteRule>(build_gauss_hermite(n));
  return *slot;
}

double integrate(const RealFunction& f, double lower, double upper, const QuadratureSpec& spec) {
  spec.validate();
  if (!(lower < upper)) throw std::invalid_argument("integrate: lower must be < upper");
  // Each bisection level costs one 61-point Kronrod panel per interval.
  const unsigned max_depth =
      static_cast<unsigned>(std::clamp(std::ceil(std::log2(static_cast<double>(spec.nodes))), 4.0, 24.0));
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, lower, upper, max_depth, spec.rel_tol, &error, &l1);
  if (!std::isfinite(value)) {
    throw QuadratureError("integrate: non-finite integrand", value, error);
  }
  const double allowed = std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  if (error > allowed) {
    throw QuadratureError("integrate: tolerance not met within node budget", value, error);
  }
  return value;
}

double gaussian_expectation(const RealFunction& h, double sigma, const QuadratureSpec& spec) {
  spec.validate();
  if (!(sigma > 0.0)) throw std::domain_error("gaussian_expectation: sigma must be positive");
  if (spec.method == QuadratureMethod::adaptive) {
    auto integrand = [&](double x) { return gaussian_pdf(x, sigma) * h(x); };
    return integrate(integrand, -12.0 * sigma, 12.0 * sigma, spec);
  }
  const auto& rule = gauss_hermite_rule(spec.nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * h(sigma * rule.nodes[i]);
  }
  return sum / std::sqrt(std::numbers::pi);
}

}  // namespace cvqec
