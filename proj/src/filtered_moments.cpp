#include "cvqec/filtered_moments.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "cvqec/gaussian.hpp"

namespace cvqec {

namespace {

void check_sigma_alpha(double sigma, double alpha) {
  if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw std::domain_error("alpha must be >= 0");
}

void check_qudit(int d, int l) {
  if (d < 1) throw std::domain_error("qudit dimension must be >= 1");
  if (l < 0 || l >= d) throw std::domain_error("outcome index must lie in [0, d-1]");
}

FilteredMoments finish(double prob, double first, double second) {
  FilteredMoments m;
  m.outcome_prob = prob;
  if (prob > 0.0) {
    m.mean = first / prob;
    m.second_moment = second / prob;
    m.variance = std::max(0.0, m.second_moment - m.mean * m.mean);
  }
  return m;
}

}  // namespace

double qubit_filter(double beta, double alpha, YOutcome outcome) {
  const double s = std::sin(4.0 * alpha * beta);
  return 0.5 * (outcome == YOutcome::plus ? 1.0 + s : 1.0 - s);
}

FilteredMoments qubit_filtered_moments(double sigma, double alpha, YOutcome outcome) {
  check_sigma_alpha(sigma, alpha);
  const double s2 = sigma * sigma;
  const double shift = 2.0 * alpha * s2 * std::exp(-4.0 * alpha * alpha * s2);
  FilteredMoments m;
  m.outcome_prob = 0.5;
  m.mean = outcome == YOutcome::plus ? shift : -shift;
  m.second_moment = 0.5 * s2;
  m.variance = 0.5 * s2 - 4.0 * alpha * alpha * s2 * s2 * std::exp(-8.0 * alpha * alpha * s2);
  return m;
}

double basis_offset(FourierBasis basis) noexcept {
  return basis == FourierBasis::half_shifted ? 0.5 : 0.0;
}

double qudit_filter(double beta, double alpha, int d, int l, FourierBasis basis) {
  check_qudit(d, l);
  if (d == 1) return 1.0;
  const double x = alpha * beta + (l + basis_offset(basis)) * std::numbers::pi / d;
  // The squared ratio has period pi in x.
  const double eps = std::remainder(x, std::numbers::pi);
  const double denom = std::sin(eps);
  if (std::abs(denom) < 1e-6) {
    return 1.0 - (static_cast<double>(d) * d - 1.0) * eps * eps / 3.0;
  }
  const double num = std::sin(d * eps);
  return (num * num) / (static_cast<double>(d) * d * denom * denom);
}

FilteredMoments qudit_filtered_moments(double sigma, double alpha, int d, int l, FourierBasis basis) {
  check_sigma_alpha(sigma, alpha);
  check_qudit(d, l);
  const double v = 0.5 * sigma * sigma;
  const double offset = basis_offset(basis);
  // Kernel = (1/d^2) sum_m (d - |m|) Re exp(i (k_m beta + phi_m)),
  // k_m = 2 m alpha, phi_m = 2 pi m (l + offset) / d.
  // E[beta^j exp(i k beta)] for the Gaussian of variance v:
  //   j=0: exp(-k^2 v / 2), j=1: i k v exp(..), j=2: (v - k^2 v^2) exp(..)
  double prob = 0.0, first = 0.0, second = 0.0;
  const double inv_d2 = 1.0 / (static_cast<double>(d) * d);
  for (int m = -(d - 1); m <= d - 1; ++m) {
    const double c = (d - std::abs(m)) * inv_d2;
    const double k = 2.0 * m * alpha;
    const double phi = 2.0 * std::numbers::pi * m * (l + offset) / d;
    const double g = std::exp(-0.5 * k * k * v);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    prob += c * cphi * g;
    first += c * (-sphi) * k * v * g;  // Re[e^{i phi} * i k v g]
    second += c * cphi * (v - k * k * v * v) * g;
  }
  return finish(prob, first, second);
}

FilteredMoments qudit_filtered_moments_quadrature(double sigma, double alpha, int d, int l,
                                                  FourierBasis basis, const QuadratureSpec& spec) {
  check_sigma_alpha(sigma, alpha);
  check_qudit(d, l);
  QuadratureSpec chosen = spec;
  // Oscillatory regime: kernel peaks closer than sigma/4 defeat a fixed rule.
  if (alpha > 0.0 && std::numbers::pi / alpha < sigma / 4.0) {
    chosen.method = QuadratureMethod::adaptive;
    chosen.nodes = std::max(chosen.nodes, 1 << 14);
  }
  auto kernel = [&](double b) { return qudit_filter(b, alpha, d, l, basis); };
  const double prob = gaussian_expectation(kernel, sigma, chosen);
  const double first = gaussian_expectation([&](double b) { return b * kernel(b); }, sigma, chosen);
  const double second =
      gaussian_expectation([&](double b) { return b * b * kernel(b); }, sigma, chosen);
  return finish(prob, first, second);
}

double average_corrected_variance(const std::vector<FilteredMoments>& outcomes) {
  double total = 0.0;
  for (const auto& m : outcomes) total += m.outcome_prob * m.variance;
  return total;
}

}  // namespace cvqec
