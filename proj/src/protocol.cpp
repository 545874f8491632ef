#include "cvqec/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqec/optimize.hpp"

namespace cvqec {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::domain_error("sigma must be positive");
}

double half_var(double sigma) { return 0.5 * sigma * sigma; }

}  // namespace

void ProtocolConfig::validate() const {
  check_sigma(sigma);
  if (!(alpha >= 0.0) || !(alpha_q >= 0.0)) throw std::domain_error("alpha must be >= 0");
  if (scheme == SchemeKind::qudit && (d < 2 || d > 32)) {
    throw std::domain_error("qudit dimension must lie in [2, 32]");
  }
  if (scheme == SchemeKind::squeezed_qubit && !(std::abs(zeta) < 1.0)) {
    throw std::domain_error("|zeta| must be < 1");
  }
}

double optimal_qubit_alpha(double sigma) {
  check_sigma(sigma);
  return 1.0 / (2.0 * std::numbers::sqrt2 * sigma);
}

double optimal_squeezing() { return 0.125 * std::log(1.0 - std::exp(-1.0)); }

double squeezing_db(double zeta) { return 40.0 * std::abs(zeta) * std::numbers::log10e; }

double squeezed_sigma_q(double sigma, double zeta) { return sigma * std::exp(2.0 * zeta); }
double squeezed_sigma_p(double sigma, double zeta) { return sigma * std::exp(-2.0 * zeta); }

double qubit_correction_shift(double sigma_p, double alpha) {
  return qubit_filtered_moments(sigma_p, alpha, YOutcome::plus).mean;
}

CorrectedNoise run_qubit_p_scheme(double sigma, double alpha) {
  check_sigma(sigma);
  CorrectedNoise out;
  out.per_outcome = {qubit_filtered_moments(sigma, alpha, YOutcome::plus),
                     qubit_filtered_moments(sigma, alpha, YOutcome::minus)};
  out.var_p = average_corrected_variance(out.per_outcome);
  out.var_q = half_var(sigma);
  return out;
}

CorrectedNoise run_two_qubit_scheme(double sigma, double alpha_q, double alpha_p) {
  // The q-correcting ancilla uses an imaginary conditional displacement; by
  // symmetry its filter acts on beta_q exactly as the real one acts on beta_p.
  CorrectedNoise out = run_qubit_p_scheme(sigma, alpha_p);
  const CorrectedNoise q_side = run_qubit_p_scheme(sigma, alpha_q);
  out.var_q = q_side.var_p;
  out.per_outcome.insert(out.per_outcome.end(), q_side.per_outcome.begin(), q_side.per_outcome.end());
  return out;
}

CorrectedNoise run_squeezed_scheme(double sigma, double alpha, double zeta) {
  check_sigma(sigma);
  if (!(std::abs(zeta) < 1.0)) throw std::domain_error("|zeta| must be < 1");
  CorrectedNoise out = run_qubit_p_scheme(squeezed_sigma_p(sigma, zeta), alpha);
  out.var_q = half_var(squeezed_sigma_q(sigma, zeta));
  return out;
}

CorrectedNoise run_qudit_scheme(double sigma, double alpha, int d, FourierBasis basis) {
  check_sigma(sigma);
  if (d < 2) throw std::domain_error("qudit dimension must be >= 2");
  CorrectedNoise out;
  out.per_outcome.reserve(d);
  for (int l = 0; l < d; ++l) out.per_outcome.push_back(qudit_filtered_moments(sigma, alpha, d, l, basis));
  out.var_p = average_corrected_variance(out.per_outcome);
  out.var_q = half_var(sigma);
  return out;
}

CorrectedNoise run_scheme(const ProtocolConfig& config) {
  config.validate();
  switch (config.scheme) {
    case SchemeKind::qubit_p:
      return run_qubit_p_scheme(config.sigma, config.alpha);
    case SchemeKind::two_qubit:
      return run_two_qubit_scheme(config.sigma, config.alpha_q, config.alpha);
    case SchemeKind::squeezed_qubit:
      return run_squeezed_scheme(config.sigma, config.alpha, config.zeta);
    case SchemeKind::qudit:
      return run_qudit_scheme(config.sigma, config.alpha, config.d, config.basis);
  }
  throw std::invalid_argument("run_scheme: unknown scheme");
}

double qudit_bound(double sigma, double s, int d) {
  check_sigma(sigma);
  if (d < 1) throw std::domain_error("qudit_bound: d must be >= 1");
  return sigma * sigma * s * s / (4.0 * d);
}

double infidelity_from_noise(StateKind kind, const CorrectedNoise& noise) {
  const double curvature = overlap_curvature(kind);
  return -0.5 * curvature * (noise.var_q + noise.var_p);
}

bool small_noise_regime(const CorrectedNoise& noise) {
  return noise.var_q <= 0.05 && noise.var_p <= 0.05;
}

QuadratureDistribution uncorrected_distribution(double sigma) {
  check_sigma(sigma);
  QuadratureDistribution dist;
  dist.sigma = sigma;
  dist.branches.push_back({1.0, 0.0, [](double) { return 1.0; }});
  return dist;
}

QuadratureDistribution qubit_corrected_distribution(double sigma, double alpha) {
  check_sigma(sigma);
  QuadratureDistribution dist;
  dist.sigma = sigma;
  for (YOutcome o : {YOutcome::plus, YOutcome::minus}) {
    const FilteredMoments m = qubit_filtered_moments(sigma, alpha, o);
    dist.branches.push_back({m.outcome_prob, m.mean, [alpha, o](double b) { return qubit_filter(b, alpha, o); }});
  }
  return dist;
}

QuadratureDistribution qudit_corrected_distribution(double sigma, double alpha, int d, FourierBasis basis) {
  check_sigma(sigma);
  QuadratureDistribution dist;
  dist.sigma = sigma;
  for (int l = 0; l < d; ++l) {
    const FilteredMoments m = qudit_filtered_moments(sigma, alpha, d, l, basis);
    dist.branches.push_back(
        {m.outcome_prob, m.mean, [alpha, d, l, basis](double b) { return qudit_filter(b, alpha, d, l, basis); }});
  }
  return dist;
}

CorrectedDistributions corrected_distributions(const ProtocolConfig& config) {
  config.validate();
  const double s = config.sigma;
  switch (config.scheme) {
    case SchemeKind::qubit_p:
      return {uncorrected_distribution(s), qubit_corrected_distribution(s, config.alpha)};
    case SchemeKind::two_qubit:
      return {qubit_corrected_distribution(s, config.alpha_q), qubit_corrected_distribution(s, config.alpha)};
    case SchemeKind::squeezed_qubit:
      return {uncorrected_distribution(squeezed_sigma_q(s, config.zeta)),
              qubit_corrected_distribution(squeezed_sigma_p(s, config.zeta), config.alpha)};
    case SchemeKind::qudit:
      return {uncorrected_distribution(s), qudit_corrected_distribution(s, config.alpha, config.d, config.basis)};
  }
  throw std::invalid_argument("corrected_distributions: unknown scheme");
}

double exact_infidelity(StateKind kind, const QuadratureDistribution& q, const QuadratureDistribution& p,
                        const QuadratureSpec& spec) {
  // Substituting u = b + shift turns each branch into a Gaussian-weighted
  // integral of filter(u) * f(u - shift); the branch probabilities cancel.
  double fidelity = 0.0;
  for (const auto& bq : q.branches) {
    for (const auto& bp : p.branches) {
      auto inner = [&](double u) {
        const double wq = bq.filter(u);
        if (wq == 0.0) return 0.0;
        auto along_p = [&](double w) {
          return bp.filter(w) * overlap_f(kind, cplx(u - bq.shift, w - bp.shift));
        };
        return wq * gaussian_expectation(along_p, p.sigma, spec);
      };
      fidelity += gaussian_expectation(inner, q.sigma, spec);
    }
  }
  return 1.0 - fidelity;
}

OptimizedScheme optimize_qubit_p(double sigma, double tol) {
  check_sigma(sigma);
  auto objective = [sigma](double a) { return run_qubit_p_scheme(sigma, a).var_p; };
  const ScalarMinimum best = minimize_scalar(objective, 0.2 / sigma, 8.0 / sigma, tol / sigma);
  OptimizedScheme out;
  out.alpha = best.argmin;
  out.noise = run_qubit_p_scheme(sigma, best.argmin);
  out.interior = best.interior;
  return out;
}

OptimizedScheme optimize_two_qubit(double sigma, double tol) {
  const OptimizedScheme p = optimize_qubit_p(sigma, tol);
  OptimizedScheme out;
  out.alpha = p.alpha;
  out.alpha_q = p.alpha;
  out.noise = run_two_qubit_scheme(sigma, out.alpha_q, out.alpha);
  out.interior = p.interior;
  return out;
}

OptimizedScheme optimize_squeezed(double sigma, double tol) {
  check_sigma(sigma);
  auto objective = [sigma, tol](double zeta) {
    const double sp = squeezed_sigma_p(sigma, zeta);
    const double var_p = optimize_qubit_p(sp, tol).noise.var_p;
    return 0.5 * squeezed_sigma_q(sigma, zeta) * squeezed_sigma_q(sigma, zeta) + var_p;
  };
  const ScalarMinimum best = minimize_scalar(objective, -0.5, 0.5, tol);
  OptimizedScheme out;
  out.zeta = best.argmin;
  const OptimizedScheme inner = optimize_qubit_p(squeezed_sigma_p(sigma, best.argmin), tol);
  out.alpha = inner.alpha;
  out.noise = run_squeezed_scheme(sigma, out.alpha, out.zeta);
  out.interior = best.interior && inner.interior;
  return out;
}

OptimizedScheme optimize_qudit(double sigma, int d, FourierBasis basis, double tol) {
  check_sigma(sigma);
  auto objective = [=](double a) { return run_qudit_scheme(sigma, a, d, basis).var_p; };
  const ScalarMinimum best = minimize_scalar(objective, 0.2 / sigma, 8.0 / sigma, tol / sigma);
  OptimizedScheme out;
  out.alpha = best.argmin;
  out.noise = run_qudit_scheme(sigma, best.argmin, d, basis);
  out.interior = best.interior;
  return out;
}

}  // namespace cvqec
