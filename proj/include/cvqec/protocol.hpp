#pragma once

#include <functional>
#include <vector>

#include "cvqec/filtered_moments.hpp"
#include "cvqec/fock.hpp"
#include "cvqec/quadrature.hpp"

namespace cvqec {

enum class SchemeKind { qubit_p, two_qubit, squeezed_qubit, qudit };

struct ProtocolConfig {
  SchemeKind scheme = SchemeKind::qubit_p;
  double sigma = 0.1;
  // p-correcting conditional-displacement strength.
  double alpha = 0.0;
  // q-correcting strength (two_qubit only).
  double alpha_q = 0.0;
  // Squeezing parameter (squeezed_qubit only).
  double zeta = 0.0;
  // Qudit dimension and readout basis (qudit only).
  int d = 2;
  FourierBasis basis = FourierBasis::half_shifted;
  StateKind state_kind = StateKind::coherent;

  void validate() const;
};

// Residual displacement variances after correction.
struct CorrectedNoise {
  double var_q = 0.0;
  double var_p = 0.0;
  std::vector<FilteredMoments> per_outcome;

  double total() const noexcept { return var_q + var_p; }
};

// 1 / (2 sqrt(2) sigma).
double optimal_qubit_alpha(double sigma);

// (1/8) ln(1 - 1/e).
double optimal_squeezing();

// 40 |zeta| log10(e): squeezing in decibels under the q -> q exp(-2 zeta) scaling.
double squeezing_db(double zeta);

// Per-quadrature noise width after S(-zeta) D(beta) S(zeta): q scales by exp(2 zeta),
// p by exp(-2 zeta).
double squeezed_sigma_q(double sigma, double zeta);
double squeezed_sigma_p(double sigma, double zeta);

// Mean shift applied after a +Y outcome (negated for -Y): 2 alpha s^2 exp(-4 alpha^2 s^2).
double qubit_correction_shift(double sigma_p, double alpha);

CorrectedNoise run_qubit_p_scheme(double sigma, double alpha);
CorrectedNoise run_two_qubit_scheme(double sigma, double alpha_q, double alpha_p);
CorrectedNoise run_squeezed_scheme(double sigma, double alpha, double zeta);
CorrectedNoise run_qudit_scheme(double sigma, double alpha, int d,
                                FourierBasis basis = FourierBasis::half_shifted);
CorrectedNoise run_scheme(const ProtocolConfig& config);

// sigma^2 s^2 / (4 d).
double qudit_bound(double sigma, double s, int d);

// Second-order expansion 1 - F with F = 1 + (f''_q var_q + f''_p var_p) / 2.
double infidelity_from_noise(StateKind kind, const CorrectedNoise& noise);

// The expansion is trusted while both variances stay <= 0.05.
bool small_noise_regime(const CorrectedNoise& noise);

// One quadrature's outcome-resolved displacement distribution. Outcome l has
// corrected density G(b + shift_l) * filter_l(b + shift_l) / prob_l.
struct QuadratureDistribution {
  struct Branch {
    double prob = 1.0;
    double shift = 0.0;
    std::function<double(double)> filter;
  };
  double sigma = 0.0;
  std::vector<Branch> branches;
};

QuadratureDistribution uncorrected_distribution(double sigma);
QuadratureDistribution qubit_corrected_distribution(double sigma, double alpha);
QuadratureDistribution qudit_corrected_distribution(double sigma, double alpha, int d,
                                                    FourierBasis basis = FourierBasis::half_shifted);

struct CorrectedDistributions {
  QuadratureDistribution q;
  QuadratureDistribution p;
};

CorrectedDistributions corrected_distributions(const ProtocolConfig& config);

// 1 - sum_{lq, lp} prob * E[f(psi, beta)] over the corrected distributions, by
// tensor-product quadrature; no small-noise assumption.
double exact_infidelity(StateKind kind, const QuadratureDistribution& q,
                        const QuadratureDistribution& p, const QuadratureSpec& spec = {});

// Parameter optimization for each scheme.
struct OptimizedScheme {
  double alpha = 0.0;
  double alpha_q = 0.0;
  double zeta = 0.0;
  CorrectedNoise noise;
  bool interior = true;
};

OptimizedScheme optimize_qubit_p(double sigma, double tol = 1e-9);
OptimizedScheme optimize_two_qubit(double sigma, double tol = 1e-9);
// Nested: zeta by golden section, alpha re-optimized at every zeta.
OptimizedScheme optimize_squeezed(double sigma, double tol = 1e-9);
// alpha searched on [0.2/sigma, 8/sigma].
OptimizedScheme optimize_qudit(double sigma, int d, FourierBasis basis = FourierBasis::half_shifted,
                               double tol = 1e-9);

}  // namespace cvqec
