#pragma once

#include <vector>

#include "cvqec/quadrature.hpp"

namespace cvqec {

// Moments of the displacement distribution conditioned on one ancilla outcome.
// `mean` and `second_moment` are conditional on the outcome; `variance` is the
// spread left after shifting back by `mean`.
struct FilteredMoments {
  double outcome_prob = 0.0;
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

enum class YOutcome { plus, minus };

// Outcome likelihood of the qubit Y measurement after a p-displacement beta:
// (1 +- sin(4 alpha beta)) / 2.
double qubit_filter(double beta, double alpha, YOutcome outcome);

// Closed form: prob 1/2, mean +-2 alpha sigma^2 exp(-4 alpha^2 sigma^2),
// second moment sigma^2/2.
FilteredMoments qubit_filtered_moments(double sigma, double alpha, YOutcome outcome);

// Phase convention of the qudit readout basis |+_l> = sum_k exp(-2 pi i k (l + offset) / d) |g_k>.
// `standard` (offset 0) reproduces the printed filter sin^2(d a b + l pi) / (d^2 sin^2(a b + l pi / d)).
// `half_shifted` (offset 1/2) reduces to the +-Y qubit measurement at d = 2.
enum class FourierBasis { standard, half_shifted };

double basis_offset(FourierBasis basis) noexcept;

// Fejer-kernel outcome likelihood sin^2(d x) / (d^2 sin^2 x), x = alpha beta + (l + offset) pi / d.
// Removable singularities return their limit 1 (series branch below |sin x| < 1e-6).
double qudit_filter(double beta, double alpha, int d, int l,
                    FourierBasis basis = FourierBasis::standard);

// Exact moments from the trigonometric expansion of the kernel,
// (1/d^2) sum_{|m|<d} (d - |m|) cos(2 m x), against the Gaussian.
FilteredMoments qudit_filtered_moments(double sigma, double alpha, int d, int l,
                                       FourierBasis basis = FourierBasis::standard);

// Same moments by direct quadrature of G(beta) * filter(beta); independent of
// the closed-form route above.
FilteredMoments qudit_filtered_moments_quadrature(double sigma, double alpha, int d, int l,
                                                  FourierBasis basis = FourierBasis::standard,
                                                  const QuadratureSpec& spec = {});

// sum_l prob_l * variance_l.
double average_corrected_variance(const std::vector<FilteredMoments>& outcomes);

}  // namespace cvqec
