#pragma once

namespace cvqec {

// Random-displacement noise strength. `sigma` is the width parameter of
// G(x, sigma) = exp(-x^2 / sigma^2) / (sqrt(pi) sigma), so each quadrature of
// the displacement has variance sigma^2 / 2 (not sigma^2).
class NoiseModel {
 public:
  explicit NoiseModel(double sigma);

  double sigma() const noexcept { return sigma_; }
  double quadrature_variance() const noexcept { return 0.5 * sigma_ * sigma_; }

 private:
  double sigma_;
};

// exp(-x^2 / sigma^2) / (sqrt(pi) sigma). Throws std::domain_error for sigma <= 0.
double gaussian_pdf(double x, double sigma);

}  // namespace cvqec
