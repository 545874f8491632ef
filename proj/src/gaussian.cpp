#include "cvqec/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cvqec {

NoiseModel::NoiseModel(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::domain_error("NoiseModel: sigma must be positive and finite");
  }
}

double gaussian_pdf(double x, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("gaussian_pdf: sigma must be positive");
  const double u = x / sigma;
  return std::exp(-u * u) / (std::sqrt(std::numbers::pi) * sigma);
}

}  // namespace cvqec
