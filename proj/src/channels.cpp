#include "cvqec/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cvqec/quadrature.hpp"

namespace cvqec {

cplx sample_displacement(const NoiseModel& noise, Rng& rng) {
  const double sd = noise.sigma() / std::sqrt(2.0);
  // Box-Muller: both normals from one pair of uniforms.
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {sd * radius * std::cos(angle), sd * radius * std::sin(angle)};
}

DensityMatrix apply_displacement_channel(const DensityMatrix& rho, const NoiseModel& noise,
                                         int nodes, double leakage_budget) {
  const int n_trunc = rho.dim() - 1;
  const auto& rule = gauss_hermite_rule(nodes);
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  // D(bq + i bp) = exp(i bq bp) D(bq) D(i bp); the phase cancels under conjugation,
  // so the 2-D average factorizes into two 1-D averages.
  auto average = [&](const CMatrix& in, bool imaginary_axis) {
    CMatrix out = CMatrix::Zero(in.rows(), in.cols());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double w = rule.weights[i] * norm;
      if (w < 1e-18) continue;
      const double b = noise.sigma() * rule.nodes[i];
      const cplx beta = imaginary_axis ? cplx(0.0, b) : cplx(b, 0.0);
      const CMatrix d = displacement_operator(beta, n_trunc).matrix;
      out.noalias() += w * (d * in * d.adjoint());
    }
    return out;
  };
  CMatrix out = average(average(rho.matrix(), true), false);
  out = 0.5 * (out + out.adjoint());
  DensityMatrix result(out, 1e-8);
  if (result.leakage() > leakage_budget) {
    throw TruncationError("apply_displacement_channel: truncation leakage above budget");
  }
  return result;
}

DensityMatrix dephasing(const DensityMatrix& rho, double p_phi) {
  if (rho.dim() != 2) throw std::invalid_argument("dephasing: expects a qubit state");
  if (!(p_phi >= 0.0 && p_phi <= 0.5)) throw std::domain_error("dephasing: p_phi must lie in [0, 1/2]");
  CMatrix out = rho.matrix();
  out(0, 1) *= (1.0 - 2.0 * p_phi);
  out(1, 0) *= (1.0 - 2.0 * p_phi);
  return DensityMatrix(out);
}

std::vector<CMatrix> confinement_kraus(int n_trunc) {
  if (n_trunc < 1) throw std::invalid_argument("confinement_kraus: n_trunc must be >= 1");
  const int dim = n_trunc + 1;
  std::vector<CMatrix> kraus;
  CMatrix keep = CMatrix::Zero(2, dim);
  keep(0, 0) = 1.0;
  keep(1, 1) = 1.0;
  kraus.push_back(std::move(keep));
  for (int n = 2; n < dim; ++n) {
    CMatrix k = CMatrix::Zero(2, dim);
    k(1, n) = 1.0;
    kraus.push_back(std::move(k));
  }
  return kraus;
}

DensityMatrix confine_single_boson(const DensityMatrix& rho_mode) {
  if (rho_mode.dim() < 9) throw std::invalid_argument("confine_single_boson: needs n_trunc >= 8");
  const CMatrix& rho = rho_mode.matrix();
  CMatrix out = CMatrix::Zero(2, 2);
  for (const auto& k : confinement_kraus(rho_mode.dim() - 1)) out += k * rho * k.adjoint();
  return DensityMatrix(out, 1e-9);
}

std::vector<Eigen::Matrix2cd> displaced_confinement_kraus(cplx gamma, int n_trunc) {
  if (n_trunc < 8) throw std::invalid_argument("displaced_confinement_kraus: needs n_trunc >= 8");
  CMatrix cols = CMatrix::Zero(n_trunc + 1, 2);
  cols(0, 0) = 1.0;
  cols(1, 1) = 1.0;
  apply_displacement(cols, gamma);
  std::vector<Eigen::Matrix2cd> kraus;
  kraus.reserve(n_trunc);
  kraus.emplace_back(cols.topRows(2));
  for (int n = 2; n <= n_trunc; ++n) {
    Eigen::Matrix2cd k = Eigen::Matrix2cd::Zero();
    k(1, 0) = cols(n, 0);
    k(1, 1) = cols(n, 1);
    kraus.push_back(k);
  }
  return kraus;
}

CMatrix choi_matrix(const std::function<CMatrix(const CMatrix&)>& channel, int dim_in) {
  CMatrix unit = CMatrix::Zero(dim_in, dim_in);
  unit(0, 0) = 1.0;
  const Eigen::Index dim_out = channel(unit).rows();
  CMatrix choi = CMatrix::Zero(dim_in * dim_out, dim_in * dim_out);
  for (int i = 0; i < dim_in; ++i) {
    for (int j = 0; j < dim_in; ++j) {
      CMatrix e = CMatrix::Zero(dim_in, dim_in);
      e(i, j) = 1.0;
      choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = channel(e);
    }
  }
  return choi;
}

}  // namespace cvqec
