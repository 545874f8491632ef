#pragma once

#include <functional>
#include <vector>

#include "cvqec/common.hpp"
#include "cvqec/fock.hpp"
#include "cvqec/gaussian.hpp"

namespace cvqec {

// beta_q, beta_p i.i.d. zero-mean normal with variance sigma^2 / 2 each.
// Box-Muller on raw engine bits: the sequence is fixed by the seed alone.
cplx sample_displacement(const NoiseModel& noise, Rng& rng);

// Integral of P(beta) D(beta) rho D(beta)^dag by tensor-product Gauss-Hermite
// (`nodes` per quadrature). Throws TruncationError when the output's top-10%
// population exceeds `leakage_budget`.
DensityMatrix apply_displacement_channel(const DensityMatrix& rho, const NoiseModel& noise,
                                         int nodes = 64,
                                         double leakage_budget = kDefaultLeakageBudget);

// (1 - p) rho + p Z rho Z on a single qubit, p in [0, 1/2].
DensityMatrix dephasing(const DensityMatrix& rho, double p_phi);

// Kraus set of the single-boson confinement on levels 0..n_trunc:
// the {|0>,|1>} projector together with |1><n| for n >= 2.
std::vector<CMatrix> confinement_kraus(int n_trunc);

// Confines a mode state to the {|0>, |1>} qubit. Requires n_trunc >= 8.
DensityMatrix confine_single_boson(const DensityMatrix& rho_mode);

// Qubit-level Kraus operators of "displace by gamma, then confine": one 2x2
// operator per confinement branch, built from the truncated Fock engine.
std::vector<Eigen::Matrix2cd> displaced_confinement_kraus(cplx gamma, int n_trunc = 24);

// Choi matrix sum_ij |i><j| (x) E(|i><j|) of a linear map on dim_in x dim_in matrices.
CMatrix choi_matrix(const std::function<CMatrix(const CMatrix&)>& channel, int dim_in);

}  // namespace cvqec
