#pragma once

#include <string>

#include "cvqec/common.hpp"

namespace cvqec {

inline constexpr double kDefaultLeakageBudget = 1e-8;

// Normalized amplitude vector over Fock levels 0..n_trunc.
class PureState {
 public:
  // Normalizes; throws std::invalid_argument for an empty or zero vector.
  explicit PureState(CVector amplitudes);

  const CVector& amplitudes() const noexcept { return amplitudes_; }
  int n_trunc() const noexcept { return static_cast<int>(amplitudes_.size()) - 1; }
  int dim() const noexcept { return static_cast<int>(amplitudes_.size()); }

  // Population held in the top 10% of retained levels.
  double leakage() const;

 private:
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity and unit trace within `tol`, and eigenvalues >= -1e-9.
  explicit DensityMatrix(CMatrix matrix, double tol = 1e-10);
  static DensityMatrix from_pure(const CVector& psi);

  const CMatrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
  double leakage() const;

 private:
  CMatrix matrix_;
};

struct LinearOperator {
  CMatrix matrix;
  std::string label;
};

// Ladder operator a on levels 0..n_trunc.
CMatrix annihilation(int n_trunc);

PureState fock_state(int n, int n_trunc);

// Poissonian amplitudes built analytically. Throws TruncationError when the
// top-10% population exceeds `leakage_budget`.
PureState coherent_state(cplx amplitude, int n_trunc, double leakage_budget = kDefaultLeakageBudget);

// exp(beta a^dag - beta^* a) on the truncated space (dense scaling-and-squaring).
// Throws TruncationError when |beta|^2 > n_trunc / 4.
LinearOperator displacement_operator(cplx beta, int n_trunc);

// exp(zeta a^2 - zeta a^dag^2). Under this generator q -> q exp(-2 zeta).
// Throws std::domain_error for |zeta| >= 1.
LinearOperator squeeze_operator(double zeta, int n_trunc);

// d = 2: |g><g| (x) D(-alpha) + |e><e| (x) D(alpha).
// d > 2: sum_{k=1..d} |g_k><g_k| (x) D(k alpha).  Ancilla index is the major one.
LinearOperator conditional_displacement(int d, cplx alpha, int n_trunc);

// <a| rho |a>. Throws std::invalid_argument on dimension mismatch.
double fidelity(const PureState& a, const DensityMatrix& b);

enum class StateKind { coherent, fock1 };

// f(psi, beta) = |<psi|D(beta)|psi>|^2; for coherent states independent of amplitude.
double overlap_f(StateKind kind, cplx beta);

// d^2 f / d beta_q^2 at 0 (equal for beta_p): -2 coherent, -6 single boson.
double overlap_curvature(StateKind kind);

// <psi|D(x)|psi> for |psi> = |amplitude> (coherent) or |1> (fock1; amplitude ignored).
cplx displaced_self_overlap(StateKind kind, cplx amplitude, cplx x);

// <psi|D(x)^dag a D(y)|psi>, used to track the mean field of superpositions.
cplx displaced_mean_field(StateKind kind, cplx amplitude, cplx x, cplx y);

// D(x) D(y) = exp((x y^* - x^* y) / 2) D(x + y).
inline cplx displacement_composition_phase(cplx x, cplx y) {
  return std::exp(0.5 * (x * std::conj(y) - std::conj(x) * y));
}

// Applies the truncated-space displacement exp(beta a^dag - beta^* a) to every
// column of `columns` (Fock index along rows) by a substepped Taylor series of
// the tridiagonal generator. Agrees with displacement_operator to ~1e-14.
void apply_displacement(CMatrix& columns, cplx beta);

// Data-mode input: coherent |amplitude> or |1>, on levels 0..n_trunc.
PureState make_state(StateKind kind, cplx amplitude, int n_trunc);

}  // namespace cvqec
