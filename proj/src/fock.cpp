#include "cvqec/fock.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace cvqec {

namespace {

int top_band_start(int dim) { return dim - std::max(1, dim / 10); }

void check_trunc(int n_trunc, int minimum = 1) {
  if (n_trunc < minimum) {
    throw std::invalid_argument("n_trunc must be >= " + std::to_string(minimum));
  }
}

}  // namespace

PureState::PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double norm = amplitudes_.norm();
  if (amplitudes_.size() == 0 || !(norm > 0.0)) {
    throw std::invalid_argument("PureState: amplitude vector must be non-empty and non-zero");
  }
  amplitudes_ /= norm;
}

double PureState::leakage() const {
  const int start = top_band_start(dim());
  return amplitudes_.tail(dim() - start).squaredNorm();
}

DensityMatrix::DensityMatrix(CMatrix matrix, double tol) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace() - cplx(1.0)) > tol) {
    throw std::invalid_argument("DensityMatrix: trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const CVector& psi) {
  const CVector unit = psi / psi.norm();
  return DensityMatrix(unit * unit.adjoint());
}

double DensityMatrix::leakage() const {
  const int start = top_band_start(dim());
  double pop = 0.0;
  for (int n = start; n < dim(); ++n) pop += matrix_(n, n).real();
  return pop;
}

CMatrix annihilation(int n_trunc) {
  check_trunc(n_trunc);
  CMatrix a = CMatrix::Zero(n_trunc + 1, n_trunc + 1);
  for (int n = 1; n <= n_trunc; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

PureState fock_state(int n, int n_trunc) {
  check_trunc(n_trunc);
  if (n < 0 || n > n_trunc) throw std::invalid_argument("fock_state: level outside truncation");
  CVector v = CVector::Zero(n_trunc + 1);
  v(n) = 1.0;
  return PureState(std::move(v));
}

PureState coherent_state(cplx amplitude, int n_trunc, double leakage_budget) {
  check_trunc(n_trunc);
  CVector v(n_trunc + 1);
  v(0) = std::exp(-0.5 * std::norm(amplitude));
  for (int n = 1; n <= n_trunc; ++n) v(n) = v(n - 1) * amplitude / std::sqrt(static_cast<double>(n));
  // Population outside the trusted band, including whatever fell off the end.
  const int start = top_band_start(n_trunc + 1);
  const double kept = v.head(start).squaredNorm();
  if (1.0 - kept > leakage_budget) {
    throw TruncationError("coherent_state: truncation too small for amplitude");
  }
  return PureState(std::move(v));
}

LinearOperator displacement_operator(cplx beta, int n_trunc) {
  check_trunc(n_trunc, 2);
  if (std::norm(beta) > n_trunc / 4.0) {
    throw TruncationError("displacement_operator: |beta|^2 exceeds n_trunc/4");
  }
  const CMatrix a = annihilation(n_trunc);
  const CMatrix generator = beta * a.adjoint() - std::conj(beta) * a;
  return {generator.exp(), "D(" + std::to_string(beta.real()) + "," + std::to_string(beta.imag()) + ")"};
}

LinearOperator squeeze_operator(double zeta, int n_trunc) {
  check_trunc(n_trunc, 2);
  if (!(std::abs(zeta) < 1.0)) throw std::domain_error("squeeze_operator: |zeta| must be < 1");
  const CMatrix a = annihilation(n_trunc);
  const CMatrix a2 = a * a;
  const CMatrix generator = zeta * (a2 - a2.adjoint());
  return {generator.exp(), "S(" + std::to_string(zeta) + ")"};
}

LinearOperator conditional_displacement(int d, cplx alpha, int n_trunc) {
  if (d < 2) throw std::invalid_argument("conditional_displacement: d must be >= 2");
  const int dim = n_trunc + 1;
  CMatrix out = CMatrix::Zero(d * dim, d * dim);
  if (d == 2) {
    out.block(0, 0, dim, dim) = displacement_operator(-alpha, n_trunc).matrix;
    out.block(dim, dim, dim, dim) = displacement_operator(alpha, n_trunc).matrix;
  } else {
    for (int k = 1; k <= d; ++k) {
      out.block((k - 1) * dim, (k - 1) * dim, dim, dim) =
          displacement_operator(static_cast<double>(k) * alpha, n_trunc).matrix;
    }
  }
  return {std::move(out), "C_" + std::to_string(d)};
}

double fidelity(const PureState& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  const cplx value = a.amplitudes().dot(b.matrix() * a.amplitudes());
  return std::clamp(value.real(), 0.0, 1.0);
}

double overlap_f(StateKind kind, cplx beta) {
  const double r2 = std::norm(beta);
  switch (kind) {
    case StateKind::coherent:
      return std::exp(-r2);
    case StateKind::fock1:
      return std::exp(-r2) * (1.0 - r2) * (1.0 - r2);
  }
  return 0.0;
}

double overlap_curvature(StateKind kind) {
  return kind == StateKind::coherent ? -2.0 : -6.0;
}

cplx displaced_self_overlap(StateKind kind, cplx amplitude, cplx x) {
  const double r2 = std::norm(x);
  if (kind == StateKind::coherent) {
    return std::exp(-0.5 * r2 + (x * std::conj(amplitude) - std::conj(x) * amplitude));
  }
  return std::exp(-0.5 * r2) * (1.0 - r2);
}

cplx displaced_mean_field(StateKind kind, cplx amplitude, cplx x, cplx y) {
  // D(x)^dag a D(y) = D(-x) D(y) (a + y)
  const cplx z = y - x;
  const cplx phase = displacement_composition_phase(-x, y);
  if (kind == StateKind::coherent) {
    return phase * (amplitude + y) * displaced_self_overlap(kind, amplitude, z);
  }
  // a|1> = |0>, <1|D(z)|0> = z exp(-|z|^2 / 2)
  return phase * (z * std::exp(-0.5 * std::norm(z)) + y * displaced_self_overlap(kind, amplitude, z));
}

void apply_displacement(CMatrix& columns, cplx beta) {
  const Eigen::Index dim = columns.rows();
  if (dim < 2 || beta == cplx(0.0)) return;
  const double bound = 2.0 * std::abs(beta) * std::sqrt(static_cast<double>(dim));
  const int steps = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
  const cplx b = beta / static_cast<double>(steps);
  const cplx bc = std::conj(b);
  Eigen::VectorXd root(dim);
  for (Eigen::Index n = 0; n < dim; ++n) root(n) = std::sqrt(static_cast<double>(n));

  CMatrix term(dim, columns.cols());
  CMatrix next(dim, columns.cols());
  for (int s = 0; s < steps; ++s) {
    term = columns;
    for (int k = 1; k < 64; ++k) {
      // next = G term / k, G = b a^dag - b^* a
      for (Eigen::Index n = 0; n < dim; ++n) {
        next.row(n).setZero();
        if (n > 0) next.row(n) += (b * root(n)) * term.row(n - 1);
        if (n + 1 < dim) next.row(n) -= (bc * root(n + 1)) * term.row(n + 1);
      }
      next /= static_cast<double>(k);
      columns += next;
      term.swap(next);
      if (term.norm() <= 1e-17 * columns.norm()) break;
    }
  }
}

PureState make_state(StateKind kind, cplx amplitude, int n_trunc) {
  return kind == StateKind::coherent ? coherent_state(amplitude, n_trunc) : fock_state(1, n_trunc);
}

}  // namespace cvqec
