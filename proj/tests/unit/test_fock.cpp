#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "cvqec/fock.hpp"

using namespace cvqec;

namespace {

double unitarity_defect(const CMatrix& u, int keep) {
  const CMatrix prod = u.adjoint() * u;
  return (prod.topLeftCorner(keep, keep) - CMatrix::Identity(keep, keep)).cwiseAbs().maxCoeff();
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(PureState, NormalizesAndRejectsZero) {
  CVector v(3);
  v << 3.0, 0.0, 4.0;
  PureState s(v);
  EXPECT_NEAR(s.amplitudes().norm(), 1.0, 1e-15);
  EXPECT_THROW(PureState(CVector::Zero(4)), std::invalid_argument);
}

TEST(DensityMatrix, Validation) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  EXPECT_NO_THROW(DensityMatrix{m});
  m(0, 1) = 0.2;
  EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
  m(1, 0) = 0.2;
  m(0, 0) = 0.7;
  EXPECT_THROW(DensityMatrix{m}, std::invalid_argument);
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{neg}, std::invalid_argument);
}

TEST(CoherentState, PoissonAmplitudes) {
  const cplx a(0.6, -0.3);
  const auto s = coherent_state(a, 30);
  double fact = 1;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact *= n;
    const cplx expect = std::exp(-std::norm(a) / 2) * std::pow(a, n) / std::sqrt(fact);
    EXPECT_NEAR(std::abs(s.amplitudes()(n) - expect), 0.0, 1e-14);
  }
  EXPECT_LT(s.leakage(), kDefaultLeakageBudget);
  EXPECT_THROW(coherent_state(3.0, 10), TruncationError);
}

TEST(Displacement, ZeroIsIdentity) {
  const auto d = displacement_operator(0.0, 20);
  EXPECT_LT(max_abs(d.matrix - CMatrix::Identity(21, 21)), 1e-15);
}

TEST(Displacement, VacuumOverlap) {
  const cplx b(0.3, 0.2);
  const auto d = displacement_operator(b, 30);
  EXPECT_NEAR(std::abs(d.matrix(0, 0) - std::exp(-std::norm(b) / 2)), 0.0, 1e-10);
}

TEST(Displacement, InverseOnLowerLevels) {
  const int n = 30;
  const CMatrix p = displacement_operator(0.5, n).matrix * displacement_operator(-0.5, n).matrix;
  EXPECT_LT(max_abs(p.topLeftCorner(n / 2 + 1, n / 2 + 1) - CMatrix::Identity(n / 2 + 1, n / 2 + 1)), 1e-8);
}

TEST(Displacement, ActsAsCoherentStateGenerator) {
  const cplx b(-0.4, 0.9);
  const int n = 40;
  const CVector col = displacement_operator(b, n).matrix.col(0);
  const CVector exact = coherent_state(b, n).amplitudes();
  EXPECT_LT((col - exact).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Displacement, CompositionPhase) {
  const cplx x(0.3, 0.1), y(-0.2, 0.4);
  const int n = 40;
  const CMatrix lhs = displacement_operator(x, n).matrix * displacement_operator(y, n).matrix;
  const CMatrix rhs = displacement_composition_phase(x, y) * displacement_operator(x + y, n).matrix;
  EXPECT_LT(max_abs((lhs - rhs).topLeftCorner(15, 15)), 1e-9);
}

TEST(Displacement, TruncationGuard) { EXPECT_THROW(displacement_operator(3.0, 20), TruncationError); }

TEST(Displacement, ApplyMatchesDenseOperator) {
  const int n = 50;
  CMatrix cols = CMatrix::Zero(n + 1, 3);
  cols(0, 0) = 1;
  cols(1, 1) = 1;
  cols(4, 2) = cplx(0.6, 0.8);
  const cplx b(0.7, -1.1);
  CMatrix expect = displacement_operator(b, n).matrix * cols;
  apply_displacement(cols, b);
  EXPECT_LT(max_abs(cols - expect), 1e-12);
}

TEST(Squeeze, ZeroIsIdentity) {
  EXPECT_LT(max_abs(squeeze_operator(0.0, 20).matrix - CMatrix::Identity(21, 21)), 1e-15);
}

TEST(Squeeze, InverseOnLowerLevels) {
  const int n = 40;
  const CMatrix p = squeeze_operator(0.1, n).matrix * squeeze_operator(-0.1, n).matrix;
  EXPECT_LT(max_abs(p.topLeftCorner(21, 21) - CMatrix::Identity(21, 21)), 1e-8);
}

TEST(Squeeze, QuadratureVariance) {
  const int n = 60;
  const double z = 0.05;
  const CVector psi = squeeze_operator(z, n).matrix.col(0);
  const CMatrix a = annihilation(n);
  const CMatrix q = (a + a.adjoint()) / std::sqrt(2.0);
  const cplx mean = psi.dot(q * psi);
  const cplx second = psi.dot(q * q * psi);
  EXPECT_NEAR(second.real() - std::norm(mean), std::exp(-4 * z) / 2, 1e-6);
}

TEST(Squeeze, ConjugatedDisplacementRescalesQuadratures) {
  // S(-z) D(b) S(z) = D(b_q e^{2z} + i b_p e^{-2z}).
  const int n = 60;
  const double z = -0.0573;
  const cplx b(0.3, 0.2);
  const CMatrix lhs = squeeze_operator(-z, n).matrix * displacement_operator(b, n).matrix * squeeze_operator(z, n).matrix;
  const CMatrix rhs = displacement_operator(cplx(b.real() * std::exp(2 * z), b.imag() * std::exp(-2 * z)), n).matrix;
  EXPECT_LT(max_abs((lhs - rhs).topLeftCorner(10, 10)), 1e-8);
}

TEST(Squeeze, RejectsLargeParameter) { EXPECT_THROW(squeeze_operator(1.0, 10), std::domain_error); }

TEST(Unitarity, AllConstructors) {
  const int n = 40;
  EXPECT_LT(unitarity_defect(displacement_operator(cplx(0.8, -0.5), n).matrix, 21), 1e-8);
  EXPECT_LT(unitarity_defect(squeeze_operator(0.2, n).matrix, 21), 1e-8);
  const auto cd = conditional_displacement(2, 0.7, n);
  const int dim = static_cast<int>(cd.matrix.rows());
  const CMatrix prod = cd.matrix.adjoint() * cd.matrix;
  for (int block = 0; block < 2; ++block) {
    const int off = block * (n + 1);
    EXPECT_LT(max_abs(prod.block(off, off, 21, 21) - CMatrix::Identity(21, 21)), 1e-8);
  }
  EXPECT_EQ(dim, 2 * (n + 1));
}

TEST(ConditionalDisplacement, ZeroIsIdentity) {
  const auto cd = conditional_displacement(2, 0.0, 15);
  EXPECT_LT(max_abs(cd.matrix - CMatrix::Identity(32, 32)), 1e-15);
}

TEST(ConditionalDisplacement, InverseOnLowerLevels) {
  const int n = 30;
  const CMatrix p = conditional_displacement(2, 0.5, n).matrix * conditional_displacement(2, -0.5, n).matrix;
  for (int block = 0; block < 2; ++block) {
    const int off = block * (n + 1);
    EXPECT_LT(max_abs(p.block(off, off, 16, 16) - CMatrix::Identity(16, 16)), 1e-8);
  }
}

TEST(ConditionalDisplacement, PlusInputGivesCoherentMixture) {
  const int n = 40;
  CVector in = CVector::Zero(2 * (n + 1));
  in(0) = in(n + 1) = 1 / std::sqrt(2.0);
  const CVector out = conditional_displacement(2, 1.0, n).matrix * in;
  const CVector g = out.head(n + 1), e = out.tail(n + 1);
  EXPECT_LT((g * std::sqrt(2.0) - coherent_state(-1.0, n).amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((e * std::sqrt(2.0) - coherent_state(1.0, n).amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
  double nbar = 0;
  for (int k = 0; k <= n; ++k) nbar += k * (std::norm(g(k)) + std::norm(e(k)));
  EXPECT_NEAR(nbar, 1.0, 1e-8);
}

TEST(ConditionalDisplacement, QuditLevels) {
  const int n = 30, d = 3;
  const auto cd = conditional_displacement(d, 0.2, n);
  for (int k = 1; k <= d; ++k) {
    const CMatrix blk = cd.matrix.block((k - 1) * (n + 1), (k - 1) * (n + 1), n + 1, n + 1);
    EXPECT_LT(max_abs(blk - displacement_operator(0.2 * k, n).matrix), 1e-12);
  }
}

TEST(Fidelity, Basics) {
  const auto psi = coherent_state(cplx(0.2, 0.1), 20);
  EXPECT_NEAR(fidelity(psi, DensityMatrix::from_pure(psi.amplitudes())), 1.0, 1e-14);
  EXPECT_NEAR(fidelity(fock_state(0, 5), DensityMatrix::from_pure(fock_state(1, 5).amplitudes())), 0.0, 1e-15);
  EXPECT_THROW(fidelity(fock_state(0, 5), DensityMatrix::from_pure(fock_state(0, 6).amplitudes())),
               std::invalid_argument);
}

TEST(OverlapF, ClosedForms) {
  EXPECT_DOUBLE_EQ(overlap_f(StateKind::coherent, 0.0), 1.0);
  EXPECT_NEAR(overlap_f(StateKind::fock1, 1.0), 0.0, 1e-15);
  const cplx b(0.3, -0.4);
  EXPECT_NEAR(overlap_f(StateKind::coherent, b), std::exp(-0.25), 1e-15);
  EXPECT_NEAR(overlap_f(StateKind::fock1, b), std::exp(-0.25) * 0.75 * 0.75, 1e-15);
}

TEST(OverlapF, Curvature) {
  const double h = 1e-4;
  for (auto [kind, expect] : {std::pair{StateKind::coherent, -2.0}, std::pair{StateKind::fock1, -6.0}}) {
    for (cplx dir : {cplx(1, 0), cplx(0, 1)}) {
      const double fd = (overlap_f(kind, h * dir) - 2 * overlap_f(kind, 0.0) + overlap_f(kind, -h * dir)) / (h * h);
      EXPECT_NEAR(fd, expect, 1e-5);
    }
    EXPECT_DOUBLE_EQ(overlap_curvature(kind), expect);
  }
}

TEST(OverlapF, MatchesMatrixEngine) {
  const int n = 40;
  for (cplx b : {cplx(0.1, 0.0), cplx(0.5, -0.5), cplx(0.0, 1.0), cplx(-0.6, 0.7)}) {
    const CMatrix d = displacement_operator(b, n).matrix;
    for (cplx amp : {cplx(0.0), cplx(0.8, 0.3)}) {
      const CVector psi = coherent_state(amp, n).amplitudes();
      EXPECT_NEAR(std::norm(psi.dot(d * psi)), overlap_f(StateKind::coherent, b), 1e-7);
    }
    const CVector one = fock_state(1, n).amplitudes();
    EXPECT_NEAR(std::norm(one.dot(d * one)), overlap_f(StateKind::fock1, b), 1e-7);
  }
}

TEST(SelfOverlap, MatchesMatrixEngine) {
  const int n = 50;
  const cplx amp(0.7, -0.2);
  for (cplx x : {cplx(0.2, 0.3), cplx(-0.5, 0.1)}) {
    const CMatrix d = displacement_operator(x, n).matrix;
    const CVector c = coherent_state(amp, n).amplitudes();
    const CVector one = fock_state(1, n).amplitudes();
    EXPECT_NEAR(std::abs(c.dot(d * c) - displaced_self_overlap(StateKind::coherent, amp, x)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(one.dot(d * one) - displaced_self_overlap(StateKind::fock1, amp, x)), 0.0, 1e-10);

    const cplx y(0.1, -0.35);
    const CMatrix a = annihilation(n);
    const CMatrix dy = displacement_operator(y, n).matrix;
    EXPECT_NEAR(std::abs(c.dot(d.adjoint() * a * dy * c) - displaced_mean_field(StateKind::coherent, amp, x, y)), 0.0,
                1e-9);
    EXPECT_NEAR(std::abs(one.dot(d.adjoint() * a * dy * one) - displaced_mean_field(StateKind::fock1, amp, x, y)), 0.0,
                1e-9);
  }
}

TEST(OverlapF, AmplitudeInvariance) {
  // Fidelity under a fixed mixture of displacements does not depend on the coherent amplitude.
  const int n = 60;
  const cplx kicks[] = {cplx(0.1, 0.05), cplx(-0.12, 0.2), cplx(0.03, -0.08)};
  const double w[] = {0.5, 0.3, 0.2};
  double fid[2];
  int i = 0;
  for (cplx amp : {cplx(0.0), cplx(1.2, -0.7)}) {
    const CVector psi = coherent_state(amp, n).amplitudes();
    double f = 0;
    for (int k = 0; k < 3; ++k) f += w[k] * std::norm(psi.dot(displacement_operator(kicks[k], n).matrix * psi));
    fid[i++] = f;
  }
  EXPECT_LT(std::abs(fid[0] - fid[1]), 1e-8);
}
