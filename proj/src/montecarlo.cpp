#include "cvqec/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "cvqec/channels.hpp"
#include "cvqec/gaussian.hpp"

namespace cvqec {

namespace {

constexpr std::uint64_t kDataStream = 0x6461746100000000ULL;
constexpr std::uint64_t kAncillaStream = 0x616e63696c6c6100ULL;
constexpr std::uint64_t kRecoveryStream = 0x7265636f76657200ULL;
constexpr std::uint64_t kMeasureStream = 0x6d65617375726500ULL;

Rng stream(std::uint64_t root, std::uint64_t salt, std::int64_t index) {
  return derive_stream(root ^ salt, static_cast<std::uint64_t>(index));
}

std::shared_ptr<const CodeSpec> code_for(const TrajectoryPlan& plan) {
  switch (plan.ancilla) {
    case AncillaKind::perfect:
    case AncillaKind::bare_qubit:
      return make_unencoded_qubit();
    case AncillaKind::three_qubit:
      return make_three_qubit_phase();
    case AncillaKind::binomial:
      return make_binomial_n3(plan.ancilla_n_trunc);
    case AncillaKind::shor:
      return make_shor9();
  }
  throw std::invalid_argument("unknown ancilla kind");
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

// Samples one Kraus operator acting on qubit `k` of the carrier register and
// applies it, renormalizing the joint state.
void sample_qubit_kraus(JointState& state, int k, const std::vector<Eigen::Matrix2cd>& kraus, Rng& rng) {
  const CMatrix w = state.whitened();
  const Eigen::Index bit = Eigen::Index{1} << k;
  Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
  for (Eigen::Index c = 0; c < w.rows(); ++c) {
    if (c & bit) continue;
    const auto r0 = w.row(c);
    const auto r1 = w.row(c | bit);
    rho(0, 0) += r0.squaredNorm();
    rho(1, 1) += r1.squaredNorm();
    rho(0, 1) += r1.dot(r0);
  }
  rho(1, 0) = std::conj(rho(0, 1));
  std::vector<double> weights(kraus.size());
  double total = 0.0;
  for (std::size_t j = 0; j < kraus.size(); ++j) {
    weights[j] = std::max(0.0, (kraus[j] * rho * kraus[j].adjoint()).trace().real());
    total += weights[j];
  }
  double target = uniform01(rng) * total;
  std::size_t chosen = 0;
  for (std::size_t j = 0; j < kraus.size(); ++j) {
    if (weights[j] <= 0.0) continue;
    chosen = j;
    if (target < weights[j]) break;
    target -= weights[j];
  }
  const Eigen::Matrix2cd& kj = kraus[chosen];
  CMatrix& v = state.carrier;
  for (Eigen::Index c = 0; c < v.rows(); ++c) {
    if (c & bit) continue;
    const Eigen::RowVectorXcd v0 = v.row(c);
    const Eigen::RowVectorXcd v1 = v.row(c | bit);
    v.row(c) = kj(0, 0) * v0 + kj(0, 1) * v1;
    v.row(c | bit) = kj(1, 0) * v0 + kj(1, 1) * v1;
  }
  state.normalize();
}

// Terms of the branch representation: carrier vectors paired with D(delta)|psi>.
struct Branches {
  CMatrix v;
  std::vector<cplx> delta;
};

void merge_into(Branches& out, const CVector& v, cplx delta) {
  if (v.squaredNorm() == 0.0) return;
  for (std::size_t t = 0; t < out.delta.size(); ++t) {
    if (std::abs(out.delta[t] - delta) < 1e-13) {
      out.v.col(static_cast<Eigen::Index>(t)) += v;
      return;
    }
  }
  out.v.conservativeResize(v.size(), out.v.cols() + 1);
  out.v.col(out.v.cols() - 1) = v;
  out.delta.push_back(delta);
}

// Logical conditional displacement on the branch terms.
Branches conditional_split(const Branches& in, const CodeSpec& code, cplx on_g, cplx on_e) {
  const CVector& g = code.logical_g();
  const CVector& e = code.logical_e();
  Branches out;
  out.v.resize(in.v.rows(), 0);
  for (std::size_t t = 0; t < in.delta.size(); ++t) {
    const CVector v = in.v.col(static_cast<Eigen::Index>(t));
    const cplx dt = in.delta[t];
    const CVector vg = g * g.dot(v);
    const CVector ve = e * e.dot(v);
    const CVector rest = v - vg - ve;
    merge_into(out, vg * displacement_composition_phase(on_g, dt), on_g + dt);
    merge_into(out, ve * displacement_composition_phase(on_e, dt), on_e + dt);
    if (rest.squaredNorm() > 1e-30 * v.squaredNorm()) merge_into(out, rest, dt);
  }
  return out;
}

void displace_all(Branches& b, cplx beta) {
  for (std::size_t t = 0; t < b.delta.size(); ++t) {
    b.v.col(static_cast<Eigen::Index>(t)) *= displacement_composition_phase(beta, b.delta[t]);
    b.delta[t] += beta;
  }
}

// F with F F^dag = G^T for G_tu = <psi|D(delta_t)^dag D(delta_u)|psi>.
CMatrix gram_frame(const std::vector<cplx>& delta, StateKind kind, cplx amplitude) {
  const Eigen::Index r = static_cast<Eigen::Index>(delta.size());
  CMatrix gt(r, r);
  for (Eigen::Index t = 0; t < r; ++t) {
    for (Eigen::Index u = 0; u < r; ++u) {
      const cplx g = displacement_composition_phase(-delta[t], delta[u]) *
                     displaced_self_overlap(kind, amplitude, delta[u] - delta[t]);
      gt(u, t) = g;
    }
  }
  Eigen::LLT<CMatrix> llt(gt);
  if (llt.info() != Eigen::Success) throw NumericalError("branch engine: data Gram matrix is not positive definite");
  return llt.matrixL();
}

int auto_truncation(double alpha, cplx amplitude, StateKind kind) {
  const double x = 2.0 * alpha + std::abs(amplitude) + (kind == StateKind::fock1 ? 1.5 : 0.0) + 0.5;
  return static_cast<int>(std::ceil(1.15 * (x * x + 8.0 * x + 20.0)));
}

}  // namespace

const char* ancilla_kind_string(AncillaKind kind) noexcept {
  switch (kind) {
    case AncillaKind::perfect:
      return "perfect";
    case AncillaKind::bare_qubit:
      return "bare_qubit";
    case AncillaKind::three_qubit:
      return "three_qubit";
    case AncillaKind::binomial:
      return "binomial";
    case AncillaKind::shor:
      return "shor";
  }
  return "unknown";
}

void TrajectoryPlan::validate() const {
  protocol.validate();
  if (protocol.scheme != SchemeKind::qubit_p && protocol.scheme != SchemeKind::squeezed_qubit) {
    throw std::invalid_argument("trajectory plans support the qubit_p and squeezed_qubit schemes");
  }
  if (n_trajectories < 1) throw std::invalid_argument("n_trajectories must be >= 1");
  if (!(p_phi >= 0.0 && p_phi <= 0.5)) throw std::domain_error("p_phi must lie in [0, 1/2]");
  if (data_n_trunc < 0) throw std::invalid_argument("data_n_trunc must be >= 0");
  if (ancilla == AncillaKind::binomial && ancilla_n_trunc < 29) {
    throw std::invalid_argument("binomial ancilla needs ancilla_n_trunc >= 29");
  }
}

struct TrajectoryEngine::DirectOperators {
  CMatrix cd_g_t, cd_e_t;      // transposed D(-alpha), D(alpha)
  CMatrix squeeze_t, unsqueeze_t;
  CMatrix corr_plus_t, corr_minus_t;
  CVector psi;
};

TrajectoryEngine::TrajectoryEngine(const TrajectoryPlan& plan, bool with_direct) : plan_(plan) {
  plan_.validate();
  code_ = code_for(plan_);
  const double sigma = plan_.protocol.sigma;
  zeta_ = plan_.protocol.scheme == SchemeKind::squeezed_qubit ? plan_.protocol.zeta : 0.0;
  const double sigma_p = squeezed_sigma_p(sigma, zeta_);
  alpha_ = plan_.protocol.alpha > 0.0 ? plan_.protocol.alpha : optimal_qubit_alpha(sigma_p);
  shift_ = qubit_correction_shift(sigma_p, alpha_);
  n_trunc_ = plan_.data_n_trunc > 0 ? plan_.data_n_trunc
                                    : auto_truncation(alpha_, plan_.amplitude, plan_.protocol.state_kind);
  if (!with_direct) return;
  auto ops = std::make_shared<DirectOperators>();
  ops->cd_g_t = displacement_operator(-alpha_, n_trunc_).matrix.transpose();
  ops->cd_e_t = displacement_operator(alpha_, n_trunc_).matrix.transpose();
  if (zeta_ != 0.0) {
    ops->squeeze_t = squeeze_operator(zeta_, n_trunc_).matrix.transpose();
    ops->unsqueeze_t = squeeze_operator(-zeta_, n_trunc_).matrix.transpose();
  }
  ops->corr_plus_t = displacement_operator(cplx(0.0, -shift_), n_trunc_).matrix.transpose();
  ops->corr_minus_t = displacement_operator(cplx(0.0, shift_), n_trunc_).matrix.transpose();
  ops->psi = make_state(plan_.protocol.state_kind, plan_.amplitude, n_trunc_).amplitudes();
  direct_ = std::move(ops);
}

cplx TrajectoryEngine::effective_noise(cplx beta) const {
  return {beta.real() * std::exp(2.0 * zeta_), beta.imag() * std::exp(-2.0 * zeta_)};
}

void TrajectoryEngine::ancilla_noise(JointState& state, Rng& rng) const {
  const NoiseModel noise(plan_.protocol.sigma);
  switch (plan_.ancilla) {
    case AncillaKind::perfect:
      return;
    case AncillaKind::bare_qubit:
      if (uniform01(rng) < plan_.p_phi) state.carrier.row(1) *= -1.0;
      return;
    case AncillaKind::three_qubit:
      for (int k = 0; k < 3; ++k) {
        if (uniform01(rng) < plan_.p_phi) apply_pauli(state.carrier, {0, 1U << k});
      }
      return;
    case AncillaKind::binomial:
      apply_displacement(state.carrier, sample_displacement(noise, rng));
      state.normalize();
      return;
    case AncillaKind::shor:
      for (int k = 0; k < 9; ++k) {
        const auto kraus = displaced_confinement_kraus(sample_displacement(noise, rng));
        sample_qubit_kraus(state, k, kraus, rng);
      }
      return;
  }
}

TrajectoryOutcome TrajectoryEngine::direct(std::int64_t index) const {
  if (!direct_) throw std::logic_error("TrajectoryEngine: built without direct operators");
  const DirectOperators& ops = *direct_;
  const CVector& g = code_->logical_g();
  const CVector& e = code_->logical_e();
  Rng data_rng = stream(plan_.root_seed, kDataStream, index);
  Rng anc_rng = stream(plan_.root_seed, kAncillaStream, index);
  Rng rec_rng = stream(plan_.root_seed, kRecoveryStream, index);
  Rng meas_rng = stream(plan_.root_seed, kMeasureStream, index);

  // Rows index the carrier, columns the data Fock levels.
  JointState js;
  js.carrier = ((g + e) / std::sqrt(2.0)) * ops.psi.transpose();

  auto conditional = [&](const CMatrix& on_g_t, const CMatrix& on_e_t) {
    const Eigen::RowVectorXcd chi_g = g.adjoint() * js.carrier;
    const Eigen::RowVectorXcd chi_e = e.adjoint() * js.carrier;
    js.carrier += g * (chi_g * on_g_t - chi_g) + e * (chi_e * on_e_t - chi_e);
  };

  conditional(ops.cd_g_t, ops.cd_e_t);
  if (zeta_ != 0.0) js.carrier = js.carrier * ops.squeeze_t;
  const cplx beta = sample_displacement(NoiseModel(plan_.protocol.sigma), data_rng);
  {
    CMatrix t = js.carrier.transpose();
    apply_displacement(t, beta);
    js.carrier = t.transpose();
  }
  if (zeta_ != 0.0) js.carrier = js.carrier * ops.unsqueeze_t;
  ancilla_noise(js, anc_rng);
  const SyndromeResult syn = code_->recover_trajectory(js, rec_rng);
  conditional(ops.cd_e_t, ops.cd_g_t);

  const Eigen::Index top = static_cast<Eigen::Index>(std::floor(0.9 * (n_trunc_ + 1)));
  if (js.carrier.rightCols(js.carrier.cols() - top).squaredNorm() > kDefaultLeakageBudget) {
    throw TruncationError("direct engine: data-mode truncation leakage above budget");
  }

  const CVector yp = logical_y_state(*code_, LogicalOutcome::plus);
  const CVector ym = logical_y_state(*code_, LogicalOutcome::minus);
  Eigen::RowVectorXcd chi_p = yp.adjoint() * js.carrier;
  Eigen::RowVectorXcd chi_m = ym.adjoint() * js.carrier;
  const double pp = chi_p.squaredNorm();
  const double pm = chi_m.squaredNorm();
  const double total = js.carrier.squaredNorm();
  const double u = uniform01(meas_rng) * total;

  TrajectoryOutcome out;
  out.flagged_syndrome = syn.flagged;
  const cplx eff = effective_noise(beta);
  out.residual_q = eff.real();
  if (u < pp + pm) {
    const bool plus = u < pp;
    Eigen::RowVectorXcd chi = plus ? chi_p * ops.corr_plus_t : chi_m * ops.corr_minus_t;
    const cplx ov = ops.psi.dot(chi.transpose());
    out.fidelity = std::norm(ov) / chi.squaredNorm();
    out.y_outcome = plus ? 1 : -1;
    out.residual_p = eff.imag() - (plus ? shift_ : -shift_);
  } else {
    const CMatrix rest = js.carrier - yp * chi_p - ym * chi_m;
    out.fidelity = (rest * ops.psi.conjugate()).squaredNorm() / rest.squaredNorm();
    out.residual_p = eff.imag();
  }
  return out;
}

TrajectoryOutcome TrajectoryEngine::branch(std::int64_t index) const {
  const CVector& g = code_->logical_g();
  const CVector& e = code_->logical_e();
  const StateKind kind = plan_.protocol.state_kind;
  const cplx amp = plan_.amplitude;
  Rng data_rng = stream(plan_.root_seed, kDataStream, index);
  Rng anc_rng = stream(plan_.root_seed, kAncillaStream, index);
  Rng rec_rng = stream(plan_.root_seed, kRecoveryStream, index);
  Rng meas_rng = stream(plan_.root_seed, kMeasureStream, index);

  Branches b;
  b.v = (g + e) / std::sqrt(2.0);
  b.delta = {0.0};
  b = conditional_split(b, *code_, -alpha_, alpha_);
  const cplx beta = sample_displacement(NoiseModel(plan_.protocol.sigma), data_rng);
  const cplx eff = effective_noise(beta);
  displace_all(b, eff);

  JointState js{b.v, gram_frame(b.delta, kind, amp)};
  ancilla_noise(js, anc_rng);
  const SyndromeResult syn = code_->recover_trajectory(js, rec_rng);
  b.v = js.carrier;
  b = conditional_split(b, *code_, alpha_, -alpha_);

  const CMatrix frame = gram_frame(b.delta, kind, amp);
  const CVector yp = logical_y_state(*code_, LogicalOutcome::plus);
  const CVector ym = logical_y_state(*code_, LogicalOutcome::minus);
  const Eigen::RowVectorXcd cp = yp.adjoint() * b.v;
  const Eigen::RowVectorXcd cm = ym.adjoint() * b.v;
  const double pp = (cp * frame).squaredNorm();
  const double pm = (cm * frame).squaredNorm();
  const double total = (b.v * frame).squaredNorm();
  const double u = uniform01(meas_rng) * total;

  TrajectoryOutcome out;
  out.flagged_syndrome = syn.flagged;
  out.residual_q = eff.real();
  if (u < pp + pm) {
    const bool plus = u < pp;
    const Eigen::RowVectorXcd& c = plus ? cp : cm;
    const cplx kappa(0.0, plus ? -shift_ : shift_);
    cplx ov = 0.0;
    for (std::size_t t = 0; t < b.delta.size(); ++t) {
      ov += c(static_cast<Eigen::Index>(t)) * displacement_composition_phase(kappa, b.delta[t]) *
            displaced_self_overlap(kind, amp, kappa + b.delta[t]);
    }
    out.fidelity = std::norm(ov) / (plus ? pp : pm);
    out.y_outcome = plus ? 1 : -1;
    out.residual_p = eff.imag() - (plus ? shift_ : -shift_);
  } else {
    const CMatrix rest = b.v - yp * cp - ym * cm;
    CVector o(static_cast<Eigen::Index>(b.delta.size()));
    for (std::size_t t = 0; t < b.delta.size(); ++t) {
      o(static_cast<Eigen::Index>(t)) = displaced_self_overlap(kind, amp, b.delta[t]);
    }
    out.fidelity = (rest * o).squaredNorm() / (rest * frame).squaredNorm();
    out.residual_p = eff.imag();
  }
  return out;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CVQEC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

std::vector<TrajectoryOutcome> run_trajectories(std::int64_t n,
                                                const std::function<TrajectoryOutcome(std::int64_t)>& fn,
                                                int workers) {
  if (n < 0) throw std::invalid_argument("run_trajectories: n must be >= 0");
  std::vector<TrajectoryOutcome> results(static_cast<std::size_t>(n));
  if (workers <= 0) workers = worker_count();
  workers = static_cast<int>(std::min<std::int64_t>(workers, n));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  constexpr std::int64_t kChunk = 64;
  auto work = [&] {
    for (;;) {
      const std::int64_t start = next.fetch_add(kChunk);
      if (start >= n) return;
      const std::int64_t stop = std::min(n, start + kChunk);
      try {
        for (std::int64_t i = start; i < stop; ++i) results[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

EstimateWithError estimate(const std::vector<double>& samples) {
  EstimateWithError out;
  out.n = static_cast<std::int64_t>(samples.size());
  if (samples.empty()) return out;
  out.mean = pairwise_sum(samples.data(), samples.size()) / static_cast<double>(samples.size());
  if (samples.size() < 2) return out;
  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - out.mean) * (samples[i] - out.mean);
  const double var = pairwise_sum(dev.data(), dev.size()) / static_cast<double>(samples.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  return out;
}

RunResult summarize(const TrajectoryEngine& engine, const std::vector<TrajectoryOutcome>& outcomes) {
  std::vector<double> infid, vq, vp;
  infid.reserve(outcomes.size());
  vq.reserve(outcomes.size());
  vp.reserve(outcomes.size());
  RunResult r;
  for (const auto& o : outcomes) {
    infid.push_back(1.0 - o.fidelity);
    vq.push_back(o.residual_q * o.residual_q);
    vp.push_back(o.residual_p * o.residual_p);
    if (o.flagged_syndrome) ++r.flagged_syndromes;
    if (o.y_outcome == 0) ++r.flagged_measurements;
  }
  r.infidelity = estimate(infid);
  r.var_q = estimate(vq);
  r.var_p = estimate(vp);
  r.alpha = engine.alpha();
  r.correction_shift = engine.correction_shift();
  r.data_n_trunc = engine.data_n_trunc();
  return r;
}

RunResult run_concatenated(const TrajectoryPlan& plan) {
  const TrajectoryEngine engine(plan, true);
  return summarize(engine, run_trajectories(plan.n_trajectories, [&](std::int64_t i) { return engine.direct(i); }));
}

RunResult branch_decomposition_run(const TrajectoryPlan& plan) {
  const TrajectoryEngine engine(plan, false);
  return summarize(engine, run_trajectories(plan.n_trajectories, [&](std::int64_t i) { return engine.branch(i); }));
}

EstimateWithError three_qubit_flip_rate(double p_phi, std::int64_t n, std::uint64_t root_seed) {
  if (!(p_phi >= 0.0 && p_phi <= 0.5)) throw std::domain_error("p_phi must lie in [0, 1/2]");
  if (n < 1) throw std::invalid_argument("three_qubit_flip_rate: n must be >= 1");
  const auto code = make_three_qubit_phase();
  const CVector plus = (code->logical_g() + code->logical_e()) / std::sqrt(2.0);
  const CVector minus = (code->logical_g() - code->logical_e()) / std::sqrt(2.0);
  const auto outcomes = run_trajectories(n, [&](std::int64_t i) {
    Rng rng = derive_stream(root_seed, static_cast<std::uint64_t>(i));
    JointState js{plus, CMatrix()};
    for (int k = 0; k < 3; ++k) {
      if (uniform01(rng) < p_phi) apply_pauli(js.carrier, {0, 1U << k});
    }
    code->recover_trajectory(js, rng);
    TrajectoryOutcome o;
    o.fidelity = std::norm(minus.dot(js.carrier.col(0))) > 0.5 ? 1.0 : 0.0;
    return o;
  });
  std::vector<double> flips(outcomes.size());
  for (std::size_t i = 0; i < outcomes.size(); ++i) flips[i] = outcomes[i].fidelity;
  return estimate(flips);
}

}  // namespace cvqec
