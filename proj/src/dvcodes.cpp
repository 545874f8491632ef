#include "cvqec/dvcodes.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace cvqec {

namespace {

int popcount(std::uint32_t v) { return std::popcount(v); }

// Index drawn from unnormalized weights with a single uniform.
std::size_t pick(const std::vector<double>& weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = u * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    if (target < weights[i]) return i;
    target -= weights[i];
  }
  return last;
}

std::string pauli_label(const PauliString& p) {
  std::string out;
  for (int k = 0; k < 32; ++k) {
    const bool x = (p.x_mask >> k) & 1U;
    const bool z = (p.z_mask >> k) & 1U;
    if (!x && !z) continue;
    if (!out.empty()) out += ' ';
    out += x && z ? "Y" : (x ? "X" : "Z");
    out += std::to_string(k);
  }
  return out.empty() ? "I" : out;
}

CMatrix pair_columns(const CVector& a, const CVector& b) {
  CMatrix m(a.size(), 2);
  m.col(0) = a;
  m.col(1) = b;
  return m;
}

CVector pauli_image(const CVector& v, const PauliString& p) {
  CMatrix m = v;
  apply_pauli(m, p);
  return m.col(0);
}

// Gram-Schmidt of `v` against `basis`, twice for stability.
CVector orthogonalize(CVector v, const std::vector<CVector>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) v -= b * b.dot(v);
  }
  return v;
}

class UnencodedQubit final : public CodeSpec {
 public:
  UnencodedQubit() : CodeSpec(CodeName::unencoded, Carrier::qubits, CVector::Unit(2, 0), CVector::Unit(2, 1)) {
    RecoveryBranch id;
    id.label = "none";
    id.targets = pair_columns(logical_g(), logical_e());
    id.sources = id.targets;
    branches_.push_back(std::move(id));
  }
};

class BinomialCode final : public CodeSpec {
 public:
  explicit BinomialCode(int n_trunc) : CodeSpec(CodeName::binomial_n3, Carrier::single_mode, codeword(n_trunc, true),
                                                codeword(n_trunc, false)) {
    const CMatrix a = annihilation(n_trunc);
    const CMatrix ad = a.adjoint();
    const int dim = n_trunc + 1;
    struct ErrorClass {
      int residue;
      std::vector<std::pair<std::string, CMatrix>> errors;
    };
    const std::vector<ErrorClass> classes = {
        {0, {{"I", CMatrix::Identity(dim, dim)}}},
        {1, {{"a_dag", ad}}},
        {2, {{"a", a}}},
    };
    for (const auto& cls : classes) {
      CMatrix proj = CMatrix::Zero(dim, dim);
      for (int n = cls.residue; n < dim; n += 3) proj(n, n) = 1.0;
      std::vector<CVector> used_g, used_e, used_all;
      for (const auto& [label, op] : cls.errors) {
        CVector ug = orthogonalize(proj * op * logical_g(), used_g);
        CVector ue = orthogonalize(proj * op * logical_e(), used_e);
        if (ug.norm() < 1e-10 || ue.norm() < 1e-10) continue;
        ug.normalize();
        ue.normalize();
        used_g.push_back(ug);
        used_e.push_back(ue);
        RecoveryBranch br;
        br.syndrome = cls.residue;
        br.label = label;
        br.targets = pair_columns(logical_g(), logical_e());
        br.sources = pair_columns(ug, ue);
        branches_.push_back(std::move(br));
      }
      used_all = used_g;
      used_all.insert(used_all.end(), used_e.begin(), used_e.end());
      for (int n = cls.residue; n < dim; n += 3) {
        CVector c = orthogonalize(CVector::Unit(dim, n), used_all);
        if (c.norm() < 1e-8) continue;
        c.normalize();
        used_all.push_back(c);
        RecoveryBranch br;
        br.syndrome = cls.residue;
        br.label = "reset";
        br.flagged = true;
        br.targets = logical_g();
        br.sources = c;
        branches_.push_back(std::move(br));
      }
    }
  }

 private:
  static CVector codeword(int n_trunc, bool g) {
    if (n_trunc < 12) throw std::invalid_argument("binomial code needs n_trunc >= 12");
    CVector v = CVector::Zero(n_trunc + 1);
    if (g) {
      v(0) = 0.5;
      v(6) = 0.5 * std::sqrt(3.0);
    } else {
      v(3) = 0.5 * std::sqrt(3.0);
      v(9) = 0.5;
    }
    return v;
  }
};

CVector three_qubit_codeword(bool g) {
  CVector v(8);
  for (int c = 0; c < 8; ++c) {
    const bool odd = popcount(static_cast<std::uint32_t>(c)) % 2 == 1;
    v(c) = (odd != g) ? 0.5 : 0.0;
  }
  return v;
}

CVector shor_codeword(bool g) {
  CVector v = CVector::Zero(512);
  const double s = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < 512; ++c) {
    cplx amp = 1.0;
    for (int b = 0; b < 3; ++b) {
      const int m = (c >> (3 * b)) & 7;
      if (m == 0) {
        amp *= s;
      } else if (m == 7) {
        amp *= g ? s : -s;
      } else {
        amp = 0.0;
        break;
      }
    }
    v(c) = amp;
  }
  return v;
}

}  // namespace

const char* code_name_string(CodeName name) noexcept {
  switch (name) {
    case CodeName::unencoded:
      return "unencoded";
    case CodeName::three_qubit_phase:
      return "three_qubit_phase";
    case CodeName::shor9:
      return "shor9";
    case CodeName::binomial_n3:
      return "binomial_n3";
  }
  return "unknown";
}

void apply_pauli(CMatrix& amps, const PauliString& p) {
  if (p.x_mask == 0 && p.z_mask == 0) return;
  const Eigen::Index rows = amps.rows();
  if (p.z_mask != 0) {
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (popcount(static_cast<std::uint32_t>(c) & p.z_mask) % 2 == 1) amps.row(c) *= -1.0;
    }
  }
  if (p.x_mask != 0) {
    for (Eigen::Index c = 0; c < rows; ++c) {
      const Eigen::Index partner = static_cast<Eigen::Index>(static_cast<std::uint32_t>(c) ^ p.x_mask);
      if (partner >= rows) throw std::invalid_argument("apply_pauli: mask exceeds register");
      if (partner > c) amps.row(c).swap(amps.row(partner));
    }
  }
}

void JointState::normalize() {
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw NumericalError("JointState: zero norm");
  carrier /= std::sqrt(n2);
}

CodeSpec::CodeSpec(CodeName name, Carrier carrier, CVector g, CVector e)
    : name_(name), carrier_(carrier), g_(std::move(g)), e_(std::move(e)) {}

SyndromeResult CodeSpec::recover_trajectory(JointState& state, Rng& rng) const {
  const CMatrix w = state.whitened();
  std::vector<double> weights(branches_.size());
  for (std::size_t k = 0; k < branches_.size(); ++k) {
    weights[k] = (branches_[k].sources.adjoint() * w).squaredNorm();
  }
  const std::size_t k = pick(weights, uniform01(rng));
  const RecoveryBranch& br = branches_[k];
  state.carrier = br.apply(state.carrier);
  state.normalize();
  return {br.syndrome, br.label, br.flagged, 0.0};
}

StabilizerCode::StabilizerCode(CodeName name, Carrier carrier, int n_qubits, CVector g, CVector e,
                               std::vector<PauliString> stabilizers, std::vector<PauliString> table)
    : CodeSpec(name, carrier, std::move(g), std::move(e)),
      n_qubits_(n_qubits),
      stabilizers_(std::move(stabilizers)),
      table_(std::move(table)) {
  if (table_.size() != (std::size_t{1} << stabilizers_.size())) {
    throw std::invalid_argument("StabilizerCode: table must cover every syndrome");
  }
  for (std::size_t s = 0; s < table_.size(); ++s) {
    RecoveryBranch br;
    br.syndrome = static_cast<int>(s);
    br.label = pauli_label(table_[s]);
    br.targets = pair_columns(logical_g(), logical_e());
    br.sources = pair_columns(pauli_image(logical_g(), table_[s]), pauli_image(logical_e(), table_[s]));
    branches_.push_back(std::move(br));
  }
}

SyndromeResult StabilizerCode::recover_trajectory(JointState& state, Rng& rng) const {
  CMatrix w = state.whitened();
  int syndrome = 0;
  for (std::size_t k = 0; k < stabilizers_.size(); ++k) {
    CMatrix sw = w;
    apply_pauli(sw, stabilizers_[k]);
    const double p_plus = (0.5 * (w + sw)).squaredNorm();
    const double total = w.squaredNorm();
    const bool minus = uniform01(rng) * total >= p_plus;
    const double sign = minus ? -1.0 : 1.0;
    w = 0.5 * (w + sign * sw);
    if (state.frame.size() == 0) {
      state.carrier = w;
    } else {
      CMatrix sv = state.carrier;
      apply_pauli(sv, stabilizers_[k]);
      state.carrier = 0.5 * (state.carrier + sign * sv);
    }
    if (minus) syndrome |= 1 << k;
  }
  const PauliString& fix = table_[syndrome];
  apply_pauli(state.carrier, fix);
  state.normalize();
  return {syndrome, pauli_label(fix), false, 0.0};
}

std::shared_ptr<const CodeSpec> make_unencoded_qubit() { return std::make_shared<UnencodedQubit>(); }

std::shared_ptr<const CodeSpec> make_three_qubit_phase() {
  std::vector<PauliString> stabilizers = {{0b011, 0}, {0b110, 0}};
  // Syndrome word: bit 0 from X1X2, bit 1 from X2X3.
  std::vector<PauliString> table = {{0, 0}, {0, 0b001}, {0, 0b100}, {0, 0b010}};
  return std::make_shared<StabilizerCode>(CodeName::three_qubit_phase, Carrier::qubits, 3, three_qubit_codeword(true),
                                          three_qubit_codeword(false), std::move(stabilizers), std::move(table));
}

std::shared_ptr<const CodeSpec> make_shor9() {
  std::vector<PauliString> stabilizers;
  for (int b = 0; b < 3; ++b) {
    stabilizers.push_back({0, 0b011U << (3 * b)});
    stabilizers.push_back({0, 0b110U << (3 * b)});
  }
  stabilizers.push_back({0x03F, 0});
  stabilizers.push_back({0x1F8, 0});

  std::vector<PauliString> table(256);
  for (int s = 0; s < 256; ++s) {
    PauliString fix;
    for (int b = 0; b < 3; ++b) {
      const int c1 = (s >> (2 * b)) & 1;
      const int c2 = (s >> (2 * b + 1)) & 1;
      if (c1 && !c2) fix.x_mask |= 1U << (3 * b);
      if (c1 && c2) fix.x_mask |= 1U << (3 * b + 1);
      if (!c1 && c2) fix.x_mask |= 1U << (3 * b + 2);
    }
    const int x1 = (s >> 6) & 1;
    const int x2 = (s >> 7) & 1;
    if (x1 && !x2) fix.z_mask |= 1U << 0;
    if (x1 && x2) fix.z_mask |= 1U << 3;
    if (!x1 && x2) fix.z_mask |= 1U << 6;
    table[s] = fix;
  }
  return std::make_shared<StabilizerCode>(CodeName::shor9, Carrier::single_boson_modes, 9, shor_codeword(true),
                                          shor_codeword(false), std::move(stabilizers), std::move(table));
}

std::shared_ptr<const CodeSpec> make_binomial_n3(int n_trunc) { return std::make_shared<BinomialCode>(n_trunc); }

std::shared_ptr<const CodeSpec> make_code(CodeName name) {
  switch (name) {
    case CodeName::unencoded:
      return make_unencoded_qubit();
    case CodeName::three_qubit_phase:
      return make_three_qubit_phase();
    case CodeName::shor9:
      return make_shor9();
    case CodeName::binomial_n3:
      return make_binomial_n3();
  }
  throw std::invalid_argument("make_code: unknown code");
}

PureState encode(const CodeSpec& code, const CVector& logical) {
  if (logical.size() != 2) throw std::invalid_argument("encode: logical state must have two amplitudes");
  if (!(logical.norm() > 0.0)) throw std::invalid_argument("encode: zero logical state");
  const CVector v = logical.normalized();
  return PureState(v(0) * code.logical_g() + v(1) * code.logical_e());
}

std::pair<DensityMatrix, SyndromeResult> recover(const CodeSpec& code, const DensityMatrix& state) {
  if (state.dim() != code.dim()) throw std::invalid_argument("recover: state is not on the code carrier");
  const CMatrix& rho = state.matrix();
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  SyndromeResult result;
  result.applied_recovery = "averaged";
  for (const auto& br : code.recovery_branches()) {
    const CMatrix inner = br.sources.adjoint() * rho * br.sources;
    out.noalias() += br.targets * inner * br.targets.adjoint();
    if (br.flagged) result.flagged_probability += inner.trace().real();
  }
  out = 0.5 * (out + out.adjoint());
  return {DensityMatrix(out, 1e-8), result};
}

std::pair<DensityMatrix, SyndromeResult> recover(const CodeSpec& code, const DensityMatrix& state, Rng& rng) {
  if (state.dim() != code.dim()) throw std::invalid_argument("recover: state is not on the code carrier");
  const CMatrix& rho = state.matrix();
  const auto& branches = code.recovery_branches();
  std::vector<double> weights(branches.size());
  for (std::size_t k = 0; k < branches.size(); ++k) {
    weights[k] = (branches[k].sources.adjoint() * rho * branches[k].sources).trace().real();
  }
  const std::size_t k = pick(weights, uniform01(rng));
  const RecoveryBranch& br = branches[k];
  CMatrix out = br.targets * (br.sources.adjoint() * rho * br.sources) * br.targets.adjoint();
  out /= out.trace().real();
  out = 0.5 * (out + out.adjoint());
  return {DensityMatrix(out, 1e-8), {br.syndrome, br.label, br.flagged, 0.0}};
}

CMatrix dephase_qubits(const CMatrix& rho, int n_qubits, double p_phi) {
  if (!(p_phi >= 0.0 && p_phi <= 0.5)) throw std::domain_error("dephase_qubits: p_phi must lie in [0, 1/2]");
  if (rho.rows() != (Eigen::Index{1} << n_qubits)) throw std::invalid_argument("dephase_qubits: dimension mismatch");
  CMatrix out = rho;
  for (int k = 0; k < n_qubits; ++k) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index j = 0; j < out.cols(); ++j) {
        if (((i ^ j) >> k) & 1) out(i, j) *= 1.0 - 2.0 * p_phi;
      }
    }
  }
  return out;
}

double logical_flip_probability_three_qubit(double p_phi) {
  if (!(p_phi >= 0.0 && p_phi <= 0.5)) throw std::domain_error("p_phi must lie in [0, 1/2]");
  double total = 0.0;
  for (unsigned pattern = 0; pattern < 8; ++pattern) {
    double w = 1.0;
    for (int k = 0; k < 3; ++k) w *= ((pattern >> k) & 1U) ? p_phi : 1.0 - p_phi;
    if (popcount(pattern) >= 2) total += w;
  }
  return total;
}

LinearOperator logical_conditional_displacement(const CodeSpec& code, cplx alpha, int n_trunc) {
  const int dc = code.dim();
  const int dm = n_trunc + 1;
  if (static_cast<long long>(dc) * dm > 6000) {
    throw std::invalid_argument("logical_conditional_displacement: joint dimension above 6000");
  }
  const CMatrix d_minus = displacement_operator(-alpha, n_trunc).matrix;
  const CMatrix d_plus = displacement_operator(alpha, n_trunc).matrix;
  const CMatrix pg = code.logical_g() * code.logical_g().adjoint();
  const CMatrix pe = code.logical_e() * code.logical_e().adjoint();
  const CMatrix rest = CMatrix::Identity(dc, dc) - pg - pe;
  CMatrix out = CMatrix::Zero(dc * dm, dc * dm);
  for (int i = 0; i < dc; ++i) {
    for (int j = 0; j < dc; ++j) {
      if (pg(i, j) == 0.0 && pe(i, j) == 0.0 && rest(i, j) == 0.0) continue;
      auto block = out.block(i * dm, j * dm, dm, dm);
      block = pg(i, j) * d_minus + pe(i, j) * d_plus;
      block.diagonal().array() += rest(i, j);
    }
  }
  return {std::move(out), std::string("logical_CD_") + code_name_string(code.name())};
}

CVector logical_y_state(const CodeSpec& code, LogicalOutcome outcome) {
  if (outcome == LogicalOutcome::complement) throw std::invalid_argument("logical_y_state: no state for complement");
  const cplx phase = outcome == LogicalOutcome::plus ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
  return (code.logical_g() + phase * code.logical_e()) / std::sqrt(2.0);
}

std::array<double, 3> logical_Y_probabilities(const CodeSpec& code, const DensityMatrix& state) {
  if (state.dim() != code.dim()) throw std::invalid_argument("logical_Y_probabilities: dimension mismatch");
  const CVector yp = logical_y_state(code, LogicalOutcome::plus);
  const CVector ym = logical_y_state(code, LogicalOutcome::minus);
  const double pp = yp.dot(state.matrix() * yp).real();
  const double pm = ym.dot(state.matrix() * ym).real();
  const double pc = std::max(0.0, state.matrix().trace().real() - pp - pm);
  return {pp, pm, pc};
}

YMeasurement logical_Y_measurement(const CodeSpec& code, const DensityMatrix& state, Rng& rng) {
  const auto probs = logical_Y_probabilities(code, state);
  const std::size_t k = pick({probs[0], probs[1], probs[2]}, uniform01(rng));
  if (k < 2) {
    const LogicalOutcome o = k == 0 ? LogicalOutcome::plus : LogicalOutcome::minus;
    return {o, DensityMatrix::from_pure(logical_y_state(code, o))};
  }
  const CVector yp = logical_y_state(code, LogicalOutcome::plus);
  const CVector ym = logical_y_state(code, LogicalOutcome::minus);
  const CMatrix q = CMatrix::Identity(code.dim(), code.dim()) - yp * yp.adjoint() - ym * ym.adjoint();
  CMatrix out = q * state.matrix() * q;
  out /= out.trace().real();
  out = 0.5 * (out + out.adjoint());
  return {LogicalOutcome::complement, DensityMatrix(out, 1e-8)};
}

double knill_laflamme_violation(const CodeSpec& code, const std::vector<CMatrix>& errors) {
  const CVector& g = code.logical_g();
  const CVector& e = code.logical_e();
  double worst = 0.0;
  for (const auto& ei : errors) {
    for (const auto& ej : errors) {
      const CMatrix m = ei.adjoint() * ej;
      worst = std::max(worst, std::abs(g.dot(m * e)));
      worst = std::max(worst, std::abs(e.dot(m * g)));
      worst = std::max(worst, std::abs(g.dot(m * g) - e.dot(m * e)));
    }
  }
  return worst;
}

}  // namespace cvqec
