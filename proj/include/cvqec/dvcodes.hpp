#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cvqec/common.hpp"
#include "cvqec/fock.hpp"

namespace cvqec {

enum class CodeName { unencoded, three_qubit_phase, shor9, binomial_n3 };
enum class Carrier { qubits, single_mode, single_boson_modes };

const char* code_name_string(CodeName name) noexcept;

struct SyndromeResult {
  // -1 when the syndrome was averaged over rather than sampled.
  int syndrome = -1;
  std::string applied_recovery;
  bool flagged = false;
  // Weight of flagged (uncorrectable) branches; set in averaged mode.
  double flagged_probability = 0.0;
};

// Pauli X^x Z^z on a qubit register; bit k of a mask is qubit k, and bit k of a
// basis index is the state of qubit k.
struct PauliString {
  std::uint32_t x_mask = 0;
  std::uint32_t z_mask = 0;
};

// Applies the Pauli to every column (register index along rows).
void apply_pauli(CMatrix& amps, const PauliString& p);

// Joint carrier (x) data state sum_t v_t (x) phi_t. Column t of `carrier` is v_t.
// `frame` F satisfies F F^dag = G^T with G_tu = <phi_t|phi_u>, so W = carrier * F is the
// same state written against an orthonormal data basis. An empty frame means G = I.
struct JointState {
  CMatrix carrier;
  CMatrix frame;

  CMatrix whitened() const { return frame.size() == 0 ? carrier : CMatrix(carrier * frame); }
  double norm2() const { return whitened().squaredNorm(); }
  void normalize();
};

// One Kraus operator of a recovery map, K = targets * sources^dag.
struct RecoveryBranch {
  int syndrome = 0;
  std::string label;
  bool flagged = false;
  CMatrix targets;
  CMatrix sources;

  CMatrix apply(const CMatrix& x) const { return targets * (sources.adjoint() * x); }
  CMatrix matrix() const { return targets * sources.adjoint(); }
};

class CodeSpec {
 public:
  virtual ~CodeSpec() = default;

  CodeName name() const noexcept { return name_; }
  Carrier carrier() const noexcept { return carrier_; }
  int dim() const noexcept { return static_cast<int>(g_.size()); }
  const CVector& logical_g() const noexcept { return g_; }
  const CVector& logical_e() const noexcept { return e_; }

  // Complete Kraus decomposition of syndrome measurement plus recovery.
  const std::vector<RecoveryBranch>& recovery_branches() const noexcept { return branches_; }

  // Samples one recovery branch with its Born weight on the joint state,
  // applies it to the carrier and renormalizes.
  virtual SyndromeResult recover_trajectory(JointState& state, Rng& rng) const;

 protected:
  CodeSpec(CodeName name, Carrier carrier, CVector g, CVector e);

  std::vector<RecoveryBranch> branches_;

 private:
  CodeName name_;
  Carrier carrier_;
  CVector g_;
  CVector e_;
};

class StabilizerCode : public CodeSpec {
 public:
  int n_qubits() const noexcept { return n_qubits_; }
  const std::vector<PauliString>& stabilizers() const noexcept { return stabilizers_; }
  // Correction for a syndrome word (bit k set when stabilizer k reads -1).
  const PauliString& correction(int syndrome) const { return table_.at(syndrome); }

  // Measures the stabilizers one at a time, then applies the table correction.
  SyndromeResult recover_trajectory(JointState& state, Rng& rng) const override;

  StabilizerCode(CodeName name, Carrier carrier, int n_qubits, CVector g, CVector e,
                 std::vector<PauliString> stabilizers, std::vector<PauliString> table);

 private:
  int n_qubits_;
  std::vector<PauliString> stabilizers_;
  std::vector<PauliString> table_;
};

// Single physical qubit with no recovery; g = |0>, e = |1>.
std::shared_ptr<const CodeSpec> make_unencoded_qubit();
// |g> = (|+++> + |--->)/sqrt2, |e> = (|+++> - |--->)/sqrt2; checks X1X2, X2X3.
std::shared_ptr<const CodeSpec> make_three_qubit_phase();
// |g>, |e> = (|000> +- |111>)^(x)3 / 2^(3/2) over nine single-boson modes.
std::shared_ptr<const CodeSpec> make_shor9();
// |g> = (|0> + sqrt3 |6>)/2, |e> = (sqrt3 |3> + |9>)/2 on levels 0..n_trunc.
std::shared_ptr<const CodeSpec> make_binomial_n3(int n_trunc = 30);
std::shared_ptr<const CodeSpec> make_code(CodeName name);

// a |g>_L + b |e>_L for logical = (a, b); normalizes.
PureState encode(const CodeSpec& code, const CVector& logical);

// Syndrome-averaged recovery (deterministic CP map).
std::pair<DensityMatrix, SyndromeResult> recover(const CodeSpec& code, const DensityMatrix& state);
// Sampled syndrome; the returned state is renormalized.
std::pair<DensityMatrix, SyndromeResult> recover(const CodeSpec& code, const DensityMatrix& state,
                                                 Rng& rng);

// Independent Z flips with probability p on each of n qubits, as a channel.
CMatrix dephase_qubits(const CMatrix& rho, int n_qubits, double p_phi);

// Probability of two or more flips among three, by enumerating all eight patterns.
double logical_flip_probability_three_qubit(double p_phi);

// P_g (x) D(-alpha) + P_e (x) D(alpha) + (I - P_g - P_e) (x) I, carrier-major.
// Refuses joint dimensions above 6000.
LinearOperator logical_conditional_displacement(const CodeSpec& code, cplx alpha, int n_trunc);

enum class LogicalOutcome { plus, minus, complement };

// (|g>_L +- i |e>_L) / sqrt2.
CVector logical_y_state(const CodeSpec& code, LogicalOutcome outcome);

// Probabilities of +Y, -Y and the out-of-code complement.
std::array<double, 3> logical_Y_probabilities(const CodeSpec& code, const DensityMatrix& state);

struct YMeasurement {
  LogicalOutcome outcome;
  DensityMatrix state;
};
YMeasurement logical_Y_measurement(const CodeSpec& code, const DensityMatrix& state, Rng& rng);

// Largest deviation from the Knill-Laflamme conditions over all error pairs.
double knill_laflamme_violation(const CodeSpec& code, const std::vector<CMatrix>& errors);

}  // namespace cvqec
