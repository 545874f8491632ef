#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "cvqec/common.hpp"
#include "cvqec/dvcodes.hpp"
#include "cvqec/protocol.hpp"

namespace cvqec {

enum class AncillaKind { perfect, bare_qubit, three_qubit, binomial, shor };

const char* ancilla_kind_string(AncillaKind kind) noexcept;

struct TrajectoryPlan {
  // scheme must be qubit_p or squeezed_qubit; alpha == 0 selects the optimum
  // for the effective p-noise width, zeta is used as given.
  ProtocolConfig protocol;
  cplx amplitude = 0.0;
  AncillaKind ancilla = AncillaKind::perfect;
  double p_phi = 0.0;
  std::int64_t n_trajectories = 1000;
  std::uint64_t root_seed = 1;
  // Data-mode truncation for the direct engine; 0 picks one from alpha and the amplitude.
  int data_n_trunc = 0;
  // Fock truncation of the binomial ancilla mode.
  int ancilla_n_trunc = 30;

  void validate() const;
};

struct EstimateWithError {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
};

struct TrajectoryOutcome {
  double fidelity = 0.0;
  // Effective displacement left on the data after the outcome-dependent correction.
  double residual_q = 0.0;
  double residual_p = 0.0;
  int y_outcome = 0;  // +1, -1, or 0 for the out-of-code complement
  bool flagged_syndrome = false;
};

struct RunResult {
  EstimateWithError infidelity;
  // Second moments of the residual displacement.
  EstimateWithError var_q;
  EstimateWithError var_p;
  std::int64_t flagged_syndromes = 0;
  std::int64_t flagged_measurements = 0;
  double alpha = 0.0;
  double correction_shift = 0.0;
  int data_n_trunc = 0;
};

// Precomputed operators for one plan. Trajectory `index` draws only from
// streams derived from (root_seed, index).
class TrajectoryEngine {
 public:
  // Dense data-mode operators are only built when `with_direct` is set.
  explicit TrajectoryEngine(const TrajectoryPlan& plan, bool with_direct = true);

  // Full carrier (x) truncated-Fock simulation.
  TrajectoryOutcome direct(std::int64_t index) const;
  // Sum of (carrier vector) (x) D(delta)|psi> terms with analytic overlaps.
  TrajectoryOutcome branch(std::int64_t index) const;

  const TrajectoryPlan& plan() const noexcept { return plan_; }
  const CodeSpec& code() const noexcept { return *code_; }
  double alpha() const noexcept { return alpha_; }
  double correction_shift() const noexcept { return shift_; }
  int data_n_trunc() const noexcept { return n_trunc_; }

 private:
  struct DirectOperators;

  // S(-zeta) D(beta) S(zeta) = D(effective_noise(beta)).
  cplx effective_noise(cplx beta) const;
  void ancilla_noise(JointState& state, Rng& rng) const;

  TrajectoryPlan plan_;
  std::shared_ptr<const CodeSpec> code_;
  double alpha_ = 0.0;
  double zeta_ = 0.0;
  double shift_ = 0.0;
  int n_trunc_ = 0;
  std::shared_ptr<const DirectOperators> direct_;
};

// Worker count: hardware concurrency capped by CVQEC_THREADS when set.
int worker_count();

// Evaluates fn(i) for i in [0, n) on `workers` threads (0: worker_count()); results are stored by index.
std::vector<TrajectoryOutcome> run_trajectories(std::int64_t n,
                                                const std::function<TrajectoryOutcome(std::int64_t)>& fn,
                                                int workers = 0);

// Mean and sample-standard error, summed pairwise in index order.
EstimateWithError estimate(const std::vector<double>& samples);

RunResult summarize(const TrajectoryEngine& engine, const std::vector<TrajectoryOutcome>& outcomes);

RunResult run_concatenated(const TrajectoryPlan& plan);
RunResult branch_decomposition_run(const TrajectoryPlan& plan);

// Fraction of logical flips of the three-qubit phase code under i.i.d. dephasing,
// by sampled syndrome recovery.
EstimateWithError three_qubit_flip_rate(double p_phi, std::int64_t n, std::uint64_t root_seed);

}  // namespace cvqec
