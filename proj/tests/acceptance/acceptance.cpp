#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cvqec/dvcodes.hpp"
#include "cvqec/montecarlo.hpp"
#include "cvqec/optimize.hpp"
#include "cvqec/protocol.hpp"

using namespace cvqec;
namespace fs = std::filesystem;

namespace {

const double kInvE = std::exp(-1.0);

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Check&)>& body) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) {
    c.ok = false;
    c.detail << " [over time budget " << budget_s << " s]";
  }
  if (!c.ok) ++failures;
  std::printf("%s criterion %d: %s (%.2f s)%s\n", c.ok ? "PASS" : "FAIL", id, title, secs, c.detail.str().c_str());
  std::fflush(stdout);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

CVector logical(cplx a, cplx b) {
  CVector v(2);
  v << a, b;
  return v.normalized();
}

std::vector<CVector> logical_inputs() {
  return {logical(1, 0), logical(0, 1), logical(1, 1), logical(1, cplx(0, 1)), logical(0.6, cplx(0.48, -0.64))};
}

CMatrix pauli_on(int n_qubits, int k, char kind) {
  const int dim = 1 << n_qubits;
  CMatrix op = CMatrix::Identity(dim, dim);
  PauliString p;
  if (kind == 'X' || kind == 'Y') p.x_mask = 1U << k;
  if (kind == 'Z' || kind == 'Y') p.z_mask = 1U << k;
  apply_pauli(op, p);
  return op;
}

double branch_fidelity(const CodeSpec& code, const CVector& psi, const CVector& damaged) {
  double f = 0;
  for (const auto& br : code.recovery_branches()) f += std::norm(psi.dot(CVector(br.apply(damaged))));
  return f;
}

TrajectoryPlan fig4_plan(AncillaKind kind, double sigma, double p_phi, std::int64_t n, std::uint64_t seed) {
  TrajectoryPlan plan;
  plan.protocol.scheme = SchemeKind::squeezed_qubit;
  plan.protocol.sigma = sigma;
  plan.protocol.zeta = optimal_squeezing();
  plan.ancilla = kind;
  plan.p_phi = p_phi;
  plan.n_trajectories = n;
  plan.root_seed = seed;
  return plan;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cli_call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

}  // namespace

int main() {
  criterion(1, "single-qubit optimum", 1.0, [](Check& c) {
    for (double s : {0.05, 0.1, 0.3}) {
      const auto o = optimize_qubit_p(s);
      const double a = 1 / (2 * std::sqrt(2.0) * s);
      const double v = (1 - kInvE) * s * s / 2;
      c.detail << " s=" << s << ": alpha=" << o.alpha << " var_p=" << o.noise.var_p;
      c.require(rel(o.alpha, a) < 1e-4, "alpha_opt");
      c.require(std::abs(o.noise.var_p - v) < 1e-8, "var_p");
      c.require(std::abs(1 - o.noise.var_p / (s * s / 2) - kInvE) < 1e-6, "36.8% reduction");
    }
  });

  criterion(2, "squeezed scheme", 5.0, [](Check& c) {
    const double s = 0.1;
    const auto o = optimize_squeezed(s);
    const double z = std::log(1 - kInvE) / 8;
    c.detail << " zeta=" << o.zeta << " total=" << o.noise.total() << " dB=" << squeezing_db(o.zeta);
    c.require(std::abs(o.zeta - z) < 1e-4, "zeta_opt");
    c.require(std::abs(o.noise.total() - s * s * std::sqrt(1 - kInvE)) < 1e-6, "total variance");
    c.require(std::abs(o.noise.var_q - o.noise.var_p) < 1e-8, "var_q = var_p");
    c.require(std::abs(squeezing_db(o.zeta) - 0.996) < 1e-3, "0.996 dB");
  });

  criterion(3, "two-qubit scheme", 0, [](Check& c) {
    for (double s : {0.05, 0.1, 0.3}) {
      const auto o = optimize_two_qubit(s);
      const double v = (1 - kInvE) * s * s / 2;
      c.detail << " s=" << s << ": var_q=" << o.noise.var_q << " var_p=" << o.noise.var_p;
      c.require(std::abs(o.noise.var_q - v) < 1e-8 && std::abs(o.noise.var_p - v) < 1e-8, "both quadratures");
    }
  });

  criterion(4, "qudit scheme", 60.0, [](Check& c) {
    const double s = 0.1;
    double prev = 1.0;
    const double a_fixed = std::numbers::pi / (5 * s);
    for (int d = 2; d <= 15; ++d) {
      const double v = optimize_qudit(s, d).noise.var_p;
      c.require(v <= prev, "nonincreasing at d=" + std::to_string(d));
      prev = v;
      if (d == 2) {
        c.detail << " d=2 var_p=" << v;
        c.require(std::abs(v - (1 - kInvE) * s * s / 2) < 1e-9, "d=2 closed form");
      }
      if (d >= 4) c.require(run_qudit_scheme(s, a_fixed, d).var_p < qudit_bound(s, 5, d), "bound at d=" + std::to_string(d));
    }
    c.detail << " d=15 var_p=" << prev;
  });

  criterion(5, "trajectory var_p vs closed form", 60.0, [](Check& c) {
    TrajectoryPlan plan;
    plan.protocol.scheme = SchemeKind::qubit_p;
    plan.protocol.sigma = 0.1;
    plan.ancilla = AncillaKind::bare_qubit;
    plan.n_trajectories = 100000;
    plan.root_seed = 2024;
    const auto r = branch_decomposition_run(plan);
    const double closed = (1 - kInvE) * 0.01 / 2;
    c.detail << " mc=" << r.var_p.mean << " +- " << r.var_p.std_error << " closed=" << closed;
    c.require(std::abs(r.var_p.mean - closed) <= 3 * r.var_p.std_error, "within 3 SE");
  });

  criterion(6, "second-order infidelity validity", 0, [](Check& c) {
    for (StateKind kind : {StateKind::coherent, StateKind::fock1}) {
      const double h = 1e-4;
      const double fd = (overlap_f(kind, h) - 2 * overlap_f(kind, 0.0) + overlap_f(kind, -h)) / (h * h);
      const double want = kind == StateKind::coherent ? -2.0 : -6.0;
      c.require(std::abs(fd - want) < 1e-5, "curvature");
      c.detail << " f''=" << fd;
    }
    for (double s : {0.05, 0.1}) {
      std::vector<ProtocolConfig> configs;
      ProtocolConfig q;
      q.scheme = SchemeKind::qubit_p;
      q.sigma = s;
      q.alpha = optimize_qubit_p(s).alpha;
      configs.push_back(q);
      ProtocolConfig t = q;
      t.scheme = SchemeKind::two_qubit;
      t.alpha_q = t.alpha;
      configs.push_back(t);
      ProtocolConfig z = q;
      const auto sq = optimize_squeezed(s);
      z.scheme = SchemeKind::squeezed_qubit;
      z.alpha = sq.alpha;
      z.zeta = sq.zeta;
      configs.push_back(z);
      ProtocolConfig d = q;
      d.scheme = SchemeKind::qudit;
      d.d = 4;
      d.alpha = optimize_qudit(s, 4).alpha;
      configs.push_back(d);
      const char* names[] = {"qubit_p", "two_qubit", "squeezed", "qudit4"};
      for (StateKind kind : {StateKind::coherent, StateKind::fock1}) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
          ProtocolConfig cfg = configs[i];
          cfg.state_kind = kind;
          const auto dist = corrected_distributions(cfg);
          const double exact = exact_infidelity(kind, dist.q, dist.p);
          const double approx = infidelity_from_noise(kind, run_scheme(cfg));
          const double gap = std::abs(exact - approx) / std::pow(s, 4);
          const std::string tag = std::string(kind == StateKind::coherent ? "coherent" : "fock1") + "/" + names[i] +
                                  "/s=" + std::to_string(s).substr(0, 4);
          c.detail << " " << tag << ":" << std::round(gap * 100) / 100 << "s^4";
          c.require(gap <= 5.0, tag);
        }
      }
    }
  });

  criterion(7, "code correctness", 0, [](Check& c) {
    const auto shor = make_shor9();
    int recovered = 0;
    for (int k = 0; k < 9; ++k)
      for (char kind : {'X', 'Y', 'Z'}) {
        bool all = true;
        for (const CVector& l : logical_inputs()) {
          const CVector psi = encode(*shor, l).amplitudes();
          CVector damaged = pauli_on(9, k, kind) * psi;
          all = all && std::abs(branch_fidelity(*shor, psi, damaged) - 1.0) < 1e-10;
        }
        recovered += all;
      }
    c.detail << " shor " << recovered << "/27";
    c.require(recovered == 27, "Shor single Paulis");

    const auto bin = make_binomial_n3();
    const int dim = bin->dim();
    const CMatrix a = annihilation(dim - 1);
    const CMatrix ad = a.adjoint();
    const double kl = knill_laflamme_violation(*bin, {CMatrix::Identity(dim, dim), a, ad});
    c.detail << " binomial KL=" << kl;
    c.require(kl < 1e-10, "binomial KL");
    double worst = 1.0;
    for (const CMatrix* e : {&a, &ad})
      for (const CVector& l : logical_inputs()) {
        const CVector psi = encode(*bin, l).amplitudes();
        CVector damaged = (*e) * psi;
        damaged.normalize();
        const auto [rho, info] = recover(*bin, DensityMatrix::from_pure(damaged));
        worst = std::min(worst, psi.dot(rho.matrix() * psi).real());
      }
    c.detail << " binomial worst F=" << worst;
    c.require(std::abs(worst - 1.0) < 1e-9, "binomial loss/gain");

    const auto three = make_three_qubit_phase();
    const CVector psi = encode(*three, logical(1, 1)).amplitudes();
    for (double p : {0.02, 0.05, 0.1}) {
      // Enumerate the eight dephasing patterns; two or more flips defeat majority vote.
      double oracle = 0;
      for (int m = 0; m < 8; ++m) {
        const int flips = (m & 1) + ((m >> 1) & 1) + ((m >> 2) & 1);
        if (flips >= 2) oracle += std::pow(p, flips) * std::pow(1 - p, 3 - flips);
      }
      c.require(std::abs(oracle - (3 * p * p - 2 * p * p * p)) < 1e-15, "oracle algebra");
      const auto [rho, info] = recover(*three, DensityMatrix(dephase_qubits(psi * psi.adjoint(), 3, p)));
      const double density = 1 - psi.dot(rho.matrix() * psi).real();
      const auto mc = three_qubit_flip_rate(p, 100000, 77);
      c.detail << " p=" << p << ": dm=" << density << " mc=" << mc.mean << "+-" << mc.std_error;
      c.require(std::abs(density - oracle) < 1e-14, "density mode");
      c.require(std::abs(mc.mean - oracle) <= 3 * mc.std_error, "MC mode");
    }
  });

  criterion(8, "trajectory ordering and endpoints", 1800.0, [](Check& c) {
    // (a) zero dephasing endpoint
    const double s = 0.1;
    const auto bare = branch_decomposition_run(fig4_plan(AncillaKind::bare_qubit, s, 0.0, 100000, 11));
    const auto coded = branch_decomposition_run(fig4_plan(AncillaKind::three_qubit, s, 0.0, 100000, 11));
    const double endpoint = s * s * std::sqrt(1 - kInvE);
    const double se = std::hypot(bare.infidelity.std_error, coded.infidelity.std_error);
    c.detail << " (a) bare=" << bare.infidelity.mean << " coded=" << coded.infidelity.mean << " endpoint=" << endpoint;
    c.require(std::abs(bare.infidelity.mean - coded.infidelity.mean) <= 3 * se, "8a agreement");
    c.require(std::abs(bare.infidelity.mean - endpoint) <= 3 * bare.infidelity.std_error + 5 * std::pow(s, 4),
              "8a endpoint");

    // (b) small dephasing
    for (double p : {0.01, 0.02, 0.05}) {
      const auto b = branch_decomposition_run(fig4_plan(AncillaKind::bare_qubit, s, p, 20000, 12));
      const auto e = branch_decomposition_run(fig4_plan(AncillaKind::three_qubit, s, p, 20000, 12));
      c.detail << " (b) p=" << p << ": bare=" << b.infidelity.mean << " coded=" << e.infidelity.mean;
      c.require(e.infidelity.mean < b.infidelity.mean, "8b p=" + std::to_string(p));
    }

    // (c) sigma sweep, Shor against binomial
    for (double sig : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
      const auto sh = branch_decomposition_run(fig4_plan(AncillaKind::shor, sig, 0.0, 10000, 13));
      const auto bi = branch_decomposition_run(fig4_plan(AncillaKind::binomial, sig, 0.0, 10000, 13));
      const double comb = std::hypot(sh.infidelity.std_error, bi.infidelity.std_error);
      c.detail << " (c) s=" << sig << ": shor=" << sh.infidelity.mean << " binomial=" << bi.infidelity.mean;
      c.require(sh.infidelity.mean <= bi.infidelity.mean + 3 * comb, "8c s=" + std::to_string(sig));
    }

    // (d) coherent amplitude
    auto p0 = fig4_plan(AncillaKind::bare_qubit, s, 0.05, 20000, 14);
    auto p1 = p0;
    p1.amplitude = cplx(1.5, -0.7);
    const auto r0 = branch_decomposition_run(p0);
    const auto r1 = branch_decomposition_run(p1);
    c.detail << " (d) " << r0.infidelity.mean << " vs " << r1.infidelity.mean;
    c.require(std::abs(r0.infidelity.mean - r1.infidelity.mean) <=
                  3 * std::hypot(r0.infidelity.std_error, r1.infidelity.std_error),
              "8d amplitude");
  });

  criterion(9, "determinism across runs and thread counts", 0, [](Check& c) {
    const fs::path root = fs::temp_directory_path() / "cvqec_acceptance_determinism";
    fs::remove_all(root);
    const std::vector<std::vector<std::string>> commands = {
        {"fig2", "--sigma", "0.1"},
        {"fig3", "--sigma", "0.1", "--dmax", "8"},
        {"fig4", "--code", "three_qubit", "--sweep", "pphi", "--trajectories", "2000", "--seed", "5"},
        {"fig4", "--state", "fock1", "--code", "binomial", "--sweep", "sigma", "--values", "0.1,0.2", "--trajectories",
         "200"},
    };
    const char* threads[] = {"1", "3", nullptr};
    std::vector<fs::path> dirs;
    for (int t = 0; t < 3; ++t) {
      if (threads[t]) {
        ::setenv("CVQEC_THREADS", threads[t], 1);
      } else {
        ::unsetenv("CVQEC_THREADS");
      }
      dirs.push_back(root / ("run" + std::to_string(t)));
      for (auto args : commands) {
        args.insert(args.end(), {"--out", dirs.back().string()});
        c.require(cli_call(args) == 0, "cli exit status");
      }
    }
    ::unsetenv("CVQEC_THREADS");
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename();
      const std::string ref = slurp(entry.path());
      for (std::size_t t = 1; t < dirs.size(); ++t) c.require(slurp(dirs[t] / name) == ref, name.string());
      ++files;
    }
    c.detail << " " << files << " files x " << dirs.size() << " runs";
    c.require(files == 10, "expected file count");

    // The pool itself, with explicit worker counts beyond the hardware cap.
    const TrajectoryEngine engine(fig4_plan(AncillaKind::three_qubit, 0.1, 0.05, 3000, 9), false);
    auto fn = [&](std::int64_t i) { return engine.branch(i); };
    const auto ref = summarize(engine, run_trajectories(3000, fn, 1));
    for (int w : {2, 5}) {
      const auto r = summarize(engine, run_trajectories(3000, fn, w));
      c.require(r.infidelity.mean == ref.infidelity.mean && r.infidelity.std_error == ref.infidelity.std_error &&
                    r.var_p.mean == ref.var_p.mean,
                "pool workers=" + std::to_string(w));
    }
    fs::remove_all(root);
  });

  std::printf("summary: %d of 9 criteria failed\n", failures);
  return failures ? 1 : 0;
}
