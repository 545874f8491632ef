#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvqec/filtered_moments.hpp"
#include "cvqec/gaussian.hpp"
#include "cvqec/montecarlo.hpp"
#include "cvqec/optimize.hpp"
#include "cvqec/protocol.hpp"

#ifndef CVQEC_VERSION_STRING
#define CVQEC_VERSION_STRING "unknown"
#endif

namespace cvqec::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
      out += '\n';
    }
    return out;
  }
};

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
}

// Writes `table` to dir/name and its provenance sidecar to dir/name.json.
void emit(const fs::path& dir, const std::string& name, const Table& table, const std::string& command,
          const std::vector<std::string>& argv, const json& config) {
  write_file(dir / name, table.str());
  json side;
  side["command"] = command;
  side["argv"] = argv;
  side["config"] = config;
  side["output"] = name;
  side["version"] = CVQEC_VERSION_STRING;
  write_file(dir / (name + ".json"), side.dump(2) + "\n");
}

// Invocation tokens without the output directory, for the sidecar.
std::vector<std::string> strip_out(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--out" || args[i] == "-o") {
      ++i;
      continue;
    }
    if (args[i].rfind("--out=", 0) == 0) continue;
    kept.push_back(args[i]);
  }
  return kept;
}

FourierBasis parse_basis(const std::string& s) {
  return s == "standard" ? FourierBasis::standard : FourierBasis::half_shifted;
}

StateKind parse_state(const std::string& s) { return s == "fock1" ? StateKind::fock1 : StateKind::coherent; }

struct Fig2Options {
  double sigma = 0.1;
  int alpha_points = 161;
  int beta_points = 201;
  std::string out = ".";
};

void cmd_fig2(const Fig2Options& o, const std::vector<std::string>& argv) {
  const double a_opt = optimal_qubit_alpha(o.sigma);
  const double a_max = 2.0 / o.sigma;
  Table curve{{"alpha", "var_p", "is_optimum"}, {}};
  std::vector<double> alphas;
  for (int i = 0; i < o.alpha_points; ++i) alphas.push_back(a_max * i / (o.alpha_points - 1));
  alphas.push_back(a_opt);
  std::sort(alphas.begin(), alphas.end());
  for (double a : alphas) curve.rows.push_back({a, run_qubit_p_scheme(o.sigma, a).var_p, a == a_opt ? 1.0 : 0.0});

  const QuadratureDistribution dist = qubit_corrected_distribution(o.sigma, a_opt);
  Table density{{"beta", "uncorrected", "corrected_plus", "corrected_minus", "corrected"}, {}};
  const double b_max = 4.0 * o.sigma;
  for (int i = 0; i < o.beta_points; ++i) {
    const double b = -b_max + 2.0 * b_max * i / (o.beta_points - 1);
    std::vector<double> row{b, gaussian_pdf(b, o.sigma)};
    double mix = 0.0;
    for (const auto& br : dist.branches) {
      const double u = b + br.shift;
      const double weighted = gaussian_pdf(u, o.sigma) * br.filter(u);
      row.push_back(weighted / br.prob);
      mix += weighted;
    }
    row.push_back(mix);
    density.rows.push_back(std::move(row));
  }
  json config{{"sigma", o.sigma}, {"alpha_opt", a_opt}, {"alpha_points", o.alpha_points},
              {"beta_points", o.beta_points}, {"scheme", "qubit_p"}};
  emit(o.out, "fig2_variance.csv", curve, "fig2", argv, config);
  emit(o.out, "fig2_distribution.csv", density, "fig2", argv, config);
}

struct Fig3Options {
  double sigma = 0.1;
  int dmax = 15;
  double s = 5.0;
  std::string basis = "half_shifted";
  std::string out = ".";
};

void cmd_fig3(const Fig3Options& o, const std::vector<std::string>& argv) {
  if (o.dmax < 2 || o.dmax > 32) throw std::invalid_argument("--dmax must lie in [2, 32]");
  if (!(o.s > 0.0)) throw std::invalid_argument("--s must be positive");
  const FourierBasis basis = parse_basis(o.basis);
  const double a_fixed = std::numbers::pi / (o.s * o.sigma);
  Table t{{"d", "alpha_opt", "var_p", "alpha_fixed", "var_p_fixed", "bound"}, {}};
  for (int d = 2; d <= o.dmax; ++d) {
    const OptimizedScheme best = optimize_qudit(o.sigma, d, basis);
    t.rows.push_back({static_cast<double>(d), best.alpha, best.noise.var_p, a_fixed,
                      run_qudit_scheme(o.sigma, a_fixed, d, basis).var_p, qudit_bound(o.sigma, o.s, d)});
  }
  json config{{"sigma", o.sigma}, {"dmax", o.dmax}, {"s", o.s}, {"basis", o.basis}, {"scheme", "qudit"}};
  emit(o.out, "fig3.csv", t, "fig3", argv, config);
}

struct Fig4Options {
  std::string state = "coherent";
  std::string code = "none";
  std::string sweep = "pphi";
  std::string scheme = "squeezed";
  std::string engine = "branch";
  std::int64_t trajectories = 10000;
  std::uint64_t seed = 1;
  double sigma = 0.1;
  double pphi = 0.0;
  double amplitude = 1.0;
  std::vector<double> values;
  std::string out = ".";
};

AncillaKind ancilla_for(const std::string& code) {
  if (code == "three_qubit") return AncillaKind::three_qubit;
  if (code == "binomial") return AncillaKind::binomial;
  if (code == "shor") return AncillaKind::shor;
  return AncillaKind::bare_qubit;
}

void cmd_fig4(const Fig4Options& o, const std::vector<std::string>& argv) {
  const bool pphi_sweep = o.sweep == "pphi";
  if (pphi_sweep && (o.code == "binomial" || o.code == "shor")) {
    throw std::invalid_argument("--sweep pphi applies to --code none or three_qubit");
  }
  std::vector<double> values = o.values;
  if (values.empty()) {
    values = pphi_sweep ? std::vector<double>{0.0, 0.005, 0.01, 0.02, 0.05, 0.1}
                        : std::vector<double>{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  }
  std::sort(values.begin(), values.end());

  Table t{{pphi_sweep ? "p_phi" : "sigma", "infidelity", "infidelity_stderr", "var_q", "var_p", "var_p_stderr",
           "alpha", "zeta", "flagged_syndromes", "flagged_measurements", "n"},
          {}};
  json points = json::array();
  for (double v : values) {
    TrajectoryPlan plan;
    plan.protocol.scheme = o.scheme == "qubit_p" ? SchemeKind::qubit_p : SchemeKind::squeezed_qubit;
    plan.protocol.sigma = pphi_sweep ? o.sigma : v;
    plan.protocol.zeta = plan.protocol.scheme == SchemeKind::squeezed_qubit ? optimal_squeezing() : 0.0;
    plan.protocol.state_kind = parse_state(o.state);
    plan.amplitude = o.amplitude;
    plan.ancilla = ancilla_for(o.code);
    plan.p_phi = pphi_sweep ? v : o.pphi;
    plan.n_trajectories = o.trajectories;
    plan.root_seed = o.seed;
    const RunResult r = o.engine == "direct" ? run_concatenated(plan) : branch_decomposition_run(plan);
    t.rows.push_back({v, r.infidelity.mean, r.infidelity.std_error, r.var_q.mean, r.var_p.mean, r.var_p.std_error,
                      r.alpha, plan.protocol.zeta, static_cast<double>(r.flagged_syndromes),
                      static_cast<double>(r.flagged_measurements), static_cast<double>(r.infidelity.n)});
    points.push_back({{"value", v}, {"data_n_trunc", o.engine == "direct" ? r.data_n_trunc : 0}});
  }
  json config{{"state", o.state},
              {"code", o.code},
              {"ancilla", ancilla_kind_string(ancilla_for(o.code))},
              {"sweep", o.sweep},
              {"scheme", o.scheme},
              {"engine", o.engine},
              {"trajectories", o.trajectories},
              {"seed", o.seed},
              {"sigma", o.sigma},
              {"p_phi", o.pphi},
              {"amplitude", o.amplitude},
              {"ancilla_n_trunc", o.code == "binomial" ? 30 : 0},
              {"points", points}};
  emit(o.out, "fig4_" + o.state + "_" + o.code + "_" + o.sweep + ".csv", t, "fig4", argv, config);
}

struct OptimizeOptions {
  std::string scheme = "qubit_p";
  double sigma = 0.1;
  int d = 2;
  std::string basis = "half_shifted";
  std::string json_path;
};

void cmd_optimize(const OptimizeOptions& o, const std::vector<std::string>& argv, std::ostream& out) {
  OptimizedScheme best;
  if (o.scheme == "qubit_p") {
    best = optimize_qubit_p(o.sigma);
  } else if (o.scheme == "two_qubit") {
    best = optimize_two_qubit(o.sigma);
  } else if (o.scheme == "squeezed") {
    best = optimize_squeezed(o.sigma);
  } else {
    if (o.d < 2 || o.d > 32) throw std::invalid_argument("--d must lie in [2, 32]");
    best = optimize_qudit(o.sigma, o.d, parse_basis(o.basis));
  }
  json result{{"scheme", o.scheme},
              {"sigma", o.sigma},
              {"alpha", best.alpha},
              {"alpha_q", best.alpha_q},
              {"zeta", best.zeta},
              {"squeezing_db", squeezing_db(best.zeta)},
              {"var_q", best.noise.var_q},
              {"var_p", best.noise.var_p},
              {"total", best.noise.total()},
              {"interior", best.interior}};
  if (o.scheme == "qudit") {
    result["d"] = o.d;
    result["basis"] = o.basis;
  }
  out << result.dump(2) << "\n";
  if (!o.json_path.empty()) {
    json side{{"command", "optimize"}, {"argv", argv}, {"result", result}, {"version", CVQEC_VERSION_STRING}};
    write_file(o.json_path, side.dump(2) + "\n");
  }
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Displacement-noise correction simulator", "cvqec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CVQEC_VERSION_STRING));

  Fig2Options f2;
  auto* fig2 = app.add_subcommand("fig2", "Corrected distribution and variance-vs-alpha curve");
  fig2->add_option("--sigma", f2.sigma, "Noise width")->check(CLI::PositiveNumber);
  fig2->add_option("--alpha-points", f2.alpha_points)->check(CLI::Range(3, 100000));
  fig2->add_option("--beta-points", f2.beta_points)->check(CLI::Range(3, 100000));
  fig2->add_option("-o,--out", f2.out, "Output directory");

  Fig3Options f3;
  auto* fig3 = app.add_subcommand("fig3", "Qudit variance against d with the analytic bound");
  fig3->add_option("--sigma", f3.sigma)->check(CLI::PositiveNumber);
  fig3->add_option("--dmax", f3.dmax);
  fig3->add_option("--s", f3.s);
  fig3->add_option("--basis", f3.basis)->check(CLI::IsMember({"standard", "half_shifted"}));
  fig3->add_option("-o,--out", f3.out);

  Fig4Options f4;
  auto* fig4 = app.add_subcommand("fig4", "Trajectory infidelity with a noisy or encoded ancilla");
  fig4->add_option("--state", f4.state)->check(CLI::IsMember({"coherent", "fock1"}));
  fig4->add_option("--code", f4.code)->check(CLI::IsMember({"none", "three_qubit", "binomial", "shor"}));
  fig4->add_option("--sweep", f4.sweep)->check(CLI::IsMember({"pphi", "sigma"}));
  fig4->add_option("--scheme", f4.scheme)->check(CLI::IsMember({"qubit_p", "squeezed"}));
  fig4->add_option("--engine", f4.engine)->check(CLI::IsMember({"branch", "direct"}));
  fig4->add_option("--trajectories", f4.trajectories)->check(CLI::PositiveNumber);
  fig4->add_option("--seed", f4.seed);
  fig4->add_option("--sigma", f4.sigma)->check(CLI::PositiveNumber);
  fig4->add_option("--pphi", f4.pphi)->check(CLI::Range(0.0, 0.5));
  fig4->add_option("--amplitude", f4.amplitude);
  fig4->add_option("--values", f4.values, "Sweep points")->delimiter(',');
  fig4->add_option("-o,--out", f4.out);

  OptimizeOptions op;
  auto* optimize = app.add_subcommand("optimize", "Optimal protocol parameters");
  optimize->add_option("--scheme", op.scheme)->check(CLI::IsMember({"qubit_p", "two_qubit", "squeezed", "qudit"}));
  optimize->add_option("--sigma", op.sigma)->check(CLI::PositiveNumber);
  optimize->add_option("--d", op.d);
  optimize->add_option("--basis", op.basis)->check(CLI::IsMember({"standard", "half_shifted"}));
  optimize->add_option("--json", op.json_path, "Also write the result here");

  std::string sidecar;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "Re-run the invocation recorded in a sidecar");
  replay->add_option("sidecar", sidecar)->required();
  replay->add_option("-o,--out", replay_out, "Output directory (default: the sidecar's)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    const std::vector<std::string> argv = strip_out(args);
    if (*fig2) cmd_fig2(f2, argv);
    if (*fig3) cmd_fig3(f3, argv);
    if (*fig4) cmd_fig4(f4, argv);
    if (*optimize) cmd_optimize(op, argv, out);
    if (*replay) {
      std::ifstream f(sidecar);
      if (!f) throw IoError("cannot read " + sidecar);
      json side;
      try {
        side = json::parse(f);
      } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed sidecar: ") + e.what());
      }
      if (!side.contains("argv") || !side["argv"].is_array()) throw std::invalid_argument("sidecar has no argv");
      std::vector<std::string> again = side["argv"].get<std::vector<std::string>>();
      if (!again.empty() && (again.front() == "replay" || again.front() == "optimize")) {
        throw std::invalid_argument("sidecar does not describe a file-producing command");
      }
      const fs::path parent = fs::path(sidecar).parent_path();
      again.push_back("--out");
      again.push_back(replay_out.empty() ? (parent.empty() ? "." : parent.string()) : replay_out);
      return run(again, out, err);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : bad_arguments;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return io_failure;
  } catch (const TruncationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return bad_arguments;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return bad_arguments;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return numerical_failure;
  }
  return ok;
}

}  // namespace cvqec::cli
