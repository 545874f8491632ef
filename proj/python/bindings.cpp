#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvqec/dvcodes.hpp"
#include "cvqec/fock.hpp"
#include "cvqec/montecarlo.hpp"
#include "cvqec/protocol.hpp"

namespace py = pybind11;
using namespace cvqec;

namespace {

py::dict run_result_dict(const RunResult& r) {
  py::dict d;
  d["infidelity"] = r.infidelity.mean;
  d["infidelity_stderr"] = r.infidelity.std_error;
  d["var_q"] = r.var_q.mean;
  d["var_p"] = r.var_p.mean;
  d["var_p_stderr"] = r.var_p.std_error;
  d["n"] = r.infidelity.n;
  d["flagged_syndromes"] = r.flagged_syndromes;
  d["flagged_measurements"] = r.flagged_measurements;
  d["alpha"] = r.alpha;
  return d;
}

TrajectoryPlan make_plan(const ProtocolConfig& protocol, AncillaKind ancilla, double p_phi, std::int64_t n,
                         std::uint64_t seed, cplx amplitude) {
  TrajectoryPlan plan;
  plan.protocol = protocol;
  plan.ancilla = ancilla;
  plan.p_phi = p_phi;
  plan.n_trajectories = n;
  plan.root_seed = seed;
  plan.amplitude = amplitude;
  return plan;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Displacement-noise correction with qubit and qudit ancillas";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_ArithmeticError);

  py::enum_<SchemeKind>(m, "SchemeKind")
      .value("qubit_p", SchemeKind::qubit_p)
      .value("two_qubit", SchemeKind::two_qubit)
      .value("squeezed_qubit", SchemeKind::squeezed_qubit)
      .value("qudit", SchemeKind::qudit);
  py::enum_<StateKind>(m, "StateKind").value("coherent", StateKind::coherent).value("fock1", StateKind::fock1);
  py::enum_<FourierBasis>(m, "FourierBasis")
      .value("standard", FourierBasis::standard)
      .value("half_shifted", FourierBasis::half_shifted);
  py::enum_<AncillaKind>(m, "AncillaKind")
      .value("perfect", AncillaKind::perfect)
      .value("bare_qubit", AncillaKind::bare_qubit)
      .value("three_qubit", AncillaKind::three_qubit)
      .value("binomial", AncillaKind::binomial)
      .value("shor", AncillaKind::shor);
  py::enum_<YOutcome>(m, "YOutcome").value("plus", YOutcome::plus).value("minus", YOutcome::minus);
  py::enum_<CodeName>(m, "CodeName")
      .value("unencoded", CodeName::unencoded)
      .value("three_qubit_phase", CodeName::three_qubit_phase)
      .value("shor9", CodeName::shor9)
      .value("binomial_n3", CodeName::binomial_n3);

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init<>())
      .def_readwrite("scheme", &ProtocolConfig::scheme)
      .def_readwrite("sigma", &ProtocolConfig::sigma)
      .def_readwrite("alpha", &ProtocolConfig::alpha)
      .def_readwrite("alpha_q", &ProtocolConfig::alpha_q)
      .def_readwrite("zeta", &ProtocolConfig::zeta)
      .def_readwrite("d", &ProtocolConfig::d)
      .def_readwrite("basis", &ProtocolConfig::basis)
      .def_readwrite("state_kind", &ProtocolConfig::state_kind)
      .def("validate", &ProtocolConfig::validate);

  py::class_<CorrectedNoise>(m, "CorrectedNoise")
      .def_readonly("var_q", &CorrectedNoise::var_q)
      .def_readonly("var_p", &CorrectedNoise::var_p)
      .def_property_readonly("total", &CorrectedNoise::total)
      .def("__repr__", [](const CorrectedNoise& n) {
        return "CorrectedNoise(var_q=" + std::to_string(n.var_q) + ", var_p=" + std::to_string(n.var_p) + ")";
      });

  py::class_<OptimizedScheme>(m, "OptimizedScheme")
      .def_readonly("alpha", &OptimizedScheme::alpha)
      .def_readonly("alpha_q", &OptimizedScheme::alpha_q)
      .def_readonly("zeta", &OptimizedScheme::zeta)
      .def_readonly("noise", &OptimizedScheme::noise)
      .def_readonly("interior", &OptimizedScheme::interior);

  m.def("optimal_qubit_alpha", &optimal_qubit_alpha, py::arg("sigma"));
  m.def("optimal_squeezing", &optimal_squeezing);
  m.def("squeezing_db", &squeezing_db, py::arg("zeta"));
  m.def("qubit_filter", &qubit_filter, py::arg("beta"), py::arg("alpha"), py::arg("outcome"));
  m.def("qudit_filter", &qudit_filter, py::arg("beta"), py::arg("alpha"), py::arg("d"), py::arg("l"),
        py::arg("basis") = FourierBasis::standard);

  m.def("run_qubit_p_scheme", &run_qubit_p_scheme, py::arg("sigma"), py::arg("alpha"));
  m.def("run_two_qubit_scheme", &run_two_qubit_scheme, py::arg("sigma"), py::arg("alpha_q"), py::arg("alpha_p"));
  m.def("run_squeezed_scheme", &run_squeezed_scheme, py::arg("sigma"), py::arg("alpha"), py::arg("zeta"));
  m.def("run_qudit_scheme", &run_qudit_scheme, py::arg("sigma"), py::arg("alpha"), py::arg("d"),
        py::arg("basis") = FourierBasis::half_shifted);
  m.def("run_scheme", &run_scheme, py::arg("config"));
  m.def("qudit_bound", &qudit_bound, py::arg("sigma"), py::arg("s"), py::arg("d"));
  m.def("infidelity_from_noise", &infidelity_from_noise, py::arg("kind"), py::arg("noise"));
  m.def(
      "exact_infidelity",
      [](StateKind kind, const ProtocolConfig& config) {
        const CorrectedDistributions dist = corrected_distributions(config);
        return exact_infidelity(kind, dist.q, dist.p);
      },
      py::arg("kind"), py::arg("config"));

  m.def("optimize_qubit_p", &optimize_qubit_p, py::arg("sigma"), py::arg("tol") = 1e-9);
  m.def("optimize_two_qubit", &optimize_two_qubit, py::arg("sigma"), py::arg("tol") = 1e-9);
  m.def("optimize_squeezed", &optimize_squeezed, py::arg("sigma"), py::arg("tol") = 1e-9);
  m.def("optimize_qudit", &optimize_qudit, py::arg("sigma"), py::arg("d"),
        py::arg("basis") = FourierBasis::half_shifted, py::arg("tol") = 1e-9);

  m.def(
      "displacement_operator", [](cplx beta, int n_trunc) { return displacement_operator(beta, n_trunc).matrix; },
      py::arg("beta"), py::arg("n_trunc"));
  m.def(
      "squeeze_operator", [](double zeta, int n_trunc) { return squeeze_operator(zeta, n_trunc).matrix; },
      py::arg("zeta"), py::arg("n_trunc"));
  m.def("overlap_f", &overlap_f, py::arg("kind"), py::arg("beta"));

  py::class_<CodeSpec, std::shared_ptr<CodeSpec>>(m, "CodeSpec")
      .def_property_readonly("name", &CodeSpec::name)
      .def_property_readonly("dim", &CodeSpec::dim)
      .def_property_readonly("logical_g", [](const CodeSpec& c) { return CVector(c.logical_g()); })
      .def_property_readonly("logical_e", [](const CodeSpec& c) { return CVector(c.logical_e()); })
      .def(
          "encode", [](const CodeSpec& c, const CVector& logical) { return CVector(encode(c, logical).amplitudes()); },
          py::arg("logical"))
      .def(
          "recover",
          [](const CodeSpec& c, const CMatrix& rho) { return CMatrix(recover(c, DensityMatrix(rho, 1e-8)).first.matrix()); },
          py::arg("rho"))
      .def(
          "knill_laflamme_violation",
          [](const CodeSpec& c, const std::vector<CMatrix>& errors) { return knill_laflamme_violation(c, errors); },
          py::arg("errors"));
  m.def(
      "make_code",
      [](CodeName name) { return std::const_pointer_cast<CodeSpec>(make_code(name)); }, py::arg("name"));
  m.def("logical_flip_probability_three_qubit", &logical_flip_probability_three_qubit, py::arg("p_phi"));

  m.def(
      "run_concatenated",
      [](const ProtocolConfig& protocol, AncillaKind ancilla, double p_phi, std::int64_t n, std::uint64_t seed,
         cplx amplitude) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_concatenated(make_plan(protocol, ancilla, p_phi, n, seed, amplitude));
        }
        return run_result_dict(r);
      },
      py::arg("protocol"), py::arg("ancilla") = AncillaKind::perfect, py::arg("p_phi") = 0.0, py::arg("n") = 1000,
      py::arg("seed") = 1, py::arg("amplitude") = cplx(0.0));
  m.def(
      "branch_decomposition_run",
      [](const ProtocolConfig& protocol, AncillaKind ancilla, double p_phi, std::int64_t n, std::uint64_t seed,
         cplx amplitude) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = branch_decomposition_run(make_plan(protocol, ancilla, p_phi, n, seed, amplitude));
        }
        return run_result_dict(r);
      },
      py::arg("protocol"), py::arg("ancilla") = AncillaKind::perfect, py::arg("p_phi") = 0.0, py::arg("n") = 1000,
      py::arg("seed") = 1, py::arg("amplitude") = cplx(0.0));
}
