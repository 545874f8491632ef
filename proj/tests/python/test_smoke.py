import math

import numpy as np
import pytest

import cvqec


def test_qubit_optimum():
    o = cvqec.optimize_qubit_p(0.1)
    assert o.alpha == pytest.approx(1 / (2 * math.sqrt(2) * 0.1), rel=1e-6)
    assert o.noise.var_p == pytest.approx((1 - math.exp(-1)) * 0.01 / 2, abs=1e-10)
    assert o.noise.var_q == pytest.approx(0.005, abs=1e-15)


def test_squeezed_optimum():
    o = cvqec.optimize_squeezed(0.1)
    assert o.zeta == pytest.approx(math.log(1 - math.exp(-1)) / 8, abs=1e-6)
    assert o.noise.var_q == pytest.approx(o.noise.var_p, abs=1e-9)
    assert cvqec.squeezing_db(o.zeta) == pytest.approx(0.996, abs=1e-3)


def test_config_round_trip_and_validation():
    c = cvqec.ProtocolConfig()
    c.scheme = cvqec.SchemeKind.qubit_p
    c.sigma = 0.1
    c.alpha = cvqec.optimal_qubit_alpha(0.1)
    n = cvqec.run_scheme(c)
    assert n.var_p == pytest.approx(cvqec.run_qubit_p_scheme(0.1, c.alpha).var_p, abs=1e-15)
    assert cvqec.exact_infidelity(cvqec.StateKind.coherent, c) == pytest.approx(
        cvqec.infidelity_from_noise(cvqec.StateKind.coherent, n), abs=5e-4
    )
    c.sigma = -1.0
    with pytest.raises(Exception):
        cvqec.run_scheme(c)


def test_operators_are_numpy_arrays():
    d = cvqec.displacement_operator(0.3 + 0.2j, 30)
    assert isinstance(d, np.ndarray)
    assert d.shape == (31, 31)
    lower = d[:, :10]
    assert np.allclose(lower.conj().T @ lower, np.eye(10), atol=1e-8)


def test_codes():
    shor = cvqec.make_code(cvqec.CodeName.shor9)
    assert shor.dim == 512
    assert abs(np.vdot(shor.logical_g, shor.logical_e)) < 1e-12
    three = cvqec.make_code(cvqec.CodeName.three_qubit_phase)
    psi = three.encode(np.array([1, 1], dtype=complex) / math.sqrt(2))
    rho = np.outer(psi, psi.conj())
    out = three.recover(rho)
    assert np.real(np.vdot(psi, out @ psi)) == pytest.approx(1.0, abs=1e-12)
    assert cvqec.logical_flip_probability_three_qubit(0.1) == pytest.approx(0.028, abs=1e-15)


def test_trajectory_run_is_reproducible():
    c = cvqec.ProtocolConfig()
    c.scheme = cvqec.SchemeKind.squeezed_qubit
    c.sigma = 0.1
    c.zeta = cvqec.optimal_squeezing()
    a = cvqec.branch_decomposition_run(c, cvqec.AncillaKind.three_qubit, p_phi=0.05, n=500, seed=3)
    b = cvqec.branch_decomposition_run(c, cvqec.AncillaKind.three_qubit, p_phi=0.05, n=500, seed=3)
    assert a == b
    assert a["n"] == 500
    assert 0.0 < a["infidelity"] < 0.1
