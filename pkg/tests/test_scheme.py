"""Generation scheme: control-to-target mapping and truncated two-mode simulation."""

import numpy as np
import pytest

from gensqueeze.errors import InvalidChi
from gensqueeze.fock import FockBasis, quadratic_generators
from gensqueeze.scheme import (SchemeConfig, cancelling_gamma2, chi_of_physical,
                               physical_for_chi, scheme_targets, simulate_scheme, su11_transform,
                               target_operator, unmodified_eigenvalue, verify_scheme_output)
from gensqueeze.su11 import even_odd_state

CHIS = [1.5, 1.08 * np.exp(2.374j), 3.0 * np.exp(-0.4j), 1.0004]


@pytest.mark.parametrize("chi", [0.5, 1.0, -1.0, 0.3j])
def test_invalid_chi(chi):
    with pytest.raises(InvalidChi):
        SchemeConfig(chi)


@pytest.mark.parametrize("chi", CHIS)
@pytest.mark.parametrize("g1", [0, 0.3, 1.01 + 0.36j])
def test_target_parameters(chi, g1):
    t = scheme_targets(SchemeConfig(chi, g1))
    assert 0 < t.lam < 1
    assert t.u ** 2 - t.v ** 2 == pytest.approx(1, abs=1e-12)
    assert t.v / t.u == pytest.approx((t.lam - 1) / (t.lam + 1))
    assert -1 < t.v / t.u < 0


@pytest.mark.parametrize("chi", CHIS)
@pytest.mark.parametrize("n", range(4))
def test_unmodified_reduction(chi, n):
    cfg = SchemeConfig(chi, 0, n)
    t = scheme_targets(cfg)
    assert abs(t.eigenvalue - unmodified_eigenvalue(n, cfg.lam)) < 1e-12
    assert t.k == (0.25 if n % 2 == 0 else 0.75)
    if n == 0:
        assert t.zeta == 0
        assert t.z == pytest.approx(0.25 * np.sqrt((1 - cfg.lam ** 2) / cfg.lam))


@pytest.mark.parametrize("chi", CHIS[:3])
def test_chi_round_trip(chi):
    phys = physical_for_chi(chi, 0.6, 0.4)
    assert abs(chi_of_physical(phys) - chi) < 1e-12


def test_zero_gain_projects_vacuum():
    cfg = SchemeConfig(1.5, 0, 0, 0)
    phys = {"g1t1": 0.0, "g2t2": 0.0, "theta1": 0.0, "theta2": 0.0}
    run = simulate_scheme(cfg, phys, (8, 40), gamma2=0)
    assert run.success_probability == pytest.approx(1)
    vac = np.zeros(41, complex)
    vac[0] = 1
    ref = su11_transform(vac, cfg.omega, cfg.phi, 40)
    assert abs(np.vdot(ref, run.state.amplitudes)) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("n", range(4))
def test_unmodified_simulation(n):
    cfg = SchemeConfig(1.5 * np.exp(0.7j), 0, n, 0)
    run = simulate_scheme(cfg, physical_for_chi(cfg.chi, 0.6, 0.4), (40, 60), gamma2=0)
    assert 0 < run.success_probability <= 1
    chk = verify_scheme_output(run.state, cfg.lam, unmodified_eigenvalue(n, cfg.lam) / np.sqrt(cfg.lam))
    assert chk["residual"] < 1e-8
    assert abs(chk["fitted_z"] * np.sqrt(cfg.lam) - unmodified_eigenvalue(n, cfg.lam)) < 1e-8
    assert chk["fidelity"] == pytest.approx(1, abs=1e-8)
    p = np.abs(run.state.amplitudes) ** 2
    wrong = p[1::2] if n % 2 == 0 else p[0::2]
    assert wrong.sum() < 1e-20


def test_analytic_state_self_consistent():
    lam = 0.6
    u, v = (lam + 1) / (2 * np.sqrt(lam)), (lam - 1) / (2 * np.sqrt(lam))
    z = 0.4 - 0.3j
    s = even_odd_state(z, u, v, 0, "even", 64)
    chk = verify_scheme_output(s, lam, z, k=0.25)
    assert chk["residual"] < 1e-8
    assert chk["fitted_z"] == pytest.approx(z, abs=1e-8)
    assert chk["fidelity"] == pytest.approx(1, abs=1e-10)


def test_target_operator_identity():
    # lambda K1 - i K2 = ((lambda+1) K- + (lambda-1) K+)/2
    lam = 0.37
    g = quadratic_generators(FockBasis(20))
    lhs = target_operator(lam, 20).dense()
    rhs = 0.5 * ((lam + 1) * g["K-"].dense() + (lam - 1) * g["K+"].dense())
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_cancelling_displacement_gives_gaussian_eigenstate():
    cfg = SchemeConfig(1.5, 0.3, 0)
    g2 = cancelling_gamma2(cfg)
    run = simulate_scheme(cfg, physical_for_chi(cfg.chi), (40, 60), gamma2=g2)
    chk = verify_scheme_output(run.state, cfg.lam, 0)
    assert chk["residual"] < 1e-8
    assert chk["fitted_z"] * np.sqrt(cfg.lam) == pytest.approx(0.25 * np.sqrt(1 - cfg.lam ** 2),
                                                                abs=1e-8)


def test_perturbed_displacement_breaks_eigenstate():
    cfg = SchemeConfig(1.5, 0.3, 0)
    g2 = cancelling_gamma2(cfg) + 0.2
    run = simulate_scheme(cfg, physical_for_chi(cfg.chi), (40, 60), gamma2=g2)
    assert verify_scheme_output(run.state, cfg.lam, 0)["residual"] > 1e-2
