"""Uncertainty matrices, closed-form variances, photon statistics and squeezing flags."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gensqueeze.errors import SingularB
from gensqueeze.fock import (FockBasis, LadderBasis, StateVector, build_boson_operators,
                             build_su11_generators, quadratic_generators)
from gensqueeze.moments import (cat_variances, closed_form_k_variances, direct_fock_variances,
                                hermitian_eigenstate_mp, k1k2_commutators,
                                k_trio_determinants_mp, ktilde_operators, mean_k3, photon_statistics,
                                quadrature_variances, sigma_from_beta, squeezing_predicates,
                                su11_beta, uncertainty_matrix)
from gensqueeze.su11 import (Su11Params, bg_cs, build_state, even_odd_state, ladder_to_fock,
                             squeezed_cat_params)


def vacuum(cutoff=20):
    return StateVector(FockBasis(cutoff), np.eye(cutoff + 1)[0])


def fig1a_state(x):
    return even_odd_state(1, math.sqrt(1 + x * x), -x, 0, "even")


def test_vacuum_qp_report():
    ops = build_boson_operators(20)
    rep = uncertainty_matrix(vacuum(), [ops["q"], ops["p"]], ("q", "p"))
    assert np.allclose(rep.sigma, np.diag([0.5, 0.5]), atol=1e-14)
    assert rep.det_c == pytest.approx(0.25, abs=1e-14)
    assert rep.slack == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("k", [0.25, 0.75, 1.0])
def test_k_trio_det_c_vanishes(k):
    basis = LadderBasis(k, 10)
    g = build_su11_generators(basis)
    psi = StateVector(basis, np.eye(11)[0])
    rep = uncertainty_matrix(psi, [g["K1"], g["K2"], g["K3"]])
    assert rep.det_c == pytest.approx(0, abs=1e-14)
    verdict = squeezing_predicates(rep, 1.0)
    assert verdict.relative is None


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(2, 4))
def test_robertson_inequality(seed, n):
    rng = np.random.default_rng(seed)
    M = 24
    basis = LadderBasis(0.5, M)
    g = build_su11_generators(basis)
    pool = [g["K1"], g["K2"], g["K3"]]
    obs = []
    for _ in range(n):
        c = rng.normal(size=3)
        obs.append(c[0] * pool[0] + c[1] * pool[1] + c[2] * pool[2])
    amps = (rng.normal(size=M + 1) + 1j * rng.normal(size=M + 1)) * np.exp(-np.arange(M + 1) / 2)
    rep = uncertainty_matrix(StateVector(basis, amps).normalized(), obs)
    assert np.allclose(rep.sigma, rep.sigma.T)
    assert np.all(np.diag(rep.sigma) >= -1e-12)
    assert rep.slack >= -1e-9 * max(1, abs(rep.det_c))


@pytest.mark.parametrize("p", [
    Su11Params(0.7 - 0.2j, 1.3, 0.4 + 0.5j, 0, 0.5),
    Su11Params(-1.0, math.sqrt(2), 1, 0, 1.0),
    Su11Params(0.3j, 1.0, -0.6, 0, 0.25),
])
def test_w_zero_states_saturate_k1k2(p):
    s = build_state(p)
    g = build_su11_generators(s.basis)
    rep = uncertainty_matrix(s, [g["K1"], g["K2"]])
    assert rep.saturation < 1e-8


@pytest.mark.parametrize("p", [
    Su11Params(0.7 - 0.2j, 1.3, 0.4 + 0.5j, 0, 0.5),
    Su11Params(2.0 + 1j, 1.1, -0.3, 0, 1.5),
    Su11Params(1, 1.0, 0, 0, 0.25),
])
def test_closed_k_variances(p):
    s = build_state(p)
    g = build_su11_generators(s.basis)
    rep = uncertainty_matrix(s, [g["K1"], g["K2"]])
    cf = closed_form_k_variances(p)
    assert cf["var_K1"] == pytest.approx(rep.sigma[0, 0], rel=1e-8)
    assert cf["var_K2"] == pytest.approx(rep.sigma[1, 1], rel=1e-8)
    assert cf["cov_K1K2"] == pytest.approx(rep.sigma[0, 1], abs=1e-8 * rep.sigma[0, 0])


def test_bg_k_variances():
    p = bg_cs(0.8 + 0.3j, 0.75)
    cf = closed_form_k_variances(p)
    k3 = mean_k3(p)
    assert cf["var_K1"] == pytest.approx(k3 / 2)
    assert cf["var_K2"] == pytest.approx(k3 / 2)
    assert cf["cov_K1K2"] == 0


def test_sigma_from_beta_matches_closed():
    p = Su11Params(0.5 + 0.5j, 1.2, 0.3 - 0.4j, 0, 0.75)
    k3 = mean_k3(p)
    sig = sigma_from_beta(su11_beta(p.u, p.v), k1k2_commutators(k3))
    cf = closed_form_k_variances(p, k3)
    assert sig[0, 0] == pytest.approx(cf["var_K1"], rel=1e-12)
    assert sig[1, 1] == pytest.approx(cf["var_K2"], rel=1e-12)
    assert sig[0, 1] == pytest.approx(cf["cov_K1K2"], abs=1e-12)


def test_sigma_from_beta_singular():
    with pytest.raises(SingularB):
        sigma_from_beta(np.array([[1.0, 1.0]]), k1k2_commutators(1.0))


@pytest.mark.parametrize("p", [
    Su11Params(1, math.sqrt(2), -1, 0, 0.25),
    Su11Params(-0.5 - 5j, math.sqrt(1.25), -0.5, 0, 0.25),
    Su11Params(0.4 + 0.2j, 1.2, 0.3j, 0, 0.75),
])
def test_quadrature_closed_vs_direct(p):
    parity = "even" if p.k == 0.25 else "odd"
    direct = direct_fock_variances(ladder_to_fock(build_state(p), parity))
    cf = quadrature_variances(p)
    assert cf["var_q"] == pytest.approx(direct["var_q"], rel=1e-8)
    assert cf["var_p"] == pytest.approx(direct["var_p"], rel=1e-8)


def test_vacuum_quadratures():
    v = quadrature_variances(Su11Params(0, 1, 0, 0, 0.25))
    assert v["var_q"] == pytest.approx(0.5)
    assert v["var_p"] == pytest.approx(0.5)
    c = cat_variances(even_odd_state(0, 1, 0, 0, "even", 8))
    assert c["var_Kt1"] == pytest.approx(1)
    assert c["var_Kt2"] == pytest.approx(1)


@pytest.mark.parametrize("z,zeta", [(-0.2, 0.31), (-0.6, 0.31), (0.5j, 0.2)])
def test_cat_variances_vs_direct(z, zeta):
    s = ladder_to_fock(build_state(squeezed_cat_params(z, zeta)), "even")
    a, b = cat_variances(s), direct_fock_variances(s)
    for key in ("var_q", "var_p", "var_Kt1", "var_Kt2"):
        assert a[key] == pytest.approx(b[key], rel=1e-8)


def test_fig1a_state_squeezing():
    v2 = direct_fock_variances(fig1a_state(2.0))
    assert v2["var_Kt2"] < 1
    assert v2["var_p"] < 0.5
    assert direct_fock_variances(fig1a_state(1.0))["var_p"] < 0.5
    # p squeezing ends within 0.1 of x = 3.8
    assert direct_fock_variances(fig1a_state(3.7))["var_p"] < 0.5
    assert direct_fock_variances(fig1a_state(3.9))["var_p"] > 0.5


def test_fig1a_ktilde_is_scaled_k2():
    p = Su11Params(1, math.sqrt(5), -2, 0, 0.25)
    s = build_state(p)
    g = build_su11_generators(s.basis)
    var_k2 = uncertainty_matrix(s, [g["K2"]]).sigma[0, 0]
    fock = direct_fock_variances(ladder_to_fock(s, "even"))
    assert fock["var_Kt2"] == pytest.approx(8 * var_k2, rel=1e-10)


def test_fig1b_joint_squeezing():
    s = ladder_to_fock(build_state(squeezed_cat_params(-0.2, 0.31)), "even")
    v = direct_fock_variances(s)
    assert 2 * v["var_q"] < 1 and v["var_Kt1"] < 1
    v6 = direct_fock_variances(ladder_to_fock(build_state(squeezed_cat_params(-0.6, 0.31)), "even"))
    assert v6["var_q"] >= 0.5


def test_squeezed_vacuum_double_intelligence():
    s = ladder_to_fock(build_state(squeezed_cat_params(0, 0.4 * np.exp(0.3j))), "even")
    ops = build_boson_operators(s.basis.cutoff)
    rep_qp = uncertainty_matrix(s, [ops["q"], ops["p"]])
    g = quadratic_generators(s.basis)
    rep_k = uncertainty_matrix(s, [g["K1"], g["K2"]])
    assert rep_qp.saturation < 1e-8
    assert rep_k.saturation < 1e-8


def test_photon_statistics_figures():
    a = photon_statistics(even_odd_state(-0.5 - 5j, math.sqrt(1.25), -0.5, 0, "even"))
    assert a.mandel_q == pytest.approx(-0.21, abs=0.01)
    assert a.distribution[1::2].sum() == 0
    b = photon_statistics(even_odd_state(1, math.sqrt(10), -3, 0, "even"))
    assert b.mandel_q > 0


def test_mean_k3_values():
    assert mean_k3(Su11Params(0, 1, 0, 0, 1.5)) == pytest.approx(1.5)
    k3 = mean_k3(Su11Params(-0.5 - 5j, math.sqrt(1.25), -0.5, 0, 0.25))
    assert k3 == pytest.approx((7.06 + 0.5) / 2, abs=0.01)


def test_squeezing_predicates():
    ops = build_boson_operators(20)
    rep = uncertainty_matrix(vacuum(), [ops["q"], ops["p"]])
    v = squeezing_predicates(rep, 1 / math.sqrt(2))
    assert v.absolute == (False, False) and not v.joint
    s = fig1a_state(2.0)
    d = direct_fock_variances(s)
    kt = ktilde_operators(s.basis)
    rep = uncertainty_matrix(s, [build_boson_operators(s.basis.cutoff)["p"], kt["Kt2"]])
    v = squeezing_predicates(rep, [1 / math.sqrt(2), 1.0])
    assert v.absolute == (True, True) and v.joint
    assert rep.variances[1] == pytest.approx(d["var_Kt2"], rel=1e-10)


def test_ideal_squeezing_k3_limit():
    # Hermitian combination with u -> 0: the eigenstate approaches a K3 eigenvector
    coeffs = hermitian_eigenstate_mp(1e-4, 1.0, 0.5, 0, 40)
    _, _, sigma = k_trio_determinants_mp(coeffs, 0.5)
    assert float(sigma[2, 2]) < 1e-6


@pytest.mark.parametrize("n", [0, 1, 3])
def test_ris_k_trio_extended_precision(n):
    coeffs = hermitian_eigenstate_mp(0.4 + 0.3j, 1.7, 0.75, n, 120)
    det_s, det_c, _ = k_trio_determinants_mp(coeffs, 0.75)
    assert abs(float(det_s - det_c)) / max(float(det_c), 1e-12) < 1e-6
