"""Eigenstates of u K- + v K+ + w K3: parameters, recurrence, closed form, special families."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from gensqueeze.errors import NonConvergent, NotNormalizable, ZeroLoweringCoefficient
from gensqueeze.fock import LadderBasis, StateVector, build_su11_generators, expectation
from gensqueeze.su11 import (Su11Params, bg_cs, build_state, characteristic_roots,
                             closed_form_unnormalized,
                             coefficients_closed_form, derive, eigen_residual, even_odd_state,
                             generic_z_allowed,
                             is_normalizable, k1k2_is, killing, ladder_to_fock, mean_k3_closed,
                             norm_inverse_closed, squeezed_cat_direct, squeezed_cat_params,
                             su11_cs_eigenvalue, su11_cs_state)

KS = [0.25, 0.5, 0.75, 1.0, 1.5]


def test_killing_invariant_examples():
    assert killing(1, 0, 0) == 0
    # u = 1, v = -1: w^2 - 4uv = 4
    assert killing(1, -1, 0) == pytest.approx(2)
    # u = 1, v = 1: l = 2i, c = -i, zeta = 2
    l = killing(1, 1, 0)
    assert l == pytest.approx(2j)
    c = -(0 + l) / 2
    assert c == pytest.approx(-1j)
    assert 2 * l / (0 + l) == pytest.approx(2)
    assert 2 * l / (0 + l) == pytest.approx(-l / (1 * c))


@pytest.mark.parametrize("x", [0.0, 0.5, 1.0, 3.0, 6.0])
def test_killing_squares(x):
    u, v = math.sqrt(1 + x * x), -x
    assert abs(killing(u, v, 0) ** 2 - (-4 * u * v)) < 1e-14 * max(1, 4 * u * x)


def test_derived_consistency():
    p = Su11Params(0.3 + 0.1j, 1.2, 0.4 - 0.2j, 0.3, 0.75)
    d = derive(p)
    assert abs(d.l ** 2 - (p.w ** 2 - 4 * p.u * p.v)) < 1e-14
    assert abs(d.zeta + d.l / (p.u * d.c)) < 1e-14
    assert d.s == pytest.approx(-abs(d.c) ** 2)


@pytest.mark.parametrize("uvw,ok", [
    ((1, 0.5, 0), True),
    ((1, -1, 0), False),
    ((0.1, 1, 0), False),
    ((1, 1, 0), False),
])
def test_normalizability_examples(uvw, ok):
    u, v, w = uvw
    flag, margin = is_normalizable(SimpleNamespace(u=u, v=v, w=w))
    assert flag is ok
    assert (margin > 0) is ok
    if ok:
        Su11Params(0.1, u, v, w, 0.25)
    else:
        with pytest.raises(NotNormalizable) as e:
            Su11Params(0.1, u, v, w, 0.25)
        assert e.value.margin <= 0


def test_zero_lowering_rejected():
    with pytest.raises(ZeroLoweringCoefficient):
        Su11Params(0, 0, 1, 1, 0.5)


@pytest.mark.parametrize("k", KS)
def test_bg_at_zero_is_lowest_weight(k):
    s = build_state(bg_cs(0, k), 32)
    assert abs(s.amplitudes[0]) == pytest.approx(1)
    assert np.max(np.abs(s.amplitudes[1:])) == 0


def test_bg_series_coefficients():
    k, z = 1.0, 1.0
    s = build_state(bg_cs(z, k), 64)
    m = np.arange(s.basis.dim)
    ref = np.exp(m * np.log(z) + 0.5 * (gammaln(2 * k) - gammaln(m + 1) - gammaln(m + 2 * k)))
    ref /= np.linalg.norm(ref)
    assert np.max(np.abs(s.amplitudes - ref)) < 1e-14


def test_closed_form_low_orders():
    p = Su11Params(0.4 - 0.3j, 1.1, 0.3 + 0.2j, 0.2 - 0.1j, 0.75)
    d = derive(p)
    g = closed_form_unnormalized(p, 4)
    k = p.k
    assert abs(g[0] - 1) < 1e-14
    g1 = d.c * math.sqrt(2 * k) * (1 - d.a * d.zeta / (2 * k))
    assert abs(g[1] - g1) < 1e-13


def random_params(rng, k):
    while True:
        u = complex(rng.uniform(0.5, 2)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        v = u * 0.8 * rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        w = 0.5 * abs(u) * rng.uniform(-1, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        z = rng.uniform(-2, 2) + 1j * rng.uniform(-2, 2)
        try:
            p = Su11Params(z, u, v, w, k)
        except NotNormalizable:
            continue
        # keep the slower root away from the unit circle so 4096 levels suffice
        if generic_z_allowed(p) and max(map(abs, characteristic_roots(p.u, p.v, p.w))) < 0.95:
            return p


@pytest.mark.parametrize("seed", range(10))
def test_closed_form_matches_recurrence(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng, KS[seed % len(KS)])
    rec = build_state(p, 64)
    cf = coefficients_closed_form(p, rec.basis)
    ph = np.vdot(cf.amplitudes, rec.amplitudes)
    assert np.max(np.abs(cf.amplitudes * ph / abs(ph) - rec.amplitudes)) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_closed_form_branch_independent(seed):
    rng = np.random.default_rng(100 + seed)
    p = random_params(rng, 0.5)
    M = 48
    a = closed_form_unnormalized(p, M, branch=1)
    b = closed_form_unnormalized(p, M, branch=-1)
    a, b = np.array(a, complex), np.array(b, complex)
    assert np.max(np.abs(a / np.linalg.norm(a) - b / np.linalg.norm(b))) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_norm_and_mean_closed(seed):
    rng = np.random.default_rng(200 + seed)
    p = random_params(rng, KS[seed])
    M = 800
    g = np.array(closed_form_unnormalized(p, M), complex)
    assert float(norm_inverse_closed(p)) == pytest.approx(np.sum(np.abs(g) ** 2), rel=1e-10)
    st_ = build_state(p, M)
    gens = build_su11_generators(st_.basis)
    assert mean_k3_closed(p) == pytest.approx(expectation(st_, gens["K3"]).real, rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), k=st.sampled_from(KS))
def test_eigen_residual_property(seed, k):
    p = random_params(np.random.default_rng(seed), k)
    s = build_state(p)
    assert s.norm == pytest.approx(1, abs=1e-12)
    assert eigen_residual(s, p) < 1e-8


def test_even_odd_trivial():
    ev = even_odd_state(0, 1, 0, 0, "even", 16)
    od = even_odd_state(0, 1, 0, 0, "odd", 16)
    assert abs(ev.amplitudes[0]) == pytest.approx(1)
    assert abs(od.amplitudes[1]) == pytest.approx(1)


@pytest.mark.parametrize("x", np.linspace(0, 6, 7))
def test_fig1a_family_residual(x):
    p = Su11Params(1, math.sqrt(1 + x * x), -x, 0, 0.25)
    assert eigen_residual(build_state(p), p) < 1e-8


def test_fig2a_photon_number():
    s = even_odd_state(-0.5 - 5j, math.sqrt(1.25), -0.5, 0, "even")
    n = np.arange(s.basis.dim)
    assert np.sum(n * np.abs(s.amplitudes) ** 2) == pytest.approx(7.06, abs=0.02)


def test_squeezed_cat_params_values():
    p = squeezed_cat_params(0.5, 0.31)
    assert p.u.real == pytest.approx(1.0990, abs=5e-4)
    assert abs(p.w) == pytest.approx(0.6605, abs=1e-4)
    # the combination annihilating S|z> carries -sinh(2r) e^{i theta} on K3
    assert p.w.real < 0
    q = squeezed_cat_params(0.5, 0)
    assert (q.u, q.v, q.w) == (1, 0, 0)


@pytest.mark.parametrize("parity", ["even", "odd"])
@pytest.mark.parametrize("z,zeta", [(-0.3, 0.31), (0.8 + 0.2j, 0.2 * np.exp(0.7j))])
def test_squeezed_cat_matches_squeeze_operator(parity, z, zeta):
    k = 0.25 if parity == "even" else 0.75
    rec = ladder_to_fock(build_state(squeezed_cat_params(z, zeta, k), 64), parity)
    direct = squeezed_cat_direct(z, zeta, parity, 300)
    m = min(rec.basis.dim, direct.basis.dim)
    assert abs(np.vdot(rec.amplitudes[:m], direct.amplitudes[:m])) > 1 - 1e-10


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("u,v", [(1.2, 0.5), (1.0, -0.4 + 0.3j), (np.sqrt(2), 1)])
def test_su11_coherent_state_eigenvalue(k, u, v):
    z = su11_cs_eigenvalue(u, v, k)
    xi = np.sqrt(complex(-v / u))
    basis = LadderBasis(k, 400, allow_any_k=True)
    cs = su11_cs_state(xi, basis)
    p = k1k2_is(z, u, v, k)
    assert eigen_residual(cs, p) < 1e-8
    s = build_state(p)
    m = min(s.basis.dim, cs.basis.dim)
    assert abs(np.vdot(s.amplitudes[:m], cs.amplitudes[:m])) > 1 - 1e-10


def test_k1k2_is_example():
    p = k1k2_is(1, math.sqrt(2), 1, 0.5)
    assert eigen_residual(build_state(p), p) < 1e-8



def test_slow_decay_reports_nonconvergence():
    # root modulus 0.9954: 4096 levels leave an edge residual near 6e-6
    p = Su11Params(1.30309807990685 + 1.2956392138878585j, 1.3050035562635374 - 1.077337404380425j,
                   1.0464993338528208 - 0.7242105995636539j, -0.03770741972336975 - 0.4784011997344j,
                   0.25)
    with pytest.raises(NonConvergent):
        build_state(p)
