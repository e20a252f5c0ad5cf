"""Verification suites: each check compares a computed value with a tolerance.

The same functions back the ``verify`` CLI command and the acceptance tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
import mpmath as mp

from . import canonical as cn
from .errors import GenSqueezeError
from .figures import FIG2A, FIG2B, fig1a, fig1b, fig2a, fig2b
from .fock import (FockBasis, LadderBasis, StateVector, build_boson_operators,
                   build_one_mode_quadratic, build_su11_generators, quadratic_generators)
from .moments import (cat_variances, closed_form_k_variances, direct_fock_variances,
                      hermitian_eigenstate_mp, k_trio_determinants_mp, quadrature_variances,
                      uncertainty_matrix)
from .scheme import (SchemeConfig, cancelling_gamma2, physical_for_chi, scheme_targets,
                     simulate_scheme, unmodified_eigenvalue, verify_scheme_output)
from .su11 import (Su11Params, build_state, closed_form_unnormalized, eigen_residual,
                   even_odd_state, ladder_to_fock, mean_k3_closed, squeezed_cat_params)

K_CHOICES = (0.25, 0.75, 0.5, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class Check:
    """One verified quantity.

    Attributes:
        name: short identifier.
        value: measured value.
        tolerance: bound the value is compared with.
        passed: outcome.
        detail: free-form note (comparison direction, counts).
    """

    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: value={self.value:.6g} tol={self.tolerance:.3g} {self.detail}".rstrip()

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "passed": self.passed, "detail": self.detail}


def _below(name, value, tol, detail=""):
    return Check(name, float(value), tol, bool(value < tol), detail or "(value < tol)")


def _above(name, value, tol, detail=""):
    return Check(name, float(value), tol, bool(value > tol), detail or "(value > tol)")


def _near(name, value, target, tol):
    ok = value is not None and np.isfinite(value) and abs(value - target) <= tol
    v = float("nan") if value is None else float(value)
    return Check(name, v, tol, bool(ok), f"(|value - {target}| <= tol)")


# --------------------------------------------------------------- samplers

def random_su11(rng: np.random.Generator, radius: float = 0.8, zmax: float = 3.0,
                w_zero: bool = False, ks=K_CHOICES) -> Su11Params:
    """Random combination with both characteristic roots inside |t| < radius."""
    t1, t2 = (radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
              for _ in range(2))
    if w_zero:
        t2 = -t1
    u = rng.uniform(0.5, 2) * np.exp(2j * np.pi * rng.uniform())
    w = 0 if w_zero else -u * (t1 + t2)
    v = u * t1 * t2
    z = zmax * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    return Su11Params(z, u, v, w, float(rng.choice(ks)))


def random_samples(n: int = 200, seed: int = 20240611) -> list[Su11Params]:
    rng = np.random.default_rng(seed)
    return [random_su11(rng) for _ in range(n)]


# --------------------------------------------------------------- criteria

def criterion_1(samples=None) -> list[Check]:
    """Eigen-residual of recurrence states for random normalizable parameters."""
    samples = samples or random_samples()
    t0 = time.perf_counter()
    worst = max(eigen_residual(build_state(p), p) for p in samples)
    dt = time.perf_counter() - t0
    return [_below("eigen_residual_max", worst, 1e-8, f"over {len(samples)} samples"),
            _below("eigen_residual_runtime_s", dt, 30.0)]


def closed_vs_recurrence(p: Su11Params) -> float:
    """Max per-amplitude deviation between the two constructions."""
    rec = build_state(p).amplitudes
    big = np.flatnonzero(np.abs(rec) > 1e-16)
    cut = min(len(rec) - 1, int(big.max()) + 2)
    g = closed_form_unnormalized(p, cut)
    g = g / np.linalg.norm(g)
    full = np.zeros_like(rec)
    full[: cut + 1] = g
    return float(np.max(np.abs(full - rec)))


def criterion_2(samples=None) -> list[Check]:
    samples = samples or random_samples()
    worst = max(closed_vs_recurrence(p) for p in samples)
    return [_below("closed_form_vs_recurrence_max", worst, 1e-10, f"over {len(samples)} samples")]


def _rel(a, b, scale):
    return abs(a - b) / max(abs(scale), 1e-300)


def criterion_3(n: int = 200, seed: int = 7) -> list[Check]:
    """Closed second-moment formulas against direct matrix evaluation."""
    rng = np.random.default_rng(seed)
    w29 = w30 = w32 = 0.0
    for _ in range(n):
        p = random_su11(rng, w_zero=True)
        st = build_state(p)
        g = build_su11_generators(st.basis)
        rep = uncertainty_matrix(st, [g["K1"], g["K2"]])
        k3 = float(np.sum((p.k + np.arange(st.basis.dim)) * np.abs(st.amplitudes) ** 2))
        cf = closed_form_k_variances(p, k3)
        scale = np.max(np.abs(rep.sigma))
        w29 = max(w29, _rel(cf["var_K1"], rep.sigma[0, 0], scale),
                  _rel(cf["var_K2"], rep.sigma[1, 1], scale),
                  _rel(cf["cov_K1K2"], rep.sigma[0, 1], scale))

        q = random_su11(rng, w_zero=True, ks=(0.25, 0.75))
        st = build_state(q)
        fock = ladder_to_fock(st, "even" if q.k == 0.25 else "odd")
        d = direct_fock_variances(fock)
        k3 = float(np.sum((q.k + np.arange(st.basis.dim)) * np.abs(st.amplitudes) ** 2))
        cf = quadrature_variances(q, k3)
        w30 = max(w30, _rel(cf["var_q"], d["var_q"], d["var_q"]),
                  _rel(cf["var_p"], d["var_p"], d["var_p"]))

        z = 2 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        zs = 0.8 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
        parity = "even" if rng.uniform() < 0.5 else "odd"
        k = 0.25 if parity == "even" else 0.75
        fock = ladder_to_fock(build_state(squeezed_cat_params(z, zs, k)), parity)
        d = direct_fock_variances(fock)
        cf = cat_variances(fock)
        w32 = max(w32, *(_rel(cf[key], d[key], d[key]) for key in d))
    checks = [
        _below("k1k2_variances_closed_rel", w29, 1e-8, f"{n} w=0 states, relative to max|sigma|"),
        _below("quadrature_variances_closed_rel", w30, 1e-8, f"{n} parity states"),
        _below("cat_variances_closed_rel", w32, 1e-8, f"{n} squeezed cats"),
    ]
    worst = 0.0
    for _ in range(10):
        p = random_su11(rng, radius=0.6, zmax=1.5)
        st = build_state(p)
        direct = float(np.sum((p.k + np.arange(st.basis.dim)) * np.abs(st.amplitudes) ** 2))
        worst = max(worst, _rel(mean_k3_closed(p), direct, direct))
    checks.append(_below("mean_k3_closed_series_rel", worst, 1e-6, "10 states, s = -|c|^2"))
    return checks


def _random_state(rng, dim, support):
    amps = np.zeros(dim, complex)
    amps[:support] = (rng.normal(size=support) + 1j * rng.normal(size=support)) \
        * np.exp(-0.1 * np.arange(support))
    return amps / np.linalg.norm(amps)


def robertson_random(n: int = 1000, seed: int = 3) -> float:
    """Smallest normalized slack det sigma - det C over random states and sets."""
    rng = np.random.default_rng(seed)
    cutoff = 40
    ops = build_boson_operators(cutoff)
    g = quadratic_generators(FockBasis(cutoff))
    pool = [ops["q"], ops["p"], ops["n"], g["K1"], g["K2"], g["K3"]]
    worst = np.inf
    basis = FockBasis(cutoff)
    for _ in range(n):
        st = StateVector(basis, _random_state(rng, cutoff + 1, 30))
        size = int(rng.integers(2, 5))
        obs = []
        for _j in range(size):
            c = rng.normal(size=len(pool))
            acc = pool[0] * c[0]
            for cc, op in zip(c[1:], pool[1:]):
                acc = acc + op * cc
            obs.append(acc)
        rep = uncertainty_matrix(st, obs)
        worst = min(worst, rep.slack / max(1.0, abs(rep.det_c)))
    return float(worst)


def ris_saturation_mp(n_cases: int = 20, seed: int = 11, dps: int = 50) -> float:
    """Worst |det sigma - det C|/max(det C, 1e-12) for Hermitian combinations on (K1,K2,K3)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        u = rng.uniform(0.3, 1.0) * np.exp(2j * np.pi * rng.uniform())
        w = float(np.sign(rng.uniform(-1, 1)) * 2 * abs(u) * rng.uniform(1.3, 3.0))
        k = float(rng.choice(K_CHOICES))
        n = int(rng.integers(0, 4))
        coeffs = hermitian_eigenstate_mp(u, w, k, n, cutoff=160, dps=dps)
        with mp.workdps(dps):
            ds, dc, _ = k_trio_determinants_mp(coeffs, k, dps)
            worst = max(worst, float(abs(ds - dc) / max(dc, mp.mpf("1e-12"))))
    return worst


def ris_saturation_float(n_cases: int = 20, seed: int = 11) -> float:
    """Same ratio in double precision (recurrence states and sparse matrices)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        u = rng.uniform(0.3, 1.0) * np.exp(2j * np.pi * rng.uniform())
        w = float(np.sign(rng.uniform(-1, 1)) * 2 * abs(u) * rng.uniform(1.3, 3.0))
        k = float(rng.choice(K_CHOICES))
        n = int(rng.integers(0, 4))
        z = (k + n) * np.sign(w) * np.sqrt(w * w - 4 * abs(u) ** 2)
        p = Su11Params(z, u, np.conj(u), w, k)
        st = build_state(p, 160)
        g = build_su11_generators(st.basis)
        rep = uncertainty_matrix(st, [g["K1"], g["K2"], g["K3"]])
        worst = max(worst, rep.saturation)
    return worst


def criterion_4() -> list[Check]:
    slack = robertson_random()
    checks = [Check("robertson_min_slack", slack, -1e-9, slack >= -1e-9,
                    "(value >= tol), 1000 random states, n = 2..4")]
    checks.append(_below("ris_k_trio_saturation_extended_precision", ris_saturation_mp(), 1e-6,
                         "20 Hermitian combinations, 50-digit arithmetic"))
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        p = random_su11(rng, w_zero=True)
        st = build_state(p)
        g = build_su11_generators(st.basis)
        worst = max(worst, uncertainty_matrix(st, [g["K1"], g["K2"]]).saturation)
    checks.append(_below("k1k2_intelligent_saturation", worst, 1e-6, "100 w=0 states"))
    worst = 0.0
    for modes in (1, 2):
        for _ in range(3):
            b = cn.beta_from_M(cn.random_gaussian(rng, modes, 0.5))
            rep = cn.verify_hn_ris(b)
            worst = max(worst, abs(rep.slack) / rep.det_c)
    checks.append(_below("hN_ris_saturation", worst, 1e-8, "N = 1, 2"))
    return checks


def criterion_5(cutoff: int = 512) -> list[Check]:
    t0 = time.perf_counter()
    s = fig1a(cutoff=cutoff).summary
    dt = time.perf_counter() - t0
    return [_near("fig1a_Ktilde2_crossing", s["Ktilde2_crossing"], 1.8, 0.1),
            _near("fig1a_p_crossing", s["p_crossing"], 3.8, 0.1),
            Check("fig1a_joint_interval_nonempty", float(s["joint_interval"] is not None), 1, s["joint_interval"] is not None),
            _below("fig1a_runtime_s", dt, 60.0)]


def criterion_6() -> list[Check]:
    s = fig1b().summary
    ki, qi = s["Ktilde1_interval"] or [None, None], s["q_interval"] or [None, None]
    return [_near("fig1b_Ktilde1_low", ki[0], 0.10, 0.02),
            _near("fig1b_Ktilde1_high", ki[1], 0.31, 0.02),
            _near("fig1b_q_low", qi[0], 0.17, 0.02),
            _near("fig1b_q_high", qi[1], 0.51, 0.02)]


def criterion_7() -> list[Check]:
    s = fig2a().summary
    return [_near("fig2a_Q", s["Q"], -0.21, 0.01),
            _near("fig2a_mean_n", s["mean_n"], 7.06, 0.02),
            Check("fig2a_odd_mass", s["odd_mass"], 0.0, s["odd_mass"] == 0.0, "(exactly zero)")]


def criterion_8() -> list[Check]:
    s = fig2b().summary
    return [_above("fig2b_Q_positive", s["Q"], 0.0),
            _near("fig2b_mean_n", s["mean_n"], 6.88, 0.02)]


def quadratic_nullvector(p: Su11Params, ladder_cutoff: int) -> np.ndarray:
    """Null vector of the complete rows of (u K- + v K+ + w K3 - z) in the quadratic realization."""
    parity = "even" if p.k == 0.25 else "odd"
    fock_cut = 2 * ladder_cutoff if parity == "even" else 2 * ladder_cutoff + 2
    g = build_one_mode_quadratic(fock_cut, parity)
    A = (p.u * g["K-"] + p.v * g["K+"] + p.w * g["K3"]).identity_shift(p.z).dense()
    _, _, vh = np.linalg.svd(A[:-1])
    vec = vh[-1].conj()
    return vec / np.linalg.norm(vec)


def criterion_9(n: int = 40, seed: int = 9) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n):
        p = random_su11(rng, radius=0.7, zmax=2.0, ks=(0.25, 0.75))
        st = build_state(p, 64)
        vec = quadratic_nullvector(p, st.basis.cutoff)
        worst = max(worst, 1 - abs(np.vdot(vec, st.amplitudes)))
    return [_below("ladder_vs_quadratic_overlap_defect", worst, 1e-10, f"{n} states, k = 1/4, 3/4")]


def criterion_10(n: int = 50, seed: int = 10) -> list[Check]:
    rng = np.random.default_rng(seed)
    comm = ov = sig = 0.0
    for i in range(n):
        modes = (1, 2, 3, 4)[i % 4]
        g = cn.random_gaussian(rng, modes, 0.5)
        b = cn.beta_from_M(g)
        cad, caa = b.commutators()
        comm = max(comm, np.max(np.abs(cad - np.eye(modes))), np.max(np.abs(caa)))
        if modes <= 2:
            s1 = cn.gaussian_to_fock(g)
            s2 = cn.common_eigenstate_fock(b, 128)
            ov = max(ov, 1 - abs(np.vdot(s1.amplitudes, s2.amplitudes)))
            rep = cn.verify_hn_ris(b)
            sig = max(sig, np.max(np.abs(rep.sigma - cn.sigma_eq8(b))))
    return [_below("beta_from_M_commutator_residual", comm, 1e-12, f"{n} cases, N = 1..4"),
            _below("beta_from_M_common_eigenstate_defect", ov, 1e-8, "N <= 2"),
            _below("sigma_from_beta_vs_direct", sig, 1e-8, "N <= 2")]


def scheme_overlap(config: SchemeConfig, fig: dict) -> float:
    """|<target|figure>| for even states, 0 when the target state cannot be built."""
    t = scheme_targets(config)
    try:
        a = even_odd_state(t.z, t.u, t.v, 0, "even")
        b = even_odd_state(fig["z"], fig["u"], fig["v"], 0, "even")
    except GenSqueezeError:
        return 0.0
    m = min(len(a.amplitudes), len(b.amplitudes))
    return float(abs(np.vdot(a.amplitudes[:m], b.amplitudes[:m])))


FIG2A_SCHEME = SchemeConfig(1.08 * np.exp(2.374j), 1.01 + 0.36j, 0)
FIG2B_SCHEME = SchemeConfig(1.0004, 0.91, 0)


def criterion_11() -> list[Check]:
    checks = [_above("scheme_map_fig2a_overlap", scheme_overlap(FIG2A_SCHEME, FIG2A), 0.999),
              _above("scheme_map_fig2b_overlap", scheme_overlap(FIG2B_SCHEME, FIG2B), 0.999)]
    worst = 0.0
    for chi in (1.5, 1.08 * np.exp(2.374j), 3.0 * np.exp(-0.4j)):
        for n in range(4):
            cfg = SchemeConfig(chi, 0, n)
            t = scheme_targets(cfg)
            worst = max(worst, abs(t.eigenvalue - unmodified_eigenvalue(n, cfg.lam)))
    checks.append(_below("scheme_gamma1_zero_eigenvalue", worst, 1e-12, "n = 0..3, three chi"))
    worst = 0.0
    for n in range(4):
        cfg = SchemeConfig(1.5 * np.exp(0.7j), 0, n, 0)
        run = simulate_scheme(cfg, physical_for_chi(cfg.chi, 0.6, 0.4), (40, 60), gamma2=0)
        chk = verify_scheme_output(run.state, cfg.lam, 0)
        worst = max(worst, chk["residual"],
                    abs(chk["fitted_z"] * np.sqrt(cfg.lam) - unmodified_eigenvalue(n, cfg.lam)))
    checks.append(_below("scheme_gamma1_zero_simulated", worst, 1e-8, "n = 0..3, vacuum input"))
    return checks


SIM_CONFIG = SchemeConfig(1.5, 0.3, 0)


def criterion_12() -> list[Check]:
    cfg = SIM_CONFIG
    t = scheme_targets(cfg)
    phys = physical_for_chi(cfg.chi, 0.6)
    run = simulate_scheme(cfg, phys)
    chk = verify_scheme_output(run.state, cfg.lam, t.z)
    rel = abs(chk["fitted_z"] - t.z) / abs(t.z)
    bad = simulate_scheme(cfg, phys, gamma2=t.gamma2 + 0.2)
    neg = verify_scheme_output(bad.state, cfg.lam, t.z)
    return [_below("scheme_sim_A_variance", chk["a_variance"], 1e-6, "printed gamma2"),
            _below("scheme_sim_fitted_z_rel", rel, 1e-3),
            _above("scheme_sim_negative_control_residual", neg["residual"], 1e-2,
                   "gamma2 shifted by 0.2")]


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 13)}

SUITES = {
    "eigenresiduals": (1, 2, 9),
    "closedforms": (3,),
    "robertson": (4,),
    "canonical": (10,),
    "scheme": (11, 12),
    "figures": (5, 6, 7, 8),
}


def run_suite(name: str) -> list[Check]:
    """All checks of a named suite.

    Raises:
        KeyError: unknown suite.
    """
    out = []
    for i in SUITES[name]:
        out.extend(CRITERIA[i]())
    return out
