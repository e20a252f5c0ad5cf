"""Eigenstates |z,u,v,w;k> of u K- + v K+ + w K3 in the discrete series.

Two independent constructions are provided:

* the three-term recurrence for the ladder coefficients (seeded C_0 = 1),
  run forward when both characteristic roots lie inside the unit disk and
  by Miller's backward algorithm when only one does;
* the terminating Gauss series g_m = c^m sqrt((2k)_m/m!) 2F1(a, -m; 2k; zeta),
  evaluated with mpmath, which raises working precision internally. The
  alternating polynomial loses ~m*log10(3) digits in double precision, so a
  float64 evaluation is not used.
"""

from __future__ import annotations

import os
import json
from dataclasses import dataclass

import mpmath as mp
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import (DegenerateKilling, NonConvergent, NotNormalizable,
                     ZeroLoweringCoefficient)
from .fock import (DEFAULT_TAIL_TOL, FockBasis, LadderBasis, StateVector,
                   build_boson_operators, build_su11_generators, tail_mass)

CUTOFF_ENV = "GENSQUEEZE_CUTOFF"
DEFAULT_CUTOFF = 256
MAX_CUTOFF = 4096
_L_ZERO = 1e-14
EDGE_TOL = 1e-9


def default_cutoff() -> int:
    """Initial ladder cutoff; overridable through ``$GENSQUEEZE_CUTOFF``."""
    return int(os.environ.get(CUTOFF_ENV, DEFAULT_CUTOFF))


@dataclass(frozen=True)
class Su11Params:
    """Combination u K- + v K+ + w K3 with eigenvalue z in representation k.

    Construction validates u != 0 and the normalizability inequality
    |w - l| < 2|u| or |w + l| < 2|u|.
    """

    z: complex
    u: complex
    v: complex
    w: complex
    k: float

    def __post_init__(self):
        for name in ("z", "u", "v", "w"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "k", float(self.k))
        if abs(self.u) == 0:
            raise ZeroLoweringCoefficient("u = 0 is not supported")
        ok, margin = is_normalizable(self)
        if not ok:
            raise NotNormalizable(
                f"|w -+ l| >= 2|u| for (u,v,w)=({self.u},{self.v},{self.w})", margin)

    def to_json(self) -> str:
        pair = lambda c: [c.real, c.imag]
        return json.dumps({"z": pair(self.z), "u": pair(self.u), "v": pair(self.v),
                           "w": pair(self.w), "k": self.k})

    @staticmethod
    def from_dict(d: dict) -> "Su11Params":
        def cx(x):
            if isinstance(x, (list, tuple)):
                return complex(x[0], x[1])
            return complex(x)
        return Su11Params(cx(d["z"]), cx(d["u"]), cx(d.get("v", 0)), cx(d.get("w", 0)),
                          float(d["k"]))


@dataclass(frozen=True)
class DerivedParams:
    """Killing-form quantities of the combination.

    Attributes:
        l: sqrt(w^2 - 4uv), principal branch unless flipped.
        c: -(w + l)/(2u).
        zeta: 2l/(w + l).
        s: -|c|^2, the variable of the closed normalization series.
        a: k + z/l.
    """

    l: complex
    c: complex
    zeta: complex
    s: float
    a: complex


def killing(u: complex, v: complex, w: complex) -> complex:
    """Principal sqrt(w^2 - 4uv)."""
    return complex(np.sqrt(complex(w * w - 4 * u * v)))


def derive(params: Su11Params, branch: int = 1) -> DerivedParams:
    """Derived parameters l, c, zeta, s, a.

    Args:
        params: combination and eigenvalue.
        branch: +1 for the principal root l, -1 for -l.

    Raises:
        DegenerateKilling: if l = 0 (only the recurrence applies then).
    """
    l = branch * killing(params.u, params.v, params.w)
    if abs(l) < _L_ZERO:
        raise DegenerateKilling("w^2 = 4uv; use the recurrence constructor")
    c = -(params.w + l) / (2 * params.u)
    zeta = 2 * l / (params.w + l)
    return DerivedParams(l=l, c=c, zeta=zeta, s=-abs(c) ** 2, a=params.k + params.z / l)


def _margin(u, v, w):
    l = killing(u, v, w)
    return 2 * abs(u) - min(abs(w - l), abs(w + l))


def is_normalizable(params) -> tuple[bool, float]:
    """Normalizability test |w - l| < 2|u| or |w + l| < 2|u|.

    Returns:
        (flag, margin) with margin = 2|u| - min(|w - l|, |w + l|).
    """
    m = _margin(params.u, params.v, params.w)
    return bool(m > 0), float(m)


def characteristic_roots(u, v, w) -> tuple[complex, complex]:
    """Roots of u t^2 + w t + v = 0, the asymptotic ratios C_{m+1}/C_m."""
    l = killing(u, v, w)
    return (-w + l) / (2 * u), (-w - l) / (2 * u)


def generic_z_allowed(params: Su11Params) -> bool:
    """True when every eigenvalue z gives a normalizable state (both roots inside)."""
    return max(abs(r) for r in characteristic_roots(params.u, params.v, params.w)) < 1


# ------------------------------------------------------------- recurrence

def _forward(z, u, v, w, k, M):
    C = np.zeros(M + 1, complex)
    C[0] = 1.0
    for m in range(M):
        rhs = (z - w * (k + m)) * C[m]
        if m:
            rhs -= v * np.sqrt(m * (m - 1 + 2 * k)) * C[m - 1]
        C[m + 1] = rhs / (u * np.sqrt((m + 1) * (m + 2 * k)))
        big = abs(C[m + 1])
        if big > 1e150:
            C[: m + 2] /= big
    return C


def _backward(z, u, v, w, k, M):
    """Minimal solution by Miller's algorithm; C_{M+1} = 0, C_M = 1."""
    if v == 0:
        raise NotNormalizable("first-order recurrence with a growing root")
    C = np.zeros(M + 2, complex)
    C[M] = 1.0
    for m in range(M, 0, -1):
        rhs = (z - w * (k + m)) * C[m] - u * np.sqrt((m + 1) * (m + 2 * k)) * C[m + 1]
        C[m - 1] = rhs / (v * np.sqrt(m * (m - 1 + 2 * k)))
        big = abs(C[m - 1])
        if big > 1e150:
            C[m - 1:] /= big
    C = C[: M + 1]
    return C / np.linalg.norm(C)


def _lowest_equation_residual(C, z, u, w, k):
    """Relative residual of the m = 0 row, which Miller's algorithm leaves free."""
    lhs = u * np.sqrt(2 * k) * C[1] + (w * k - z) * C[0]
    scale = abs(u) * np.sqrt(2 * k) * abs(C[1]) + (abs(w) * k + abs(z)) * abs(C[0])
    return abs(lhs) / max(scale, 1e-300)


def coefficients_recurrence(params: Su11Params, basis: LadderBasis,
                            tol: float = DEFAULT_TAIL_TOL,
                            edge_tol: float = EDGE_TOL) -> StateVector:
    """Normalized ladder coefficients from the three-term recurrence.

    Args:
        params: combination and eigenvalue.
        basis: ladder basis; its k must equal ``params.k``.
        tol: tail-mass tolerance.
        edge_tol: bound on |u| sqrt((M+1)(M+2k)) |C_M|, the part of the
            eigen-residual that the truncation drops.

    Raises:
        NonConvergent: tail mass or edge residual above tolerance at this cutoff.
        NotNormalizable: z is not an eigenvalue with a normalizable state.
    """
    if abs(basis.k - params.k) > 1e-15:
        raise ValueError("basis k differs from params k")
    z, u, v, w, k = params.z, params.u, params.v, params.w, params.k
    M = basis.cutoff
    r1, r2 = characteristic_roots(u, v, w)
    if max(abs(r1), abs(r2)) < 1 or v == 0:
        C = _forward(z, u, v, w, k, M)
        C = C / np.linalg.norm(C)
    else:
        C = _backward(z, u, v, w, k, M)
        if _lowest_equation_residual(C, z, u, w, k) > 1e-9:
            raise NotNormalizable(
                f"z={z} is not in the point spectrum: only one characteristic root "
                "inside the unit disk and the lowest-level equation fails")
    state = StateVector(basis, C)
    if state.tail_mass > tol:
        raise NonConvergent(f"tail mass {state.tail_mass:.2e} at cutoff {M}")
    edge = abs(u) * np.sqrt((M + 1) * (M + 2 * k)) * abs(C[M])
    if edge > edge_tol:
        raise NonConvergent(f"truncation-edge residual {edge:.2e} at cutoff {M}")
    return state


# ------------------------------------------------------------ closed form

def closed_form_unnormalized(params: Su11Params, cutoff: int, branch: int = 1,
                             dps: int = 15) -> np.ndarray:
    """g_m = c^m sqrt((2k)_m/m!) 2F1(a, -m; 2k; zeta) for m = 0..cutoff."""
    d = derive(params, branch)
    with mp.workdps(dps):
        A, Z, C, K2 = mp.mpc(d.a), mp.mpc(d.zeta), mp.mpc(d.c), mp.mpf(2 * params.k)
        g = np.empty(cutoff + 1, complex)
        pref = mp.mpf(1)
        cm = mp.mpf(1)
        for m in range(cutoff + 1):
            if m:
                pref *= mp.sqrt((K2 + m - 1) / m)
                cm *= C
            g[m] = complex(cm * pref * mp.hyp2f1(A, -m, K2, Z))
    return g


def coefficients_closed_form(params: Su11Params, basis: LadderBasis, branch: int = 1,
                             tol: float = DEFAULT_TAIL_TOL) -> StateVector:
    """Normalized coefficients from the terminating Gauss series.

    Normalization is by direct summation. Falls back to the recurrence
    when l = 0.
    """
    try:
        g = closed_form_unnormalized(params, basis.cutoff, branch)
    except DegenerateKilling:
        return coefficients_recurrence(params, basis, tol)
    state = StateVector(basis, g / np.linalg.norm(g))
    if state.tail_mass > tol:
        raise NonConvergent(f"tail mass {state.tail_mass:.2e} at cutoff {basis.cutoff}")
    return state


def norm_inverse_closed(params: Su11Params, s: float | None = None, branch: int = 1,
                        dps: int = 30):
    """Closed Gauss-series value of sum_m |g_m|^2.

    N^-2(s) = (1+s)^(-2k+a+a*) |1+s-s zeta|^(-2a) 2F1(a, a*; 2k; -s|zeta|^2/|1+s-s zeta|^2)
    where |.|^(-2a) means |(1+s-s zeta)^(-a)|^2. The series equals the direct
    sum at s = -|c|^2 (the default).

    Returns:
        mpmath real.
    """
    d = derive(params, branch)
    with mp.workdps(dps):
        s = mp.mpf(d.s if s is None else s)
        return _nm2(s, mp.mpc(d.zeta), mp.mpc(d.a), mp.mpf(params.k))


def _nm2(s, Z, A, k):
    t = 1 + s - s * Z
    x = -s * abs(Z) ** 2 / abs(t) ** 2
    return mp.re((1 + s) ** (-2 * k + A + mp.conj(A)) * abs(t ** (-A)) ** 2
                 * mp.hyp2f1(A, mp.conj(A), 2 * k, x))


def mean_k3_closed(params: Su11Params, branch: int = 1, dps: int = 30) -> float:
    """<K3> = k + s N^2 dN^-2/ds at s = -|c|^2, by numerical differentiation."""
    d = derive(params, branch)
    with mp.workdps(dps):
        Z, A, k = mp.mpc(d.zeta), mp.mpc(d.a), mp.mpf(params.k)
        s0 = mp.mpf(d.s)
        f = lambda s: _nm2(s, Z, A, k)
        return float(k + s0 * mp.diff(f, s0) / f(s0))


# ----------------------------------------------------------- constructors

def build_state(params: Su11Params, cutoff: int | None = None,
                tol: float = DEFAULT_TAIL_TOL, max_cutoff: int = MAX_CUTOFF,
                edge_tol: float = EDGE_TOL) -> StateVector:
    """Recurrence state with the cutoff doubled until tail mass and edge residual converge."""
    M = cutoff or default_cutoff()
    while True:
        try:
            return coefficients_recurrence(params, LadderBasis(params.k, M, True), tol, edge_tol)
        except NonConvergent:
            if M >= max_cutoff:
                raise
            M = min(2 * M, max_cutoff)


def eigen_residual(state: StateVector, params: Su11Params) -> float:
    """||(u K- + v K+ + w K3 - z)|psi>|| in the state's ladder basis."""
    g = build_su11_generators(state.basis)
    A = params.u * g["K-"] + params.v * g["K+"] + params.w * g["K3"]
    return float(np.linalg.norm(A.identity_shift(params.z) @ state))


def ladder_to_fock(state: StateVector, parity: str) -> StateVector:
    """Map ladder level m to Fock level 2m (even, k=1/4) or 2m+1 (odd, k=3/4)."""
    M = state.basis.cutoff
    off = 0 if parity == "even" else 1
    amps = np.zeros(2 * M + 2, complex)
    amps[off::2] = state.amplitudes
    return StateVector(FockBasis(2 * M + 1), amps)


def even_odd_state(z, u, v, w, parity: str, cutoff: int | None = None,
                   tol: float = DEFAULT_TAIL_TOL) -> StateVector:
    """Parity eigenstate of u a^2/2 + v a+^2/2 + w (a+a + 1/2)/2 on the Fock basis.

    Args:
        z, u, v, w: eigenvalue and combination coefficients.
        parity: ``"even"`` (k=1/4) or ``"odd"`` (k=3/4).
        cutoff: starting ladder cutoff (Fock cutoff is about twice this).

    Returns:
        State on ``FockBasis(2M+1)`` with zeros on the other parity.
    """
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    k = 0.25 if parity == "even" else 0.75
    ladder = build_state(Su11Params(z, u, v, w, k), cutoff, tol)
    return ladder_to_fock(ladder, parity)


def squeezed_cat_params(z: complex, zeta_squeeze: complex, k: float = 0.25) -> Su11Params:
    """Combination annihilating S(zeta)|z;+-> - z, with S(zeta) = exp[(zeta a+^2 - zeta* a^2)/2].

    S K- S+ = cosh^2 r K- + sinh^2 r e^{2i theta} K+ - sinh(2r) e^{i theta} K3,
    so the eigenvalue stays z.
    """
    r, th = abs(zeta_squeeze), np.angle(zeta_squeeze)
    u = np.cosh(r) ** 2
    v = np.sinh(r) ** 2 * np.exp(2j * th)
    w = -np.sinh(2 * r) * np.exp(1j * th)
    return Su11Params(z, u, v, w, k)


def squeezed_cat_direct(z: complex, zeta_squeeze: complex, parity: str,
                        cutoff: int) -> StateVector:
    """S(zeta)|z;+-> built with the squeeze operator on a Fock truncation.

    Independent of the recurrence; used as an oracle. ``cutoff`` should be
    well above the populated levels (the truncated exponential leaks at
    the edge).
    """
    ops = build_boson_operators(cutoff)
    n = np.arange(cutoff + 1)
    alpha = np.sqrt(2 * complex(z))
    from scipy.special import gammaln
    if alpha == 0:
        c = (n == 0).astype(complex)
    else:
        c = np.exp(n * np.log(abs(alpha)) - 0.5 * gammaln(n + 1) + 1j * n * np.angle(alpha))
    c[(n % 2) != (0 if parity == "even" else 1)] = 0
    if parity == "odd" and alpha == 0:
        c = (n == 1).astype(complex)
    c = c / np.linalg.norm(c)
    a = ops["a"].entries
    ad = ops["a+"].entries
    gen = (zeta_squeeze * (ad @ ad) - np.conj(zeta_squeeze) * (a @ a)) / 2
    psi = expm_multiply(sp.csc_matrix(gen), c)
    return StateVector(FockBasis(cutoff), psi / np.linalg.norm(psi))


def bg_cs(z: complex, k: float) -> Su11Params:
    """Barut-Girardello coherent state: eigenstate of K-."""
    return Su11Params(z, 1, 0, 0, k)


def k1k2_is(z: complex, u: complex, v: complex, k: float) -> Su11Params:
    """Intelligent states for K1, K2: combination with w = 0."""
    return Su11Params(z, u, v, 0, k)


def su11_cs_eigenvalue(u: complex, v: complex, k: float) -> complex:
    """Eigenvalue of u K- + v K+ on exp(xi K+)|k,k> with xi^2 = -v/u.

    (K- - xi^2 K+) exp(xi K+)|k,k> = 2k xi exp(xi K+)|k,k>, hence z = 2k u xi.
    The branch of xi is the principal sqrt(-v/u).
    """
    xi = np.sqrt(complex(-v / u))
    return 2 * k * u * xi


def su11_cs_state(xi: complex, basis: LadderBasis) -> StateVector:
    """exp(xi K+)|k,k> normalized; coefficients xi^m sqrt((2k)_m/m!)."""
    m = np.arange(basis.dim)
    k = basis.k
    from scipy.special import gammaln
    logmag = 0.5 * (gammaln(2 * k + m) - gammaln(2 * k) - gammaln(m + 1))
    amps = np.exp(logmag + m * np.log(abs(xi)) + 1j * m * np.angle(xi)) if xi != 0 else (m == 0) * 1.0
    return StateVector(basis, amps / np.linalg.norm(amps))
