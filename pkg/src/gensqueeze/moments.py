"""Uncertainty matrices, the Robertson relation, closed variance formulas,
squeezing predicates and photon statistics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .errors import NotHermitian, SingularB
from .fock import (FockBasis, OperatorMatrix, StateVector, build_boson_operators,
                   quadratic_generators)
from .su11 import Su11Params, build_state, characteristic_roots


@dataclass(frozen=True)
class UncertaintyReport:
    """Second moments of a set of Hermitian observables in one state.

    Attributes:
        sigma: symmetric covariance matrix.
        cmat: C_kj = (-i/2)<[X_k, X_j]>, real antisymmetric.
        det_sigma: det(sigma).
        det_c: det(C).
        variances: diagonal of sigma.
        means: <X_j>.
        labels: observable names.
    """

    sigma: np.ndarray
    cmat: np.ndarray
    det_sigma: float
    det_c: float
    variances: np.ndarray
    means: np.ndarray
    labels: tuple = ()

    @property
    def slack(self) -> float:
        """det(sigma) - det(C); non-negative by the Robertson relation."""
        return self.det_sigma - self.det_c

    @property
    def saturation(self) -> float:
        """|det sigma - det C| / max(det C, 1e-12)."""
        return abs(self.slack) / max(self.det_c, 1e-12)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "dim": len(self.variances),
            "sigma": self.sigma.tolist(),
            "cmat": self.cmat.tolist(),
            "det_sigma": self.det_sigma,
            "det_c": self.det_c,
            "variances": self.variances.tolist(),
            "means": self.means.tolist(),
        }


@dataclass(frozen=True)
class SqueezeVerdict:
    """Squeezing flags per observable.

    Attributes:
        absolute: Delta X_j < Delta_0 for each j.
        relative: Delta^2 X_j < (det C)^(1/n) for each j, or None when not applicable
            (odd n or det C = 0).
        delta0: reference standard deviations.
        joint: every observable absolutely squeezed.
    """

    absolute: tuple
    relative: tuple | None
    delta0: tuple
    joint: bool


def uncertainty_matrix(state: StateVector, observables: list[OperatorMatrix],
                       labels=()) -> UncertaintyReport:
    """Covariance and commutator matrices of Hermitian observables.

    Raises:
        NotHermitian: if an observable is not tagged Hermitian.
    """
    for x in observables:
        if not x.hermitian:
            raise NotHermitian("uncertainty_matrix needs Hermitian observables")
        if x.basis != state.basis:
            from .errors import BasisMismatch
            raise BasisMismatch("observable and state on different bases")
    psi = state.amplitudes
    xs = np.array([x.entries @ psi for x in observables])
    means = (xs @ psi.conj()).real
    gram = xs.conj() @ xs.T
    sigma = gram.real - np.outer(means, means)
    sigma = (sigma + sigma.T) / 2
    cmat = gram.imag
    cmat = (cmat - cmat.T) / 2
    return UncertaintyReport(sigma, cmat, float(np.linalg.det(sigma)),
                             float(np.linalg.det(cmat)), np.diag(sigma).copy(), means,
                             tuple(labels))


def sigma_from_beta(beta: np.ndarray, commutator_means: np.ndarray) -> np.ndarray:
    """Covariance matrix of a common eigenstate of A_nu = sum_i beta_{nu i} X_i.

    sigma = B^-1 [[0, C'], [C'^T, 0]] B^-T with B = [beta; beta*] and
    C' = beta <[X, X]> beta^+ / 2.

    Args:
        beta: N x 2N complex coefficients.
        commutator_means: 2N x 2N matrix of <[X_i, X_j]>.

    Raises:
        SingularB: cond(B) > 1e12.
    """
    beta = np.atleast_2d(np.asarray(beta, complex))
    B = np.vstack([beta, beta.conj()])
    if np.linalg.cond(B) > 1e12:
        raise SingularB("coefficient matrix B is singular")
    cp = beta @ np.asarray(commutator_means) @ beta.conj().T / 2
    N = beta.shape[0]
    mid = np.block([[np.zeros((N, N)), cp], [cp.T, np.zeros((N, N))]])
    Binv = np.linalg.inv(B)
    sig = Binv @ mid @ Binv.T
    return sig.real


def su11_beta(u: complex, v: complex) -> np.ndarray:
    """Coefficients of u K- + v K+ on (K1, K2): (u + v, i(v - u))."""
    return np.array([[u + v, 1j * (v - u)]])


def k1k2_commutators(mean_k3: float) -> np.ndarray:
    """<[K_i, K_j]> for (K1, K2): [K1, K2] = -i K3."""
    return np.array([[0, -1j * mean_k3], [1j * mean_k3, 0]])


def mean_k3(params: Su11Params, cutoff: int | None = None) -> float:
    """<K3> by direct summation sum (k+m)|C_m|^2."""
    s = build_state(params, cutoff)
    m = np.arange(s.basis.dim)
    return float(np.sum((params.k + m) * np.abs(s.amplitudes) ** 2))


def closed_form_k_variances(params: Su11Params, k3: float | None = None) -> dict:
    """Delta^2 K1, Delta^2 K2 and the K1-K2 covariance for w = 0 states.

    Raises:
        ValueError: if w != 0 or |u| <= |v|.
    """
    u, v = params.u, params.v
    if params.w != 0:
        raise ValueError("closed K1/K2 variances need w = 0")
    den = abs(u) ** 2 - abs(v) ** 2
    if den <= 0:
        raise ValueError("need |u| > |v|")
    k3 = mean_k3(params) if k3 is None else k3
    return {
        "var_K1": 0.5 * abs(u - v) ** 2 / den * k3,
        "var_K2": 0.5 * abs(u + v) ** 2 / den * k3,
        "cov_K1K2": float((np.conj(u) * v).imag / den * k3),
    }


def quadrature_variances(params: Su11Params, k3: float | None = None) -> dict:
    """Delta^2 q and Delta^2 p of the parity states with w = 0.

    Uses <a+a> = 2<K3> - 1/2 and Re<a^2> = 2 Re[(u - v) z*] / (|u|^2 - |v|^2).
    """
    if params.w != 0:
        raise ValueError("closed quadrature variances need w = 0")
    u, v, z = params.u, params.v, params.z
    k3 = mean_k3(params) if k3 is None else k3
    n = 2 * k3 - 0.5
    shift = 2 * ((u - v) * np.conj(z)).real / (abs(u) ** 2 - abs(v) ** 2)
    return {"var_q": float(0.5 + n + shift), "var_p": float(0.5 + n - shift), "mean_n": float(n)}


def _fock_moments(state: StateVector) -> dict:
    if not isinstance(state.basis, FockBasis) or state.basis.parity is not None:
        raise ValueError("expects a full Fock-basis state")
    psi = state.amplitudes
    n = np.arange(state.basis.dim)
    p = np.abs(psi) ** 2

    def low(j):
        # <a^j> = sum_n conj(psi_{n-j}) psi_n sqrt(n!/(n-j)!)
        if j >= len(psi):
            return 0j
        f = np.ones(len(psi) - j)
        for t in range(j):
            f = f * np.sqrt(n[j:] - t)
        return complex(np.sum(np.conj(psi[:-j]) * psi[j:] * f))

    return {
        "a": low(1), "a2": low(2), "a4": low(4),
        "n": float(np.sum(n * p)),
        "n2": float(np.sum(n * n * p)),
        "ad2a2": float(np.sum(n * (n - 1) * p)),
    }


def cat_variances(state: StateVector) -> dict:
    """Closed quadrature and squared-amplitude variances of a parity state.

    Delta^2 q/p = 1/2 + <a+a> +- Re<a^2> and
    Delta^2 K~1/2 = 1 + 2<a+a> + <a+^2 a^2> +- Re<a^4> - <K~>^2, with
    K~1 = (a^2 + a+^2)/sqrt(2) and K~2 = -i(a^2 - a+^2)/sqrt(2).
    Assumes <a> = 0 and warns otherwise.
    """
    m = _fock_moments(state)
    if abs(m["a"]) > 1e-10:
        warnings.warn(f"<a> = {m['a']:.2e}; the closed variances assume <a> = 0")
    base = 1 + 2 * m["n"] + m["ad2a2"]
    k1 = np.sqrt(2) * m["a2"].real
    k2 = np.sqrt(2) * m["a2"].imag
    return {
        "var_q": 0.5 + m["n"] + m["a2"].real,
        "var_p": 0.5 + m["n"] - m["a2"].real,
        "var_Kt1": float(base + m["a4"].real - k1 ** 2),
        "var_Kt2": float(base - m["a4"].real - k2 ** 2),
    }


def direct_fock_variances(state: StateVector) -> dict:
    """Variances of q, p, K~1, K~2 from the truncated matrices."""
    from .fock import variance
    c = state.basis.cutoff
    ops = build_boson_operators(c)
    a, ad = ops["a"], ops["a+"]
    kt1 = OperatorMatrix(state.basis, ((a @ a) + (ad @ ad)).entries / np.sqrt(2), True)
    kt2 = OperatorMatrix(state.basis, -1j * ((a @ a) - (ad @ ad)).entries / np.sqrt(2), True)
    return {
        "var_q": variance(state, ops["q"]),
        "var_p": variance(state, ops["p"]),
        "var_Kt1": variance(state, kt1),
        "var_Kt2": variance(state, kt2),
    }


def ktilde_operators(basis: FockBasis) -> dict:
    """K~1 = 2 sqrt(2) K1 and K~2 = 2 sqrt(2) K2 in the quadratic realization."""
    g = quadratic_generators(basis)
    return {"Kt1": g["K1"] * (2 * np.sqrt(2)), "Kt2": g["K2"] * (2 * np.sqrt(2))}


@dataclass(frozen=True)
class PhotonStats:
    """Photon-number distribution and its first two moments."""

    distribution: np.ndarray = field(repr=False)
    mean: float
    variance: float
    mandel_q: float


def photon_statistics(state: StateVector) -> PhotonStats:
    """p(n), <n>, Delta^2 n and Mandel Q = (Delta^2 n - <n>)/<n>."""
    if not isinstance(state.basis, FockBasis) or state.basis.parity is not None:
        raise ValueError("expects a full Fock-basis state")
    p = np.abs(state.amplitudes) ** 2
    p = p / p.sum()
    n = np.arange(len(p))
    mean = float(np.sum(n * p))
    var = float(np.sum(n * n * p) - mean ** 2)
    q = (var - mean) / mean if mean > 0 else 0.0
    return PhotonStats(p, mean, var, q)


def squeezing_predicates(report: UncertaintyReport, delta0, n: int | None = None) -> SqueezeVerdict:
    """Absolute and relative squeezing flags.

    Args:
        report: uncertainty report.
        delta0: reference standard deviation, scalar or per observable.
        n: number of observables (defaults to the report size).

    Returns:
        Verdict; the relative test is None for odd n or det C <= 0.
    """
    n = len(report.variances) if n is None else n
    d0 = np.broadcast_to(np.asarray(delta0, float), report.variances.shape)
    std = np.sqrt(np.maximum(report.variances, 0))
    absolute = tuple(bool(x) for x in std < d0)
    relative = None
    if n % 2 == 0 and report.det_c > 1e-15:
        ref = report.det_c ** (1.0 / n)
        relative = tuple(bool(x) for x in report.variances < ref)
    return SqueezeVerdict(absolute, relative, tuple(d0.tolist()), all(absolute))


# ------------------------------------------------- extended-precision check

def hermitian_eigenstate_mp(u: complex, w: float, k: float, n: int, cutoff: int,
                            dps: int = 50) -> list:
    """Coefficients of the n-th eigenstate of u K- + u* K+ + w K3, |w| > 2|u|.

    The eigenvalue is z = (k + n) sign(w) sqrt(w^2 - 4|u|^2); a = -n is then
    exact, and the terminating series is evaluated at ``dps`` digits.
    """
    with mp.workdps(dps):
        U, W, K = mp.mpc(u), mp.mpf(w), mp.mpf(k)
        lroot = mp.sqrt(W * W - 4 * abs(U) ** 2)
        l = -lroot if W > 0 else lroot
        c = -(W + l) / (2 * U)
        zeta = 2 * l / (W + l)
        # z = -(k + n) l makes a = k + z/l = -n exactly; passing the integer
        # keeps the series at n + 1 terms instead of a cancelling sum over m.
        a = -n
        out, pref, cm = [], mp.mpf(1), mp.mpf(1)
        for m in range(cutoff + 1):
            if m:
                pref *= mp.sqrt((2 * K + m - 1) / m)
                cm *= c
            out.append(cm * pref * mp.hyp2f1(a, -m, 2 * K, zeta))
        nrm = mp.sqrt(mp.fsum(abs(x) ** 2 for x in out))
        return [x / nrm for x in out]


def k_trio_determinants_mp(coeffs: list, k: float, dps: int = 50) -> tuple:
    """det sigma and det C for (K1, K2, K3) in extended precision.

    Returns:
        (det_sigma, det_c, sigma) as mpmath values.
    """
    with mp.workdps(dps):
        K = mp.mpf(k)
        C = list(coeffs) + [mp.mpc(0)] * 2
        M = len(C)

        def kplus(x):
            y = [mp.mpc(0)] * M
            for m in range(M - 1):
                y[m + 1] = mp.sqrt((m + 1) * (m + 2 * K)) * x[m]
            return y

        def kminus(x):
            y = [mp.mpc(0)] * M
            for m in range(1, M):
                y[m - 1] = mp.sqrt(m * (m - 1 + 2 * K)) * x[m]
            return y

        kp, km = kplus(C), kminus(C)
        x1 = [(p + q) / 2 for p, q in zip(kp, km)]
        x2 = [(p - q) / (2j) for p, q in zip(kp, km)]
        x3 = [(K + m) * C[m] for m in range(M)]
        xs = [x1, x2, x3]
        dot = lambda a, b: mp.fsum(mp.conj(p) * q for p, q in zip(a, b))
        means = [mp.re(dot(C, x)) for x in xs]
        sig = mp.matrix(3, 3)
        cm = mp.matrix(3, 3)
        for i in range(3):
            for j in range(3):
                g = dot(xs[i], xs[j])
                sig[i, j] = mp.re(g) - means[i] * means[j]
                cm[i, j] = mp.im(g)
        return mp.det(sig), mp.det(cm), sig
