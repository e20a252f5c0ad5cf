"""Multimode canonical squeezed states.

Operators A = beta1 p + beta2 q act on N modes with [q_i, p_j] = i delta_ij.
Their common eigenstate has the wavefunction exp(-q.M.q + N.q) with
M = (i/2) beta1^-1 beta2 and N = i beta1^-1 z, so that p = -i d/dq gives
A psi = z psi. The reverse map picks beta with beta (M* + M) beta^+ = 1/2,
which makes the A canonical boson operators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .errors import NotPositiveDefinite, SingularBeta1
from .fock import DEFAULT_TAIL_TOL, OperatorMatrix, StateVector, tail_mass
from .moments import UncertaintyReport, sigma_from_beta, uncertainty_matrix


@dataclass(frozen=True)
class NModeBasis:
    """Product Fock basis of N modes, each truncated at ``cutoff``."""

    modes: int
    cutoff: int

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.modes


@dataclass(frozen=True)
class BetaMatrix:
    """Coefficient blocks of A = beta1 p + beta2 q and eigenvalues z."""

    beta1: np.ndarray
    beta2: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        b1 = np.atleast_2d(np.asarray(self.beta1, complex))
        b2 = np.atleast_2d(np.asarray(self.beta2, complex))
        z = np.atleast_1d(np.asarray(self.z, complex))
        if b1.shape != b2.shape or b1.shape[0] != b1.shape[1] or z.shape != (b1.shape[0],):
            raise ValueError("beta1, beta2 must be N x N and z length N")
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "beta2", b2)
        object.__setattr__(self, "z", z)

    @property
    def modes(self) -> int:
        return self.beta1.shape[0]

    @property
    def full(self) -> np.ndarray:
        """N x 2N matrix acting on X = (p_1..p_N, q_1..q_N)."""
        return np.hstack([self.beta1, self.beta2])

    def commutators(self) -> tuple[np.ndarray, np.ndarray]:
        """[A, A+] = i(beta2 beta1^+ - beta1 beta2^+) and [A, A] = i(beta2 beta1^T - beta1 beta2^T)."""
        b1, b2 = self.beta1, self.beta2
        cad = 1j * (b2 @ b1.conj().T - b1 @ b2.conj().T)
        caa = 1j * (b2 @ b1.T - b1 @ b2.T)
        return cad, caa

    def to_json(self) -> str:
        pairs = lambda a: [[[x.real, x.imag] for x in row] for row in a]
        return json.dumps({"beta1": pairs(self.beta1), "beta2": pairs(self.beta2),
                           "z": [[x.real, x.imag] for x in self.z]})


@dataclass(frozen=True)
class GaussianParams:
    """Wavefunction exp(-q.M.q + N.q); M symmetric with M* + M positive definite."""

    M: np.ndarray
    Nvec: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, complex))
        Nv = np.atleast_1d(np.asarray(self.Nvec, complex))
        if np.max(np.abs(M - M.T)) > 1e-14 * max(1.0, np.max(np.abs(M))):
            raise ValueError("M must be symmetric")
        ev = np.linalg.eigvalsh(2 * M.real)
        if ev.min() <= 0:
            raise NotPositiveDefinite(f"M* + M has eigenvalue {ev.min():.3g}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "Nvec", Nv)


def parse_complex_matrix(data) -> np.ndarray:
    """Array of [re, im] pairs (any nesting) to a complex array."""
    a = np.asarray(data, float)
    return a[..., 0] + 1j * a[..., 1]


def gaussian_from_beta(b: BetaMatrix) -> GaussianParams:
    """M = (i/2) beta1^-1 beta2 and N = i beta1^-1 z.

    Raises:
        SingularBeta1: beta1 not invertible.
        NotPositiveDefinite: the eigenfunction is not normalizable.
    """
    if np.linalg.cond(b.beta1) > 1e12:
        raise SingularBeta1("beta1 is singular")
    inv = np.linalg.inv(b.beta1)
    M = 0.5j * inv @ b.beta2
    if np.max(np.abs(M - M.T)) < 1e-12 * max(1.0, np.max(np.abs(M))):
        M = (M + M.T) / 2
    return GaussianParams(M, 1j * inv @ b.z)


def beta_from_M(g: GaussianParams) -> BetaMatrix:
    """Canonical operators with the Gaussian as common eigenstate.

    Solves beta (M* + M) beta^+ = 1/2 through the eigen-decomposition
    2 Re M = O D O^T, beta1 = D^(-1/2) O^T / sqrt(2), and sets
    beta2 = -2i beta1 M, z = -i beta1 N. Eigenvalues are sorted in
    descending order and each eigenvector's first nonzero entry is positive,
    which fixes the otherwise free orthogonal factor.
    """
    d, O = np.linalg.eigh(2 * g.M.real)
    if d.min() <= 0:
        raise NotPositiveDefinite("M* + M is not positive definite")
    order = np.argsort(d)[::-1]
    d, O = d[order], O[:, order]
    for j in range(O.shape[1]):
        col = O[:, j]
        first = col[np.flatnonzero(np.abs(col) > 1e-14)[0]]
        if first < 0:
            O[:, j] = -col
    b1 = (O / np.sqrt(d)).T / np.sqrt(2)
    b2 = -2j * b1 @ g.M
    return BetaMatrix(b1.astype(complex), b2, -1j * b1 @ g.Nvec)


def lambda_from_beta(b: BetaMatrix) -> tuple[np.ndarray, float]:
    """Real matrix taking X to the quadratures of A, and its condition number.

    Rows nu hold Re beta, rows N + nu hold -Im beta.
    """
    full = b.full
    lam = np.vstack([full.real, -full.imag])
    return lam, float(np.linalg.cond(lam))


def canonical_commutator_means(modes: int) -> np.ndarray:
    """<[X_i, X_j]> for X = (p.., q..): [p_i, q_j] = -i delta_ij."""
    eye = np.eye(modes)
    z = np.zeros((modes, modes))
    return np.block([[z, -1j * eye], [1j * eye, z]])


def sigma_eq8(b: BetaMatrix) -> np.ndarray:
    """Covariance of (p.., q..) in the common eigenstate from the coefficients alone."""
    return sigma_from_beta(b.full, canonical_commutator_means(b.modes))


# --------------------------------------------------------- Fock materialization

def _hermite_functions(x: np.ndarray, nmax: int) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions phi_n(x), n = 0..nmax (rows)."""
    out = np.empty((nmax + 1, len(x)))
    out[0] = np.pi ** -0.25 * np.exp(-x * x / 2)
    if nmax:
        out[1] = np.sqrt(2) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def gaussian_to_fock(g: GaussianParams, cutoff: int = 128, points: int | None = None) -> StateVector:
    """Fock amplitudes of exp(-q.M.q + N.q) by Hermite projection on a uniform grid.

    Args:
        g: Gaussian parameters (N = 1 or 2 modes).
        cutoff: Fock cutoff per mode.
        points: grid points per axis (default scales with the cutoff).

    Returns:
        Normalized state on ``NModeBasis(N, cutoff)``.
    """
    n_modes = g.M.shape[0]
    if n_modes > 2:
        raise ValueError("materialization supports N <= 2")
    reM = g.M.real
    center = np.linalg.solve(2 * reM, g.Nvec.real)
    width = 1 / np.sqrt(np.linalg.eigvalsh(2 * reM).min())
    L = max(np.sqrt(2 * cutoff + 1) + 8, np.max(np.abs(center)) + 10 * width)
    pts = points or int(24 * L) + 1
    x = np.linspace(-L, L, pts)
    dx = x[1] - x[0]
    H = _hermite_functions(x, cutoff)
    if n_modes == 1:
        e = -g.M[0, 0] * x * x + g.Nvec[0] * x
        psi = np.exp(e - e.real.max())
        amps = H @ psi * dx
    else:
        q1, q2 = np.meshgrid(x, x, indexing="ij")
        e = (-(g.M[0, 0] * q1 * q1 + 2 * g.M[0, 1] * q1 * q2 + g.M[1, 1] * q2 * q2)
             + g.Nvec[0] * q1 + g.Nvec[1] * q2)
        psi = np.exp(e - e.real.max())
        amps = (H @ psi @ H.T * dx * dx).reshape(-1)
    return StateVector(NModeBasis(n_modes, cutoff), amps / np.linalg.norm(amps))


def mode_tail_masses(state: StateVector) -> list[float]:
    """Tail mass of each mode's reduced Fock distribution."""
    nb = state.basis
    amps = np.abs(state.amplitudes.reshape((nb.cutoff + 1,) * nb.modes)) ** 2
    out = []
    for j in range(nb.modes):
        axes = tuple(i for i in range(nb.modes) if i != j)
        out.append(tail_mass(np.sqrt(amps.sum(axis=axes))))
    return out


def nmode_quadratures(modes: int, cutoff: int) -> dict[str, list[OperatorMatrix]]:
    """Per-mode a, p, q embedded in the N-mode product basis."""
    basis = NModeBasis(modes, cutoff)
    a1 = sp.diags(np.sqrt(np.arange(1, cutoff + 1)), 1, format="csr", dtype=complex)
    eye = sp.identity(cutoff + 1, format="csr")
    out = {"a": [], "p": [], "q": []}
    for j in range(modes):
        mats = [eye] * modes
        mats[j] = a1
        A = mats[0]
        for m in mats[1:]:
            A = sp.kron(A, m, format="csr")
        Ad = A.conj().T.tocsr()
        out["a"].append(OperatorMatrix(basis, A))
        out["q"].append(OperatorMatrix(basis, (A + Ad) / np.sqrt(2), True))
        out["p"].append(OperatorMatrix(basis, 1j * (Ad - A) / np.sqrt(2), True))
    return out


def a_operators(b: BetaMatrix, cutoff: int) -> list[OperatorMatrix]:
    """A_nu = sum_i beta1 p_i + beta2 q_i as truncated matrices."""
    ops = nmode_quadratures(b.modes, cutoff)
    out = []
    for nu in range(b.modes):
        A = None
        for i in range(b.modes):
            term = b.beta1[nu, i] * ops["p"][i] + b.beta2[nu, i] * ops["q"][i]
            A = term if A is None else A + term
        out.append(A)
    return out


def common_eigenstate_fock(b: BetaMatrix, cutoff: int) -> StateVector:
    """Lowest eigenvector of sum_nu (A_nu - z_nu)^+ (A_nu - z_nu) in the truncation.

    Independent of the Gaussian wavefunction; used as an oracle.
    """
    basis = NModeBasis(b.modes, cutoff)
    H = None
    for A, z in zip(a_operators(b, cutoff), b.z):
        d = A.identity_shift(z).entries
        t = d.conj().T @ d
        H = t if H is None else H + t
    H = sp.csc_matrix(H)
    if basis.dim <= 400:
        w, V = np.linalg.eigh(H.toarray())
        vec = V[:, 0]
    else:
        w, V = eigsh(H, k=1, sigma=-1e-3, which="LM")
        vec = V[:, 0]
    return StateVector(basis, vec / np.linalg.norm(vec))


def verify_hn_ris(b: BetaMatrix, cutoff: int = 128, tail_tol: float = DEFAULT_TAIL_TOL,
                  max_cutoff: int = 512) -> UncertaintyReport:
    """Uncertainty report of (p.., q..) in the materialized common eigenstate.

    For canonical b the report saturates the Robertson relation,
    det sigma = det C = 4^-N, and sigma equals ``sigma_eq8(b)``. The cutoff
    doubles until every mode's tail mass is below ``tail_tol``.
    """
    g = gaussian_from_beta(b)
    state = gaussian_to_fock(g, cutoff)
    while max(mode_tail_masses(state)) > tail_tol and cutoff < max_cutoff:
        cutoff = min(2 * cutoff, max_cutoff)
        state = gaussian_to_fock(g, cutoff)
    ops = nmode_quadratures(b.modes, cutoff)
    labels = [f"p{i+1}" for i in range(b.modes)] + [f"q{i+1}" for i in range(b.modes)]
    return uncertainty_matrix(state, ops["p"] + ops["q"], labels)


def random_gaussian(rng: np.random.Generator, modes: int, spread: float = 1.0) -> GaussianParams:
    """Random symmetric M with positive definite real part, and random N."""
    X = rng.normal(size=(modes, modes))
    re = X @ X.T / modes + 0.3 * np.eye(modes)
    Y = rng.normal(size=(modes, modes)) * spread
    im = (Y + Y.T) / 2
    Nv = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    return GaussianParams(re + 1j * im, spread * Nv)
