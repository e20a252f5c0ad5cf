"""Truncated-basis linear algebra for su(1,1) and boson realizations.

Bases are small immutable descriptors; operators are sparse matrices tagged
with the basis they act on. All ladder operators have bandwidth at most two,
so CSR storage is used throughout and products stay sparse.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import BasisMismatch, NotHermitian

TAIL_FRACTION = 0.1
DEFAULT_TAIL_TOL = 1e-12


def _allowed_k(k: float) -> bool:
    if abs(k - 0.25) < 1e-15 or abs(k - 0.75) < 1e-15:
        return True
    return abs(2 * k - round(2 * k)) < 1e-12 and round(2 * k) >= 1


@dataclass(frozen=True)
class LadderBasis:
    """Orthonormal basis |k, k+m>, m = 0..cutoff.

    Attributes:
        k: Bargmann index.
        cutoff: highest ladder level M.
        allow_any_k: accept any k > 0 instead of the discrete-series values
            1/4, 3/4, 1/2, 1, 3/2, ...
    """

    k: float
    cutoff: int
    allow_any_k: bool = False

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if not self.k > 0:
            raise ValueError("Bargmann index k must be positive")
        if not self.allow_any_k and not _allowed_k(self.k):
            raise ValueError(f"k={self.k} not in the discrete series; pass allow_any_k=True")

    @property
    def dim(self) -> int:
        return self.cutoff + 1

    def with_cutoff(self, cutoff: int) -> "LadderBasis":
        return LadderBasis(self.k, cutoff, self.allow_any_k)


@dataclass(frozen=True)
class FockBasis:
    """Single-mode Fock basis truncated at ``cutoff``.

    With ``parity`` set, only the even (0, 2, ...) or odd (1, 3, ...) levels
    up to ``cutoff`` are kept.
    """

    cutoff: int
    parity: str | None = None

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.parity not in (None, "even", "odd"):
            raise ValueError("parity must be None, 'even' or 'odd'")

    @property
    def levels(self) -> np.ndarray:
        start = {None: 0, "even": 0, "odd": 1}[self.parity]
        step = 1 if self.parity is None else 2
        return np.arange(start, self.cutoff + 1, step)

    @property
    def dim(self) -> int:
        return len(self.levels)

    def with_cutoff(self, cutoff: int) -> "FockBasis":
        return FockBasis(cutoff, self.parity)


@dataclass(frozen=True)
class TwoModeBasis:
    """Product Fock basis |n_a>|n_b>, row-major in (n_a, n_b)."""

    cutoff_a: int
    cutoff_b: int

    def __post_init__(self):
        if self.cutoff_a < 1 or self.cutoff_b < 1:
            raise ValueError("cutoffs must be >= 1")

    @property
    def dim(self) -> int:
        return (self.cutoff_a + 1) * (self.cutoff_b + 1)


def tail_mass(amplitudes: np.ndarray) -> float:
    """Probability carried by the top 10% of levels (at least one level)."""
    p = np.abs(np.asarray(amplitudes)) ** 2
    ntail = max(1, int(np.ceil(TAIL_FRACTION * len(p))))
    return float(p[-ntail:].sum())


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse operator on a truncated basis.

    Attributes:
        basis: basis descriptor the matrix acts on.
        entries: CSR matrix of shape (dim, dim).
        hermitian: tag; verified on construction to 1e-14.
    """

    basis: object
    entries: sp.csr_matrix
    hermitian: bool = False

    def __post_init__(self):
        m = sp.csr_matrix(self.entries, dtype=complex)
        object.__setattr__(self, "entries", m)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise BasisMismatch(f"matrix shape {m.shape} does not fit basis dim {self.basis.dim}")
        if self.hermitian:
            d = m - m.conj().T
            if d.nnz and np.max(np.abs(d.data)) >= 1e-14:
                raise NotHermitian("operator tagged hermitian is not")

    def _check(self, other: "OperatorMatrix"):
        if other.basis != self.basis:
            raise BasisMismatch("operators on different bases")

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            self._check(other)
            return OperatorMatrix(self.basis, self.entries @ other.entries)
        if isinstance(other, StateVector):
            if other.basis != self.basis:
                raise BasisMismatch("operator and state on different bases")
            return self.entries @ other.amplitudes
        return self.entries @ np.asarray(other)

    def __add__(self, other):
        self._check(other)
        return OperatorMatrix(self.basis, self.entries + other.entries,
                              self.hermitian and other.hermitian)

    def __sub__(self, other):
        self._check(other)
        return OperatorMatrix(self.basis, self.entries - other.entries,
                              self.hermitian and other.hermitian)

    def __mul__(self, scalar):
        scalar = complex(scalar)
        return OperatorMatrix(self.basis, self.entries * scalar,
                              self.hermitian and scalar.imag == 0)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.basis, self.entries.conj().T.tocsr(), self.hermitian)

    def identity_shift(self, z: complex) -> "OperatorMatrix":
        """Return self - z * 1."""
        eye = sp.identity(self.basis.dim, dtype=complex, format="csr")
        return OperatorMatrix(self.basis, self.entries - z * eye)

    def dense(self) -> np.ndarray:
        return self.entries.toarray()


def commutator(x: OperatorMatrix, y: OperatorMatrix) -> OperatorMatrix:
    return x @ y - y @ x


@dataclass(frozen=True)
class StateVector:
    """Amplitude vector on a truncated basis.

    Attributes:
        basis: basis descriptor.
        amplitudes: complex vector of length ``basis.dim``.
    """

    basis: object
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.shape != (self.basis.dim,):
            raise BasisMismatch(f"amplitude length {amps.shape} vs basis dim {self.basis.dim}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def tail_mass(self) -> float:
        return tail_mass(self.amplitudes)

    def converged(self, tol: float = DEFAULT_TAIL_TOL) -> bool:
        return self.tail_mass < tol

    def normalized(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes / self.norm)

    def overlap(self, other: "StateVector") -> complex:
        if other.basis != self.basis:
            raise BasisMismatch("states on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json(self) -> str:
        k = getattr(self.basis, "k", None)
        return json.dumps({
            "k": k,
            "cutoff": self.basis.cutoff,
            "parity": getattr(self.basis, "parity", None),
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        })

    @staticmethod
    def from_json(text: str) -> "StateVector":
        d = json.loads(text)
        amps = np.asarray(d["re"]) + 1j * np.asarray(d["im"])
        if d.get("k") is not None:
            basis = LadderBasis(d["k"], d["cutoff"], allow_any_k=True)
        else:
            basis = FockBasis(d["cutoff"], d.get("parity"))
        return StateVector(basis, amps)


@dataclass(frozen=True)
class TwoModeState:
    """Two-mode amplitudes c[n_a, n_b]."""

    basis: TwoModeBasis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        shape = (self.basis.cutoff_a + 1, self.basis.cutoff_b + 1)
        if amps.shape != shape:
            raise BasisMismatch(f"amplitude shape {amps.shape} vs {shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def tail_mass_a(self) -> float:
        return tail_mass(np.linalg.norm(self.amplitudes, axis=1))

    @property
    def tail_mass_b(self) -> float:
        return tail_mass(np.linalg.norm(self.amplitudes, axis=0))

    def flat(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)


# ---------------------------------------------------------------- builders

def build_su11_generators(basis: LadderBasis) -> dict[str, OperatorMatrix]:
    """Generators K+, K-, K3, K1, K2 in the ladder basis |k, k+m>.

    Args:
        basis: ladder basis.

    Returns:
        Dict with keys ``"K+"``, ``"K-"``, ``"K3"``, ``"K1"``, ``"K2"``.
    """
    m = np.arange(basis.cutoff)
    kp = sp.diags(np.sqrt((m + 1) * (m + 2 * basis.k)), -1, format="csr", dtype=complex)
    km = kp.conj().T.tocsr()
    k3 = sp.diags(basis.k + np.arange(basis.dim), 0, format="csr", dtype=complex)
    return {
        "K+": OperatorMatrix(basis, kp),
        "K-": OperatorMatrix(basis, km),
        "K3": OperatorMatrix(basis, k3, True),
        "K1": OperatorMatrix(basis, (kp + km) / 2, True),
        "K2": OperatorMatrix(basis, (kp - km) / 2j, True),
    }


def _lowering(cutoff: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, cutoff + 1)), 1, format="csr", dtype=complex)


def build_boson_operators(cutoff: int) -> dict[str, OperatorMatrix]:
    """Ladder and quadrature operators a, a+, q, p on Fock levels 0..cutoff.

    q = (a + a+)/sqrt(2) and p = i(a+ - a)/sqrt(2), so [q, p] = i below the
    truncation edge.
    """
    basis = FockBasis(cutoff)
    a = _lowering(cutoff)
    ad = a.conj().T.tocsr()
    return {
        "a": OperatorMatrix(basis, a),
        "a+": OperatorMatrix(basis, ad),
        "n": OperatorMatrix(basis, ad @ a, True),
        "q": OperatorMatrix(basis, (a + ad) / np.sqrt(2), True),
        "p": OperatorMatrix(basis, 1j * (ad - a) / np.sqrt(2), True),
    }


def quadratic_generators(basis: FockBasis) -> dict[str, OperatorMatrix]:
    """K- = a^2/2, K+ = a+^2/2, K3 = (a+a + 1/2)/2 restricted to ``basis``.

    The restriction to a parity subspace is exact because a^2 preserves
    parity; entries are taken from the full truncated Fock matrices.
    """
    a = _lowering(basis.cutoff)
    lv = basis.levels
    km_full = (a @ a) / 2
    km = km_full[lv][:, lv]
    kp = km.conj().T.tocsr()
    k3 = sp.diags((lv + 0.5) / 2, 0, format="csr", dtype=complex)
    return {
        "K+": OperatorMatrix(basis, kp),
        "K-": OperatorMatrix(basis, km),
        "K3": OperatorMatrix(basis, k3, True),
        "K1": OperatorMatrix(basis, (kp + km) / 2, True),
        "K2": OperatorMatrix(basis, (kp - km) / 2j, True),
    }


def build_one_mode_quadratic(cutoff: int, parity: str) -> dict[str, OperatorMatrix]:
    """Quadratic one-mode realization on the even (k=1/4) or odd (k=3/4) subspace.

    Args:
        cutoff: highest Fock level kept; must be even and >= 2.
        parity: ``"even"`` or ``"odd"``.
    """
    if cutoff < 2 or cutoff % 2:
        raise ValueError("cutoff must be even and >= 2")
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    return quadratic_generators(FockBasis(cutoff, parity))


def build_two_boson_realization(cutoff_a: int, cutoff_b: int) -> dict[str, OperatorMatrix]:
    """K- = ab, K+ = a+b+, K3 = (a+a + b+b + 1)/2 on the product basis."""
    basis = TwoModeBasis(cutoff_a, cutoff_b)
    a = _lowering(cutoff_a)
    b = _lowering(cutoff_b)
    ia = sp.identity(cutoff_a + 1, format="csr")
    ib = sp.identity(cutoff_b + 1, format="csr")
    km = sp.kron(a, b, format="csr")
    kp = km.conj().T.tocsr()
    na = sp.kron(a.conj().T @ a, ib)
    nb = sp.kron(ia, b.conj().T @ b)
    k3 = ((na + nb + sp.identity(basis.dim)) / 2).tocsr()
    return {
        "K+": OperatorMatrix(basis, kp),
        "K-": OperatorMatrix(basis, km),
        "K3": OperatorMatrix(basis, k3, True),
        "K1": OperatorMatrix(basis, (kp + km) / 2, True),
        "K2": OperatorMatrix(basis, (kp - km) / 2j, True),
    }


def two_mode_operators(cutoff_a: int, cutoff_b: int) -> dict[str, OperatorMatrix]:
    """a, a+, b, b+ embedded in the product basis."""
    basis = TwoModeBasis(cutoff_a, cutoff_b)
    a = _lowering(cutoff_a)
    b = _lowering(cutoff_b)
    ia = sp.identity(cutoff_a + 1, format="csr")
    ib = sp.identity(cutoff_b + 1, format="csr")
    A = sp.kron(a, ib, format="csr")
    B = sp.kron(ia, b, format="csr")
    return {
        "a": OperatorMatrix(basis, A),
        "a+": OperatorMatrix(basis, A.conj().T.tocsr()),
        "b": OperatorMatrix(basis, B),
        "b+": OperatorMatrix(basis, B.conj().T.tocsr()),
    }


# ----------------------------------------------------------------- moments

def _amps(state, basis):
    if isinstance(state, StateVector):
        if state.basis != basis:
            raise BasisMismatch("state and operator on different bases")
        return state.amplitudes
    if isinstance(state, TwoModeState):
        if state.basis != basis:
            raise BasisMismatch("state and operator on different bases")
        return state.flat()
    return np.asarray(state)


def expectation(state, op: OperatorMatrix) -> complex:
    """<psi|op|psi> for a normalized state."""
    psi = _amps(state, op.basis)
    return complex(np.vdot(psi, op.entries @ psi))


def covariance(state, x: OperatorMatrix, y: OperatorMatrix) -> float:
    """Symmetrized covariance <XY + YX>/2 - <X><Y> of Hermitian operators.

    Raises:
        NotHermitian: if either operator is not tagged Hermitian.
    """
    if not (x.hermitian and y.hermitian):
        raise NotHermitian("covariance requires Hermitian operators")
    if x.basis != y.basis:
        raise BasisMismatch("operators on different bases")
    psi = _amps(state, x.basis)
    xp = x.entries @ psi
    yp = y.entries @ psi
    mx = np.vdot(psi, xp).real
    my = np.vdot(psi, yp).real
    return float(np.vdot(xp, yp).real - mx * my)


def variance(state, op: OperatorMatrix) -> float:
    """<X^2> - <X>^2; non-Hermitian X gives <X+X> - |<X>|^2."""
    psi = _amps(state, op.basis)
    xp = op.entries @ psi
    m = np.vdot(psi, xp)
    return float(np.vdot(xp, xp).real - abs(m) ** 2)
