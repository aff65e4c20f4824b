"""Exact 2x2 Hermitian arithmetic in the Pauli basis.

Every operator is written as ``scalar * I + vec . sigma`` with real coefficients,
so eigenvalues, traces and spectral projectors have closed forms. States keep
the half-Bloch vector ``s = r / 2`` (``rho = I/2 + s . sigma``); files and users
talk in full Bloch vectors ``r`` and convert at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, InvalidState, InvalidTest, NonHermitianInput

HERMITIAN_TOL = 1e-10
IDENTITY_TOL = 1e-12
DEGENERATE_NORM = 1e-14

IDENTITY = np.eye(2, dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def _vec3(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class HermitianOp:
    """``H = scalar * I + vec . sigma``."""

    scalar: float
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scalar", float(self.scalar))
        object.__setattr__(self, "vec", _vec3(self.vec))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def eigenvalues(self) -> tuple[float, float]:
        """Return ``(scalar - |vec|, scalar + |vec|)``."""
        n = self.norm
        return self.scalar - n, self.scalar + n

    def matrix(self) -> np.ndarray:
        return reconstruct(self)

    def positive_part_trace(self) -> float:
        lo, hi = self.eigenvalues()
        return max(0.0, lo) + max(0.0, hi)


@dataclass(frozen=True)
class QubitState:
    """Qubit density matrix ``I/2 + s . sigma`` stored by its half-Bloch vector."""

    s: np.ndarray

    def __post_init__(self):
        s = _vec3(self.s)
        if not np.all(np.isfinite(s)):
            raise InvalidState("half-Bloch vector has non-finite entries")
        if np.linalg.norm(s) > 0.5 + IDENTITY_TOL:
            raise InvalidState(
                f"half-Bloch norm {np.linalg.norm(s):.17g} exceeds 1/2; operator is not positive"
            )
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @classmethod
    def from_bloch(cls, r) -> "QubitState":
        return cls(0.5 * _vec3(r))

    @classmethod
    def from_matrix(cls, rho, tol: float = HERMITIAN_TOL) -> "QubitState":
        op = decompose(rho, tol=tol)
        if abs(op.scalar - 0.5) > tol:
            raise InvalidState(f"trace {2 * op.scalar:.17g} differs from 1")
        if op.norm > 0.5 + tol:
            raise InvalidState("matrix has a negative eigenvalue")
        s = op.vec
        n = np.linalg.norm(s)
        if n > 0.5:
            s = s * (0.5 / n)
        return cls(s)

    @property
    def bloch(self) -> np.ndarray:
        return 2.0 * self.s

    @property
    def purity(self) -> float:
        return 0.5 + 2.0 * float(self.s @ self.s)

    def operator(self) -> HermitianOp:
        return HermitianOp(0.5, self.s)

    def matrix(self) -> np.ndarray:
        return reconstruct(self.operator())


@dataclass(frozen=True)
class BinaryTest:
    """Two-outcome POVM with ``pi0 = a I + b . sigma`` and ``pi1 = I - pi0``."""

    a: float
    b: np.ndarray

    def __post_init__(self):
        a = float(self.a)
        b = _vec3(self.b)
        nb = float(np.linalg.norm(b))
        if not (np.isfinite(a) and np.all(np.isfinite(b))):
            raise InvalidTest("non-finite test coefficients")
        if a - nb < -IDENTITY_TOL or a + nb > 1.0 + IDENTITY_TOL:
            raise InvalidTest(f"effect eigenvalues {a - nb:.17g}, {a + nb:.17g} leave [0, 1]")
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def effect(self) -> HermitianOp:
        return HermitianOp(self.a, self.b)

    def complement(self) -> "BinaryTest":
        return BinaryTest(1.0 - self.a, -self.b)

    def matrix(self) -> np.ndarray:
        return reconstruct(self.effect())

    @property
    def rank(self) -> int:
        """Rank of ``pi0`` (0, 1 or 2), with eigenvalues below 1e-12 counted as zero."""
        lo, hi = self.effect().eigenvalues()
        return int(lo > IDENTITY_TOL) + int(hi > IDENTITY_TOL)


def decompose(m, tol: float = HERMITIAN_TOL) -> HermitianOp:
    """Pauli coefficients of a 2x2 Hermitian matrix.

    Raises
    ------
    NonHermitianInput
        If ``m`` differs from its conjugate transpose by more than ``tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if np.max(np.abs(m - m.conj().T)) > tol:
        raise NonHermitianInput("matrix is not Hermitian")
    scalar = 0.5 * np.trace(m).real
    vec = np.array([0.5 * np.trace(m @ p).real for p in PAULI])
    return HermitianOp(scalar, vec)


def reconstruct(op: HermitianOp) -> np.ndarray:
    return op.scalar * IDENTITY + np.tensordot(op.vec, PAULI, axes=1)


def born(state: QubitState, test: BinaryTest) -> float:
    """Probability ``Tr[rho pi0] = a + 2 s . b`` of outcome 0."""
    return test.a + 2.0 * float(state.s @ test.b)


def overlap(x: QubitState, y: QubitState) -> float:
    """``Tr[rho_x rho_y] = 1/2 + 2 s_x . s_y``."""
    return 0.5 + 2.0 * float(x.s @ y.s)


def positive_part_projector(h: HermitianOp) -> BinaryTest:
    """Projector onto the strictly positive eigenspace of ``h``.

    Zero eigenvalues are excluded. When only the upper eigenvalue is positive the
    result is the rank-one projector ``(I + n . sigma) / 2`` with ``n = vec/|vec|``.

    Raises
    ------
    DegenerateDirection
        If the rank-one branch is selected but ``|vec| < 1e-14``.
    """
    lo, hi = h.eigenvalues()
    if lo > 0.0:
        return BinaryTest(1.0, np.zeros(3))
    if hi > 0.0:
        n = h.norm
        if n < DEGENERATE_NORM:
            raise DegenerateDirection(f"|vec| = {n:.3g} too small to fix a projector axis")
        return BinaryTest(0.5, 0.5 * h.vec / n)
    return BinaryTest(0.0, np.zeros(3))
