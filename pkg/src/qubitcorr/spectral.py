"""Thin SVD of the m x 3 half-Bloch matrix and pseudoinverse forms of ``Q = S S^T``.

Everything spectral is done on the 3 x 3 Gram matrix ``S^T S`` (implicitly, by
rotating the three columns of ``S``); the m x m matrix ``Q`` is never
diagonalized. With ``S = U diag(sigma) V^T``:

* ``Q = U diag(sigma**2) U^T``
* ``x^T Q^+ x = sum_i (U_i . x)**2 / sigma_i**2``
* ``Q^+ Q = U U^T``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-9
JACOBI_TOL = 1e-15
JACOBI_MAX_SWEEPS = 64


def jacobi_columns(s: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """One-sided cyclic Jacobi: rotate the columns of ``s`` until mutually orthogonal.

    Each rotation is the Jacobi rotation that annihilates one off-diagonal entry
    of the Gram matrix ``s.T @ s``; the entry is recomputed from the current
    columns rather than updated in place, which keeps small singular values
    accurate. A pair counts as converged when
    ``|g_pq| <= tol * sqrt(g_pp * g_qq)``.

    Returns
    -------
    rotated : ndarray, shape (m, n)
        ``s @ v``, with mutually orthogonal columns.
    v : ndarray, shape (n, n)
        Orthogonal matrix of accumulated rotations (eigenvectors of ``s.T s``).
    """
    a = np.array(s, dtype=float, copy=True)
    n = a.shape[1]
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = a[:, p] @ a[:, p]
                aqq = a[:, q] @ a[:, q]
                apq = a[:, p] @ a[:, q]
                if apq == 0.0 or abs(apq) <= tol * np.sqrt(app * aqq):
                    continue
                rotated = True
                # tan of the rotation angle, smaller root; overflow-free form
                d = aqq - app
                t = 1.0 if d == 0.0 else np.sign(d) * 2.0 * apq / (abs(d) + np.hypot(d, 2.0 * apq))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = c * t
                for m in (a, v):
                    mp, mq = m[:, p].copy(), m[:, q].copy()
                    m[:, p] = c * mp - sn * mq
                    m[:, q] = sn * mp + c * mq
        if not rotated:
            break
    return a, v


def gram_eigh(s) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors of ``s.T @ s`` via :func:`jacobi_columns`."""
    a, v = jacobi_columns(np.asarray(s, dtype=float))
    w = np.sum(a * a, axis=0)
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


@dataclass(frozen=True)
class ThinFactorization:
    """``S = left @ diag(sigma) @ right.T`` restricted to the retained rank."""

    left: np.ndarray
    sigma: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def m(self) -> int:
        return int(self.left.shape[0])

    @property
    def eigenvalues(self) -> np.ndarray:
        """Nonzero eigenvalues of ``Q``, descending."""
        return self.sigma**2

    def gram(self) -> np.ndarray:
        return (self.left * self.sigma**2) @ self.left.T

    def range_projector(self) -> np.ndarray:
        return self.left @ self.left.T


def factorize(s, rank_tol: float = RANK_TOL) -> ThinFactorization:
    """Thin SVD of ``s`` from the Jacobi eigenvectors of ``s.T @ s``.

    Singular values are the column norms of ``s @ V``. Values at or below
    ``rank_tol * max(1, sigma_max)`` are dropped; a zero matrix yields rank 0.
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D matrix")
    sv, v = jacobi_columns(s)
    sigma = np.linalg.norm(sv, axis=0)
    order = np.argsort(sigma)[::-1]
    sigma, v, sv = sigma[order], v[:, order], sv[:, order]
    cutoff = rank_tol * max(1.0, float(sigma[0]) if sigma.size else 0.0)
    keep = sigma > cutoff
    sigma, v, sv = sigma[keep], v[:, keep], sv[:, keep]
    u = sv / sigma if sigma.size else np.zeros((s.shape[0], 0))
    for arr in (u, sigma, v):
        arr.setflags(write=False)
    return ThinFactorization(u, sigma, v)


def whiten(f: ThinFactorization, x) -> np.ndarray:
    """Coordinates ``diag(1/sigma) U^T x``; works on a vector or on rows of a matrix."""
    x = np.asarray(x, dtype=float)
    return (x @ f.left) / f.sigma


def pinv_quadratic_form(f: ThinFactorization, x):
    """``x^T Q^+ x``; a float for a vector, an array for a stack of row vectors."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != f.m:
        raise ValueError(f"expected length {f.m}, got {x.shape[-1]}")
    y = whiten(f, x)
    out = np.sum(y * y, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def range_residual(f: ThinFactorization, x) -> np.ndarray:
    """``(I - U U^T) x``, the part of ``x`` outside the range of ``Q``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != f.m:
        raise ValueError(f"expected length {f.m}, got {x.shape[-1]}")
    return x - (x @ f.left) @ f.left.T
