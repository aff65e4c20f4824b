"""Closed forms for two concrete families.

* a pair of pure states at Bloch angle ``alpha``;
* ``m`` pure states evenly spaced on a great circle of the Bloch sphere
  (``m = 4`` is the pair of mutually unbiased bases).
"""
from __future__ import annotations

import numpy as np

from .correlation_set import StateFamily
from .errors import DegenerateAlpha

AFFINE_TOL = 1e-9


def pure_pair_family(alpha: float) -> StateFamily:
    """``|0>`` and ``cos(alpha/2)|0> + sin(alpha/2)|1>``."""
    if not 0.0 <= alpha <= np.pi:
        raise ValueError(f"alpha = {alpha} outside [0, pi]")
    return StateFamily.from_half_bloch([[0.0, 0.0, 0.5], [0.5 * np.sin(alpha), 0.0, 0.5 * np.cos(alpha)]])


def pure_pair_ellipse_coefficients(alpha: float) -> tuple[float, float]:
    if alpha <= 0.0 or alpha >= np.pi:
        raise DegenerateAlpha("the pair ellipse collapses at alpha = 0 and alpha = pi")
    return 1.0 / (1.0 + np.cos(alpha)), 1.0 / (1.0 - np.cos(alpha))


def pure_pair_ellipse_lhs(alpha: float, p) -> float:
    """``(p0 + p1 - 1)^2 / (1 + cos a) + (p0 - p1)^2 / (1 - cos a)``; the ellipse is ``<= 1/2``."""
    k_sum, k_diff = pure_pair_ellipse_coefficients(alpha)
    p0, p1 = np.asarray(p, dtype=float)
    return k_sum * (p0 + p1 - 1.0) ** 2 + k_diff * (p0 - p1) ** 2


def degenerate_pair_constraint(alpha: float, p, tol: float = AFFINE_TOL) -> bool:
    """Ellipse membership for the collapsed pairs, where the ellipse is a segment.

    ``alpha = 0`` requires ``p0 = p1`` and ``alpha = pi`` requires ``p0 + p1 = 1``,
    with the point inside the unit square. At ``alpha = 0`` this is the whole
    correlation set; at ``alpha = pi`` the hull with ``0`` and ``u`` fills the square.
    """
    p0, p1 = np.asarray(p, dtype=float)
    if alpha == 0.0:
        on_line = abs(p0 - p1) <= tol
    elif alpha == np.pi:
        on_line = abs(p0 + p1 - 1.0) <= tol
    else:
        raise ValueError("degenerate_pair_constraint needs alpha exactly 0 or pi")
    in_square = min(p0, p1) >= -tol and max(p0, p1) <= 1.0 + tol
    return bool(on_line and in_square)


def polygon_family(m: int) -> StateFamily:
    """``cos(pi x/m)|0> + sin(pi x/m)|1>`` for ``x = 0..m-1``."""
    if m < 2:
        raise ValueError("polygon needs m >= 2")
    th = 2.0 * np.pi * np.arange(m) / m
    return StateFamily.from_half_bloch(0.5 * np.column_stack([np.sin(th), np.zeros(m), np.cos(th)]))


def circulant_eigenvalues(m: int) -> np.ndarray:
    """``lambda_j = 1/4 sum_k cos(2 pi k/m) exp(2 pi i j (m - k)/m)`` by direct summation."""
    if m < 2:
        raise ValueError("polygon needs m >= 2")
    k = np.arange(m)
    j = k[:, None]
    terms = np.cos(2.0 * np.pi * k / m) * np.exp(2j * np.pi * j * (m - k) / m)
    return 0.25 * terms.sum(axis=1)


def circulant_eigenvectors(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized ``v_pm[k] = exp(+-2 pi i k/m) / sqrt(m)``."""
    k = np.arange(m)
    v = np.exp(2j * np.pi * k / m) / np.sqrt(m)
    return v, v.conj()


def polygon_ellipse(m: int, p) -> tuple[float, float, float]:
    """Affine residual, quadratic value and its bound for the polygon ellipsoid.

    Returns ``(|(I - P)(p - u/2)|, |v_+^dagger (p - u/2)|^2, bound)`` where ``P``
    projects onto ``span(v_+, v_-)``. Membership needs the residual to vanish and
    the quadratic value to stay below ``bound``: ``m/16`` for ``m >= 3``, and
    ``1/2`` for ``m = 2`` where ``v_+ = v_-`` carries the whole eigenvalue ``1/2``.
    """
    x = np.asarray(p, dtype=float) - 0.5
    vp, vm = circulant_eigenvectors(m)
    if m == 2:
        proj = np.outer(vp, vp.conj()).real
        bound = 0.5
    else:
        proj = (np.outer(vp, vp.conj()) + np.outer(vm, vm.conj())).real
        bound = m / 16.0
    return float(np.linalg.norm(x - proj @ x)), float(abs(vp.conj() @ x) ** 2), bound


def mub_membership(p, tol: float = AFFINE_TOL, include_isolated: bool = True) -> bool:
    """Two-MUB ellipsoid test: ``p0 + p2 = p1 + p3 = 1`` and ``|p|^2 <= 3/2``.

    With ``include_isolated`` the points ``0`` and ``u`` are also accepted.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (4,):
        raise ValueError("MUB correlations have four entries")
    if include_isolated and (np.max(np.abs(p)) <= tol or np.max(np.abs(p - 1.0)) <= tol):
        return True
    return bool(
        abs(p[0] + p[2] - 1.0) <= tol and abs(p[1] + p[3] - 1.0) <= tol and p @ p <= 1.5 + tol
    )
