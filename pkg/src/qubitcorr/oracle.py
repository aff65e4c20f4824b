"""Brute-force check of the analytic correlation set.

Random physical tests are pushed through the Born rule; every resulting
correlation must be accepted by :func:`membership`, and no sampled test may beat
the analytic support value.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .correlation_set import (
    StateFamily,
    Tag,
    _direction,
    correlations,
    extremal_test,
    hull_slack,
    membership,
)
from .errors import DegenerateDirection
from .qubit_algebra import BinaryTest
from .sampling import map_chunks

ORACLE_TOL = 1e-7


def random_tests(rng: np.random.Generator, n: int):
    """``n`` random tests as arrays ``(a, b)``.

    ``a`` is uniform on [0, 1], the axis uniform on the sphere and the Bloch
    radius uniform on ``[0, min(a, 1 - a)]``.
    """
    a = rng.uniform(0.0, 1.0, n)
    axis = rng.standard_normal((n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    radius = rng.uniform(0.0, 1.0, n) * np.minimum(a, 1.0 - a)
    return a, radius[:, None] * axis


def random_projectives(rng: np.random.Generator, n: int):
    """``n`` random rank-one projective tests: ``a = 1/2``, ``|b| = 1/2``."""
    axis = rng.standard_normal((n, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    return np.full(n, 0.5), 0.5 * axis


def random_test(rng: np.random.Generator) -> BinaryTest:
    a, b = random_tests(rng, 1)
    return BinaryTest(a[0], b[0])


def random_projective(rng: np.random.Generator) -> BinaryTest:
    a, b = random_projectives(rng, 1)
    return BinaryTest(a[0], b[0])


@dataclass
class OracleReport:
    samples: int
    violations: list = field(default_factory=list)
    max_gap: float = -np.inf
    empirical_support: Optional[float] = None
    max_projective_norm2: float = 0.0


def _draw_chunk(rng, n):
    # first half general tests, second half rank-one projective
    n_gen = n - n // 2
    a1, b1 = random_tests(rng, n_gen)
    a2, b2 = random_projectives(rng, n // 2)
    return np.concatenate([a1, a2]), np.concatenate([b1, b2]), np.arange(n) >= n_gen


def validate_inclusion(
    family: StateFamily, samples: int, seed: int, tol: float = ORACLE_TOL, workers: int = 1
) -> OracleReport:
    """Run random physical tests through membership and collect anything not accepted.

    A violation is any sample whose slack exceeds ``tol``. Its recorded gap is
    the certificate margin ``p . w - W(w)`` when an outside certificate exists,
    and the slack otherwise.
    """

    def chunk(rng, n):
        a, b, proj = _draw_chunk(rng, n)
        p = correlations(family, a, b)
        gap = hull_slack(family, p).gap(tol)
        pn2 = float(np.max(np.sum(p[proj] ** 2, axis=1))) if proj.any() else 0.0
        return a, b, p, gap, pn2

    report = OracleReport(samples)
    for a, b, p, gap, pn2 in map_chunks(chunk, seed, samples, workers):
        report.max_gap = max(report.max_gap, float(gap.max()))
        report.max_projective_norm2 = max(report.max_projective_norm2, pn2)
        for i in np.flatnonzero(gap > tol):
            v = membership(family, p[i], tol)
            if v.is_member:
                continue
            severity = v.margin if v.tag is Tag.OUTSIDE else v.gap
            report.violations.append((BinaryTest(a[i], b[i]), p[i].copy(), float(severity)))
    return report


def empirical_support(
    family: StateFamily, w, samples: int, seed: int, workers: int = 1
) -> float:
    """Largest ``p . w`` over sampled tests plus ``0``, ``I`` and the extremal projector pair."""
    w = _direction(family, w)

    def chunk(rng, n):
        a, b, _ = _draw_chunk(rng, n)
        return float(np.max(correlations(family, a, b) @ w))

    best = max(map_chunks(chunk, seed, samples, workers))
    fixed = [BinaryTest(0.0, np.zeros(3)), BinaryTest(1.0, np.zeros(3))]
    try:
        pp = extremal_test(family, w)
        fixed += [pp, pp.complement()]
    except DegenerateDirection:
        pass
    a = np.array([t.a for t in fixed])
    b = np.array([t.b for t in fixed])
    return max(best, float(np.max(correlations(family, a, b) @ w)))
