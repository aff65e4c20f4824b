"""The set of correlations a qubit family produces under two-outcome tests.

For states ``rho_x = I/2 + s_x . sigma`` (rows of ``S``) and a test
``pi0 = a I + b . sigma`` the correlation is ``p = a u + 2 S b`` with
``|b| <= min(a, 1 - a)``. The reachable set is therefore

    K = { c u + S z : 0 <= c <= 1, |z| <= 2 min(c, 1 - c) },

the convex hull of ``0``, ``u`` and the ellipsoid ``E = 1/2 u + S * Ball``. In
terms of ``Q = S S^T`` a point ``1/2 u + x`` lies in ``E`` iff
``(I - Q^+ Q) x = 0`` and ``x^T Q^+ x <= 1``.

The support function of ``K`` in direction ``w`` is
``W(w) = max(0, u.w, u.w / 2 + |S^T w|)``, attained by the projector onto the
positive part of ``sum_x w_x rho_x``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateDirection, DimensionMismatch
from .qubit_algebra import (
    DEGENERATE_NORM,
    BinaryTest,
    HermitianOp,
    QubitState,
    born,
    overlap,
    positive_part_projector,
)
from .sampling import map_chunks, unit_vectors
from .spectral import RANK_TOL, ThinFactorization, factorize, pinv_quadratic_form, range_residual

MEMBERSHIP_TOL = 1e-9
WITNESS_TOL = 1e-8
# |(I - UU^T) u| below this (times sqrt(m)) counts as u in range(Q)
U_IN_RANGE_TOL = 1e-8
ASCENT_ITERATIONS = 200


@dataclass(frozen=True)
class StateFamily:
    """Ordered family of ``m`` qubit states with its cached thin factorization."""

    states: tuple
    rank_tol: float = RANK_TOL

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("a family needs at least one state")
        for st in states:
            if not isinstance(st, QubitState):
                raise TypeError(f"expected QubitState, got {type(st).__name__}")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_bloch(cls, rows, rank_tol: float = RANK_TOL) -> "StateFamily":
        return cls(tuple(QubitState.from_bloch(r) for r in np.atleast_2d(rows)), rank_tol)

    @classmethod
    def from_half_bloch(cls, rows, rank_tol: float = RANK_TOL) -> "StateFamily":
        return cls(tuple(QubitState(r) for r in np.atleast_2d(rows)), rank_tol)

    @property
    def m(self) -> int:
        return len(self.states)

    @cached_property
    def S(self) -> np.ndarray:
        s = np.array([st.s for st in self.states], dtype=float)
        s.setflags(write=False)
        return s

    @cached_property
    def factorization(self) -> ThinFactorization:
        return factorize(self.S, self.rank_tol)

    @property
    def rank(self) -> int:
        return self.factorization.rank

    @property
    def u(self) -> np.ndarray:
        return np.ones(self.m)

    @cached_property
    def _u_split(self):
        # (t, |t|, u in range?) where t = (I - UU^T) u
        t = range_residual(self.factorization, self.u)
        tn = float(np.linalg.norm(t))
        return t, tn, tn <= U_IN_RANGE_TOL * np.sqrt(self.m)


def _direction(family: StateFamily, w) -> np.ndarray:
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape[0] != family.m:
        raise DimensionMismatch(f"direction has {w.shape[0]} entries, family has {family.m} states")
    if not np.all(np.isfinite(w)):
        raise ValueError("direction has non-finite entries")
    if not np.any(w):
        raise ValueError("direction must not be the zero vector")
    return w


def _correlation(family: StateFamily, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != family.m:
        raise DimensionMismatch(f"correlation has {p.shape[-1]} entries, family has {family.m} states")
    return p


def gram_matrix(family: StateFamily) -> np.ndarray:
    """``Q[x0, x1] = Tr[rho_x0 rho_x1] / 2 - 1/4``, from pairwise overlaps."""
    m = family.m
    q = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            q[i, j] = q[j, i] = 0.5 * overlap(family.states[i], family.states[j]) - 0.25
    return q


def weighted_operator(family: StateFamily, w) -> HermitianOp:
    """``sum_x w_x rho_x`` in Pauli coordinates."""
    w = _direction(family, w)
    return HermitianOp(0.5 * w.sum(), family.S.T @ w)


def support_value(family: StateFamily, w) -> float:
    """Maximum of ``p . w`` over all correlations of the family."""
    w = _direction(family, w)
    a = 0.5 * float(w.sum())
    b = float(np.linalg.norm(family.S.T @ w))
    return max(0.0, a - b) + max(0.0, a + b)


def support_values(family: StateFamily, ws) -> np.ndarray:
    """Vectorized ``support_value`` over the rows of ``ws``."""
    ws = _correlation(family, np.atleast_2d(ws))
    a = 0.5 * ws.sum(axis=1)
    b = np.linalg.norm(ws @ family.S, axis=1)
    return np.maximum(0.0, a - b) + np.maximum(0.0, a + b)


def extremal_test(family: StateFamily, w) -> BinaryTest:
    """Projector onto the positive part of ``sum_x w_x rho_x``.

    Raises
    ------
    DegenerateDirection
        When ``S^T w`` (nearly) vanishes and the rank-one branch is selected.
    """
    return positive_part_projector(weighted_operator(family, w))


def correlation_of(family: StateFamily, test: BinaryTest) -> np.ndarray:
    return np.array([born(st, test) for st in family.states])


def correlations(family: StateFamily, a, b) -> np.ndarray:
    """Correlations of a batch of tests given as arrays ``a`` (N,) and ``b`` (N, 3)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[:, None] + 2.0 * b @ family.S.T


def boundary_correlation(family: StateFamily, w) -> np.ndarray:
    """Correlation of ``extremal_test(family, w)``; it attains ``support_value``."""
    return correlation_of(family, extremal_test(family, w))


def boundary_correlations(family: StateFamily, ws) -> np.ndarray:
    """Vectorized ``boundary_correlation`` over the rows of ``ws``."""
    ws = _correlation(family, np.atleast_2d(ws))
    a = 0.5 * ws.sum(axis=1)
    stw = ws @ family.S
    b = np.linalg.norm(stw, axis=1)
    full = a - b > 0
    rank_one = ~full & (a + b > 0)
    if np.any(rank_one & (b < DEGENERATE_NORM)):
        raise DegenerateDirection("S^T w vanishes on a rank-one branch")
    out = np.zeros_like(ws)
    out[full] = 1.0
    if np.any(rank_one):
        n = stw[rank_one] / b[rank_one, None]
        out[rank_one] = 0.5 + n @ family.S.T
    return out


@dataclass(frozen=True)
class EllipsoidSpec:
    """``{1/2 u + x : (I - Q^+ Q) x = 0, x^T Q^+ x <= 1}``."""

    center: np.ndarray
    factorization: ThinFactorization
    rank: int

    def quadratic_form(self, p) -> float:
        return pinv_quadratic_form(self.factorization, np.asarray(p, dtype=float) - self.center)

    def affine_residual(self, p) -> np.ndarray:
        return range_residual(self.factorization, np.asarray(p, dtype=float) - self.center)

    def contains(self, p, tol: float = MEMBERSHIP_TOL) -> bool:
        return bool(
            np.linalg.norm(self.affine_residual(p)) <= tol and self.quadratic_form(p) <= 1.0 + tol
        )


def ellipsoid_spec(family: StateFamily) -> EllipsoidSpec:
    f = family.factorization
    return EllipsoidSpec(np.full(family.m, 0.5), f, f.rank)


def ellipsoid_surface_point(family: StateFamily, w) -> np.ndarray:
    """``1/2 u + Q w / |S^T w|``, the ellipsoid point with outward normal ``w``."""
    w = _direction(family, w)
    stw = family.S.T @ w
    nrm = float(np.linalg.norm(stw))
    if nrm <= DEGENERATE_NORM:
        raise DegenerateDirection(f"|S^T w| = {nrm:.3g}; no unique surface point")
    return 0.5 + family.S @ stw / nrm


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


class Tag(str, enum.Enum):
    INSIDE = "Inside"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class InsideWitness:
    """``p = beta u + gamma e`` with ``e`` in the ellipsoid and ``alpha = 1 - beta - gamma``."""

    alpha: float
    beta: float
    gamma: float
    e: np.ndarray


@dataclass(frozen=True)
class MembershipVerdict:
    tag: Tag
    gap: float
    c: float
    inside_witness: Optional[InsideWitness] = None
    outside_witness: Optional[np.ndarray] = None
    margin: Optional[float] = None

    @property
    def is_member(self) -> bool:
        return self.tag in (Tag.INSIDE, Tag.BOUNDARY)


@dataclass(frozen=True)
class HullSlack:
    """Per-point outcome of the one-dimensional hull reduction.

    ``c`` is the coefficient of ``u``; ``f`` is
    ``sqrt((p - c u)^T Q^+ (p - c u)) - 2 min(c, 1 - c)`` at that ``c`` (negative
    strictly inside); ``residual`` is ``|(I - U U^T)(p - c u)|``.
    """

    c: np.ndarray
    f: np.ndarray
    residual: np.ndarray

    def gap(self, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return np.where(self.residual > tol, np.maximum(self.residual, self.f), self.f)


def _f_of_c(y, g, c):
    h = np.sqrt(np.sum((y - c[:, None] * g) ** 2, axis=1))
    return h - 2.0 * np.minimum(c, 1.0 - c)


def _argmin_norm_plus_linear(y, g, k, lo, hi):
    """Minimizer over [lo, hi] of ``|y - c g| + k c`` for each row of ``y``."""
    n = y.shape[0]
    g2 = float(g @ g)
    if g2 <= abs(k) ** 2:
        # slope of the norm term never exceeds |k|: monotone in c
        return np.full(n, hi if k < 0 else lo)
    c0 = (y @ g) / g2
    d = np.linalg.norm(y - c0[:, None] * g, axis=1)
    gn = np.sqrt(g2)
    delta = abs(k) * d / (gn * np.sqrt(g2 - k * k))
    return np.clip(c0 - np.sign(k) * delta, lo, hi)


def hull_slack(family: StateFamily, points) -> HullSlack:
    """Vectorized feasibility of ``p in conv{0, u, E}`` over the rows of ``points``.

    If ``u`` leaves the range of ``Q`` the coefficient ``c`` is pinned by the
    out-of-range component of ``p``. Otherwise the convex function ``f(c)`` is
    minimized exactly on ``[0, 1/2]`` and ``[1/2, 1]``.
    """
    P = _correlation(family, np.atleast_2d(np.asarray(points, dtype=float)))
    f = family.factorization
    t, tn, u_in_range = family._u_split
    y = (P @ f.left) / f.sigma
    g = (family.u @ f.left) / f.sigma
    off = range_residual(f, P)
    if u_in_range:
        cands = [
            _argmin_norm_plus_linear(y, g, -2.0, 0.0, 0.5),
            _argmin_norm_plus_linear(y, g, 2.0, 0.5, 1.0),
            np.zeros(len(P)),
            np.full(len(P), 0.5),
            np.ones(len(P)),
        ]
        vals = np.stack([_f_of_c(y, g, c) for c in cands])
        best = np.argmin(vals, axis=0)
        c = np.stack(cands)[best, np.arange(len(P))]
        fv = vals[best, np.arange(len(P))]
    else:
        c = (off @ t) / (tn * tn)
        fv = _f_of_c(y, g, c)
    res = np.linalg.norm(off - c[:, None] * t, axis=1)
    return HullSlack(c, fv, res)


def _inside_witness(family: StateFamily, p: np.ndarray, c: float) -> InsideWitness:
    f = family.factorization
    c = min(1.0, max(0.0, c))
    gamma = 2.0 * min(c, 1.0 - c)
    beta = c - 0.5 * gamma
    alpha = 1.0 - beta - gamma
    d = p - c * family.u
    x = (d @ f.left) @ f.left.T
    root_h = np.sqrt(pinv_quadratic_form(f, d)) if f.rank else 0.0
    scale = max(gamma, root_h)
    e = 0.5 * family.u + (x / scale if scale > 0 else 0.0 * x)
    return InsideWitness(alpha, beta, gamma, e)


def check_inside_witness(family: StateFamily, p, witness: InsideWitness) -> dict:
    """Residuals of the equations an inside witness must satisfy."""
    p = _correlation(family, np.asarray(p, dtype=float))
    spec = ellipsoid_spec(family)
    return {
        "reconstruction": float(
            np.max(np.abs(p - witness.beta * family.u - witness.gamma * witness.e))
        ),
        "simplex": float(
            max(
                -min(witness.alpha, witness.beta, witness.gamma),
                abs(witness.alpha + witness.beta + witness.gamma - 1.0),
            )
        ),
        "affine": float(np.linalg.norm(spec.affine_residual(witness.e))),
        "quadratic_excess": float(spec.quadratic_form(witness.e) - 1.0),
    }


def witness_holds(family: StateFamily, p, witness: InsideWitness, tol: float = WITNESS_TOL) -> bool:
    r = check_inside_witness(family, p, witness)
    return all(v <= tol for v in r.values())


def _project_onto_ball_image(f: ThinFactorization, q: np.ndarray, radius: float) -> np.ndarray:
    """Closest point to ``q`` in ``{S z : |z| <= radius}``."""
    if radius <= 0.0 or f.rank == 0:
        return np.zeros_like(q)
    yq = q @ f.left
    zeta = yq / f.sigma
    if np.linalg.norm(zeta) <= radius:
        return f.left @ yq
    sy = f.sigma * yq

    def excess(mu):
        return np.linalg.norm(sy / (f.sigma**2 + mu)) - radius

    mu = brentq(excess, 0.0, np.linalg.norm(sy) / radius, xtol=1e-16, maxiter=500)
    zeta = sy / (f.sigma**2 + mu)
    return f.left @ (f.sigma * zeta)


def project_onto_hull(family: StateFamily, p) -> tuple[np.ndarray, float]:
    """Euclidean projection of ``p`` onto the correlation set, and its ``c`` value."""
    p = _correlation(family, np.asarray(p, dtype=float))
    f = family.factorization
    u = family.u

    def nearest(c):
        q = p - c * u
        return c * u + _project_onto_ball_image(f, q, 2.0 * min(c, 1.0 - c))

    def dist(c):
        return float(np.linalg.norm(p - nearest(c)))

    res = minimize_scalar(dist, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    cs = [float(res.x), 0.0, 0.5, 1.0]
    c = min(cs, key=dist)
    return nearest(c), c


def _margin(family: StateFamily, p: np.ndarray, w: np.ndarray) -> float:
    return float(p @ w) - support_value(family, w)


def separating_direction(
    family: StateFamily, p, slack_c: Optional[float] = None, tol: float = MEMBERSHIP_TOL
):
    """Best unit ``w`` found for ``p . w - W(w)``, with that margin.

    Candidates: the out-of-range residual, the out-of-range part of ``u``, ``+-u``,
    the ``Q^+`` gradient at ``slack_c``, and the direction to the Euclidean
    projection onto the set. If none clears ``tol``, the best is pushed further
    by coordinate ascent on the unit sphere.
    """
    p = _correlation(family, np.asarray(p, dtype=float))
    f = family.factorization
    u = family.u
    t, tn, _ = family._u_split
    c = slack_c if slack_c is not None else float(hull_slack(family, p).c[0])
    cands = [u, -u]
    if tn > 0:
        cands += [t, -t]
    cands.append(range_residual(f, p) - c * t)
    if f.rank:
        d = p - c * u
        cands.append(f.left @ (((d @ f.left) / f.sigma) / f.sigma))
    proj, _ = project_onto_hull(family, p)
    cands.append(p - proj)

    best_w, best = None, -np.inf
    for w in cands:
        n = np.linalg.norm(w)
        if not np.isfinite(n) or n < 1e-300:
            continue
        w = w / n
        mg = _margin(family, p, w)
        if mg > best:
            best_w, best = w, mg
    if best_w is None:
        best_w, best = u / np.linalg.norm(u), _margin(family, p, u / np.linalg.norm(u))

    if best > tol:
        return best_w, best
    step = 0.1
    w = best_w
    for _ in range(ASCENT_ITERATIONS):
        improved = False
        for i in range(family.m):
            for sgn in (1.0, -1.0):
                trial = w.copy()
                trial[i] += sgn * step
                nrm = np.linalg.norm(trial)
                if nrm == 0:
                    continue
                trial /= nrm
                mg = _margin(family, p, trial)
                if mg > best:
                    w, best, improved = trial, mg, True
        if not improved:
            step *= 0.5
            if step < 1e-15:
                break
    return w, best


def _is_isolated_point(family: StateFamily, p: np.ndarray, tol: float) -> bool:
    return bool(np.max(np.abs(p)) <= tol or np.max(np.abs(p - family.u)) <= tol)


def membership(family: StateFamily, p, tol: float = MEMBERSHIP_TOL) -> MembershipVerdict:
    """Decide whether ``p`` is a correlation of ``family``.

    Members come with ``(beta, gamma, e)`` such that ``p = beta u + gamma e``;
    ``Outside`` comes with a direction ``w`` whose margin ``p . w - W(w)``
    exceeds ``tol`` (re-checkable with :func:`support_value`). When the slack
    says outside but no such direction is found the verdict is ``Inconclusive``.
    ``0`` and ``u`` (the hull's isolated generators) are reported ``Inside``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = _correlation(family, np.asarray(p, dtype=float).reshape(-1))
    if p.ndim != 1:
        raise DimensionMismatch("expected a single correlation vector")
    sl = hull_slack(family, p)
    c = float(sl.c[0])
    gap = float(sl.gap(tol)[0])
    if _is_isolated_point(family, p, tol):
        c0 = 0.0 if np.max(np.abs(p)) <= tol else 1.0
        return MembershipVerdict(Tag.INSIDE, gap, c0, _inside_witness(family, p, c0))
    if gap < -tol:
        return MembershipVerdict(Tag.INSIDE, gap, c, _inside_witness(family, p, c))
    if gap <= tol:
        return MembershipVerdict(Tag.BOUNDARY, gap, c, _inside_witness(family, p, c))
    w, margin = separating_direction(family, p, c, tol)
    if margin > tol:
        return MembershipVerdict(Tag.OUTSIDE, gap, c, outside_witness=w, margin=margin)
    return MembershipVerdict(Tag.INCONCLUSIVE, gap, c, outside_witness=w, margin=margin)


def verify_outside_witness(family: StateFamily, p, w, tol: float = MEMBERSHIP_TOL) -> bool:
    p = _correlation(family, np.asarray(p, dtype=float))
    return float(p @ np.asarray(w, dtype=float)) - support_value(family, w) > tol


# ---------------------------------------------------------------------------
# sampling and comparison
# ---------------------------------------------------------------------------


def sample_boundary(family: StateFamily, count: int, seed: int, workers: int = 1):
    """``count`` pairs ``(w, p)`` with ``w`` uniform on the sphere and ``p`` extremal."""
    if count < 1:
        raise ValueError("count must be >= 1")

    def chunk(rng, n):
        ws = unit_vectors(rng, n, family.m)
        return ws, boundary_correlations(family, ws)

    parts = map_chunks(chunk, seed, count, workers)
    ws = np.concatenate([a for a, _ in parts])
    ps = np.concatenate([b for _, b in parts])
    return list(zip(ws, ps))


class Order(str, enum.Enum):
    EQUAL = "Equal"
    DOMINATES = "Dominates"
    DOMINATED_BY = "DominatedBy"
    INCOMPARABLE = "Incomparable"


@dataclass(frozen=True)
class ComparisonVerdict:
    """Support-function comparison of two families on a finite direction set.

    ``a_not_superset`` is a direction with ``W_A < W_B`` (exact proof that the set
    of ``A`` does not contain that of ``B``); ``b_not_superset`` the reverse.
    Containment claims without a witness hold only on the ``directions_checked``
    sampled directions.
    """

    tag: Order
    directions_checked: int
    a_not_superset: Optional[np.ndarray] = None
    b_not_superset: Optional[np.ndarray] = None
    max_deficit_a: float = 0.0
    max_deficit_b: float = 0.0
    sampled: bool = field(default=True)


def compare_families(
    a: StateFamily, b: StateFamily, directions: int, seed: int, tol: float = 1e-12, workers: int = 1
) -> ComparisonVerdict:
    """Compare the correlation sets of ``a`` and ``b`` through their support functions."""
    if a.m != b.m:
        raise DimensionMismatch(f"families have {a.m} and {b.m} states")
    m = a.m
    eye = np.eye(m)
    fixed = np.vstack([eye, -eye, np.ones((1, m)), -np.ones((1, m))])
    sampled = map_chunks(lambda rng, n: unit_vectors(rng, n, m), seed, directions, workers)
    ws = np.vstack([fixed] + sampled)
    wa = support_values(a, ws)
    wb = support_values(b, ws)
    deficit_a = wb - wa  # > 0 where A fails to contain B
    deficit_b = wa - wb
    ia, ib = int(np.argmax(deficit_a)), int(np.argmax(deficit_b))
    a_bad = deficit_a[ia] > tol
    b_bad = deficit_b[ib] > tol
    if a_bad and b_bad:
        tag = Order.INCOMPARABLE
    elif a_bad:
        tag = Order.DOMINATED_BY
    elif b_bad:
        tag = Order.DOMINATES
    else:
        tag = Order.EQUAL
    return ComparisonVerdict(
        tag=tag,
        directions_checked=len(ws),
        a_not_superset=ws[ia].copy() if a_bad else None,
        b_not_superset=ws[ib].copy() if b_bad else None,
        max_deficit_a=float(deficit_a[ia]),
        max_deficit_b=float(deficit_b[ib]),
        sampled=tag is not Order.INCOMPARABLE,
    )


def rank_diagnostics(family: StateFamily, tol: float = 1e-9) -> dict:
    """Number of linearly independent states and whether the identity is in their span."""
    mats = np.column_stack([np.full(family.m, 0.5), family.S])
    sv = np.linalg.svd(mats, compute_uv=False)
    l = int(np.sum(sv > tol * max(1.0, sv[0])))
    target = np.array([1.0, 0.0, 0.0, 0.0])
    coef, *_ = np.linalg.lstsq(mats.T, target, rcond=None)
    in_span = bool(np.linalg.norm(mats.T @ coef - target) <= 1e-9)
    return {"independent_states": l, "identity_in_span": in_span}

