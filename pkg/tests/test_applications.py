import numpy as np
import pytest

from qubitcorr import (
    DegenerateAlpha,
    Tag,
    circulant_eigenvalues,
    degenerate_pair_constraint,
    ellipsoid_spec,
    gram_matrix,
    membership,
    mub_membership,
    polygon_family,
    pure_pair_ellipse_lhs,
    pure_pair_family,
)
from qubitcorr.applications import (
    circulant_eigenvectors,
    polygon_ellipse,
    pure_pair_ellipse_coefficients,
)
from qubitcorr.qubit_algebra import overlap


def test_pure_pair_family():
    same = pure_pair_family(0.0)
    np.testing.assert_array_equal(same.S[0], same.S[1])
    anti = pure_pair_family(np.pi)
    np.testing.assert_allclose(gram_matrix(anti), 0.25 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
    assert anti.rank == 1
    np.testing.assert_allclose(gram_matrix(pure_pair_family(np.pi / 2)), 0.25 * np.eye(2), atol=1e-15)
    for alpha in np.linspace(0, np.pi, 17):
        fam = pure_pair_family(alpha)
        assert overlap(*fam.states) == pytest.approx(np.cos(alpha / 2) ** 2, abs=1e-12)
    with pytest.raises(ValueError):
        pure_pair_family(4.0)


def test_ellipse_lhs_examples():
    assert pure_pair_ellipse_lhs(1.0, [0.5, 0.5]) == 0.0
    assert pure_pair_ellipse_lhs(np.pi / 2, [0.85, 0.15]) == pytest.approx(0.49, abs=1e-12)
    assert pure_pair_ellipse_lhs(np.pi / 2, [0.85355, 0.14645]) == pytest.approx(0.5, abs=1e-4)
    np.testing.assert_allclose(pure_pair_ellipse_coefficients(np.pi / 2), (1, 1), atol=1e-15)
    for bad in (0.0, np.pi):
        with pytest.raises(DegenerateAlpha):
            pure_pair_ellipse_lhs(bad, [0.5, 0.5])


def test_ellipse_lhs_matches_general_form(rng):
    for _ in range(1000):
        alpha = rng.uniform(1e-3, np.pi - 1e-3)
        p = rng.uniform(-0.5, 1.5, 2)
        spec = ellipsoid_spec(pure_pair_family(alpha))
        lhs = pure_pair_ellipse_lhs(alpha, p)
        assert lhs == pytest.approx(0.5 * spec.quadratic_form(p), abs=1e-10 * max(1.0, lhs))


def test_degenerate_pair_constraint():
    assert degenerate_pair_constraint(0.0, [0.3, 0.3])
    assert degenerate_pair_constraint(np.pi, [0.3, 0.7])
    assert not degenerate_pair_constraint(0.0, [0.3, 0.4])
    assert not degenerate_pair_constraint(0.0, [1.3, 1.3])
    with pytest.raises(ValueError):
        degenerate_pair_constraint(1.0, [0.3, 0.3])


@pytest.mark.parametrize("alpha", [0.0, np.pi])
def test_degenerate_pair_agrees_with_membership(alpha, rng):
    fam = pure_pair_family(alpha)
    assert fam.rank == 1
    for _ in range(300):
        p = rng.uniform(-0.2, 1.2, 2)
        if rng.uniform() < 0.5:
            p[1] = p[0] if alpha == 0 else 1 - p[0]
        expected = degenerate_pair_constraint(alpha, p)
        spec = ellipsoid_spec(fam)
        if expected:
            assert np.linalg.norm(spec.affine_residual(p)) < 1e-12
        v = membership(fam, p)
        if abs(v.gap) < 1e-7 or min(abs(p).min(), abs(1 - p).min()) < 1e-7:
            continue
        assert spec.contains(p) == expected
        if alpha == 0.0:
            assert v.is_member == expected
        else:
            # the anti-diagonal segment with 0 and u spans the unit square
            assert v.is_member == bool(np.all((p >= 0) & (p <= 1)))


def test_polygon_family():
    np.testing.assert_allclose(polygon_family(2).S, pure_pair_family(np.pi).S, atol=1e-15)
    q6 = gram_matrix(polygon_family(6))
    assert q6[0, 1] == pytest.approx(0.125, abs=1e-15)
    for m in (3, 5, 8):
        fam = polygon_family(m)
        assert overlap(fam.states[0], fam.states[1]) == pytest.approx(np.cos(np.pi / m) ** 2, abs=1e-12)
    with pytest.raises(ValueError):
        polygon_family(1)


def test_circulant_examples():
    np.testing.assert_allclose(circulant_eigenvalues(4), [0, 0.5, 0, 0.5], atol=1e-15)
    np.testing.assert_allclose(circulant_eigenvalues(3), [0, 0.375, 0.375], atol=1e-15)
    lam = circulant_eigenvalues(8)
    np.testing.assert_allclose(lam, [0, 1, 0, 0, 0, 0, 0, 1], atol=1e-14)


@pytest.mark.parametrize("m", range(3, 65))
def test_circulant_spectrum(m):
    lam = circulant_eigenvalues(m)
    assert np.max(np.abs(lam.imag)) < 1e-10
    expected = np.zeros(m)
    expected[[1, m - 1]] = m / 8
    np.testing.assert_allclose(lam.real, expected, atol=1e-10)
    sig2 = polygon_family(m).factorization.sigma ** 2
    np.testing.assert_allclose(sig2, [m / 8, m / 8], atol=1e-10)
    # eigenvectors of the dense circulant
    q = gram_matrix(polygon_family(m))
    vp, vm = circulant_eigenvectors(m)
    np.testing.assert_allclose(q @ vp, m / 8 * vp, atol=1e-12)
    np.testing.assert_allclose(q @ vm, m / 8 * vm, atol=1e-12)


def test_circulant_two_gon():
    # the two exponentials coincide at m = 2 and carry the whole trace of Q
    lam = circulant_eigenvalues(2)
    np.testing.assert_allclose(lam, [0, 0.5], atol=1e-15)
    np.testing.assert_allclose(polygon_family(2).factorization.sigma ** 2, [0.5], atol=1e-15)
    vp, vm = circulant_eigenvectors(2)
    np.testing.assert_allclose(vp, vm, atol=1e-15)


@pytest.mark.parametrize("m", [2, 3, 4, 5, 7, 12])
def test_polygon_ellipse_matches_general_form(m, rng):
    fam = polygon_family(m)
    spec = ellipsoid_spec(fam)
    for _ in range(300):
        w = rng.standard_normal(m)
        p = 0.5 + rng.uniform(0, 1.2) * fam.S @ (fam.S.T @ w)
        if rng.uniform() < 0.3:
            p = p + 0.1 * rng.standard_normal(m)
        res, quad, bound = polygon_ellipse(m, p)
        assert res == pytest.approx(np.linalg.norm(spec.affine_residual(p)), abs=1e-12)
        assert quad / bound == pytest.approx(spec.quadratic_form(p), abs=1e-10)


def test_mub_examples():
    p = np.array([1, 0.5, 0, 0.5])
    assert mub_membership(p) and p @ p == 1.5
    assert mub_membership(np.full(4, 0.5))
    assert not mub_membership([1, 1, 0, 0])
    assert mub_membership(np.zeros(4)) and mub_membership(np.ones(4))
    assert not mub_membership(np.zeros(4), include_isolated=False)


def test_mub_bound_is_m_over_16():
    # (p0 - p2)^2 + (p1 - p3)^2 <= 1 on the slice
    _, quad, bound = polygon_ellipse(4, [1, 0.5, 0, 0.5])
    assert bound == 0.25 and quad == pytest.approx(0.25, abs=1e-15)


def test_mub_agrees_with_membership(mub, rng):
    agree = 0
    for _ in range(10_000):
        p0, p1 = rng.uniform(-0.3, 1.3, 2)
        p = np.array([p0, p1, 1 - p0, 1 - p1])
        if abs(p @ p - 1.5) < 1e-7:
            continue
        v = membership(mub, p)
        assert v.is_member == mub_membership(p)
        agree += 1
    assert agree > 9900


def test_mub_isolated_points_are_members(mub):
    for p in (np.zeros(4), np.ones(4)):
        assert membership(mub, p).tag is Tag.INSIDE
        assert not (abs(p[0] + p[2] - 1) <= 1e-9)
