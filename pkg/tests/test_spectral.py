import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qubitcorr import polygon_family, pure_pair_family
from qubitcorr.spectral import factorize, gram_eigh, pinv_quadratic_form, range_residual

entries = st.floats(-0.5, 0.5, allow_nan=False)


@settings(max_examples=300)
@given(st.integers(1, 7).flatmap(lambda m: arrays(float, (m, 3), elements=st.floats(-5, 5, allow_nan=False))))
def test_jacobi_matches_dense_eigh(s):
    g = s.T @ s
    w, v = gram_eigh(s)
    scale = max(1.0, np.abs(g).max())
    np.testing.assert_allclose(w, np.sort(np.linalg.eigvalsh(g))[::-1], atol=1e-12 * scale)
    np.testing.assert_allclose(v @ np.diag(w) @ v.T, g, atol=1e-12 * scale)
    np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-12)


def test_jacobi_off_diagonal_converges(rng):
    for _ in range(200):
        s = rng.standard_normal((rng.integers(1, 9), 3)) * rng.uniform(0, 1, 3) ** 4
        w, v = gram_eigh(s)
        d = v.T @ (s.T @ s) @ v
        off = np.sqrt(np.sum(d**2) - np.sum(np.diag(d) ** 2).clip(0))
        assert np.linalg.norm(d - np.diag(np.diag(d))) < 1e-14 * max(1.0, np.linalg.norm(d))


@settings(max_examples=200)
@given(st.integers(1, 9).flatmap(lambda m: arrays(float, (m, 3), elements=entries)))
def test_factorization_invariants(s):
    f = factorize(s)
    # dropped singular values are at most the cutoff (1e-9 here) each
    np.testing.assert_allclose((f.left * f.sigma) @ f.right.T, s, atol=1e-10 + 3e-9)
    np.testing.assert_allclose(f.right.T @ f.right, np.eye(f.rank), atol=1e-10)
    if f.rank:
        assert np.all(np.diff(f.sigma) <= 0)
        # columns orthonormal except when a kept singular value sits near the cutoff
        if f.sigma[-1] > 1e-6:
            np.testing.assert_allclose(f.left.T @ f.left, np.eye(f.rank), atol=1e-10)
    assert f.rank <= 3
    ref = np.linalg.svd(s, compute_uv=False)
    np.testing.assert_allclose(f.sigma, ref[: f.rank], atol=1e-12)
    assert np.all(ref[f.rank :] <= 1e-9 + 1e-15)


def test_zero_matrix_has_rank_zero():
    f = factorize(np.zeros((4, 3)))
    assert f.rank == 0
    x = np.array([1.0, 2, 3, 4])
    np.testing.assert_array_equal(range_residual(f, x), x)
    assert pinv_quadratic_form(f, x) == 0.0


def test_pure_pair_singular_values():
    f = pure_pair_family(np.pi / 2).factorization
    assert f.rank == 2
    np.testing.assert_allclose(f.sigma, [0.5, 0.5], atol=1e-15)


def test_polygon_singular_values():
    f = polygon_family(4).factorization
    np.testing.assert_allclose(f.sigma**2, [0.5, 0.5], atol=1e-14)


def test_pinv_quadratic_form_examples():
    f = pure_pair_family(np.pi / 2).factorization
    assert pinv_quadratic_form(f, np.zeros(2)) == 0.0
    assert pinv_quadratic_form(f, [0.5, -0.5]) == pytest.approx(2.0, abs=1e-14)
    fp = polygon_family(4).factorization
    assert pinv_quadratic_form(fp, np.ones(4)) == pytest.approx(0.0, abs=1e-28)


def test_range_residual_examples():
    fp = polygon_family(4).factorization
    np.testing.assert_allclose(range_residual(fp, np.ones(4)), np.ones(4), atol=1e-14)
    x = fp.left @ np.array([0.3, -1.2])
    np.testing.assert_allclose(range_residual(fp, x), 0, atol=1e-10)


def test_rank_deficient_rotated_family_keeps_true_rank(rng):
    # coplanar Bloch vectors in a random plane: sqrt(eig(S^T S)) alone would see noise
    for _ in range(200):
        basis = np.linalg.qr(rng.standard_normal((3, 3)))[0][:, :2]
        s = 0.5 * rng.uniform(size=(6, 1)) * (rng.standard_normal((6, 2)) @ basis.T)
        s /= np.maximum(1, 2 * np.linalg.norm(s, axis=1, keepdims=True))
        assert factorize(s).rank == 2


def test_penrose_identity_and_idempotence(rng):
    for _ in range(500):
        m = rng.integers(1, 8)
        s = rng.uniform(-0.5, 0.5, (m, 3))
        f = factorize(s)
        q = s @ s.T
        y = rng.standard_normal(m)
        assert pinv_quadratic_form(f, q @ y) == pytest.approx(y @ q @ y, abs=1e-9)
        x = rng.standard_normal(m)
        r = range_residual(f, x)
        np.testing.assert_allclose(range_residual(f, r), r, atol=1e-12)
        pinv = np.linalg.pinv(q, rcond=1e-10)
        assert pinv_quadratic_form(f, x) == pytest.approx(x @ pinv @ x, rel=1e-8, abs=1e-10)
        np.testing.assert_allclose(f.gram(), q, atol=1e-12)
