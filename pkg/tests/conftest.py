import numpy as np
import pytest

from qubitcorr import StateFamily
from qubitcorr.qubit_algebra import IDENTITY, PAULI


def random_family(rng, m, pure_fraction=0.5):
    """Random half-Bloch rows; roughly ``pure_fraction`` of them on the sphere."""
    axis = rng.standard_normal((m, 3))
    axis /= np.linalg.norm(axis, axis=1, keepdims=True)
    radius = np.where(rng.uniform(size=m) < pure_fraction, 0.5, 0.5 * rng.uniform(size=m))
    return StateFamily.from_half_bloch(axis * radius[:, None])


def dense_state(s):
    return 0.5 * IDENTITY + np.tensordot(s, PAULI, axes=1)


def dense_effect(a, b):
    return a * IDENTITY + np.tensordot(b, PAULI, axes=1)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def quarter_pair():
    from qubitcorr import pure_pair_family

    return pure_pair_family(np.pi / 2)


@pytest.fixture
def mub():
    from qubitcorr import polygon_family

    return polygon_family(4)
