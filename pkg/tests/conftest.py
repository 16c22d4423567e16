import numpy as np
import pytest

from qig.harness import random_hermitian, random_positive


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_pos(rng, n, trace=1.0):
    return random_positive(n, rng, trace=trace)


def rand_herm(rng, n):
    return random_hermitian(n, rng)


def central(f, h=1e-5):
    """Central difference of a scalar- or array-valued function of s at 0."""
    return (np.asarray(f(h)) - np.asarray(f(-h))) / (2 * h)


def central4(f, h=1e-3):
    """Fourth-order central difference at 0."""
    v = [np.asarray(f(s * h)) for s in (-2, -1, 1, 2)]
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))
