import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qig.gfunctions import AlphaG, ExtremeG, mix
from qig.metrics import (
    gram_inverse,
    gram_matrix,
    j_apply,
    j_inverse,
    metric_eval,
    metric_from_F,
    metric_from_g,
    named_metric,
    tangent_basis,
)

from conftest import rand_herm, rand_pos

NAMES = ["bures", "rld", "bkm", "wy", "wyd:0.5", "wyd:-2"]
OFF = np.array([[0.0, 1.0], [1.0, 0.0]])


def brute(m, rho, X, Y):
    w, U = np.linalg.eigh(rho)
    x, y = U.conj().T @ X @ U, U.conj().T @ Y @ U
    tot = 0.0
    for i in range(len(w)):
        for j in range(len(w)):
            tot += m.cbar.value(w[i], w[j]) * x[j, i] * y[i, j]
    return tot.real


def test_bkm_example():
    assert metric_eval(named_metric("bkm"), np.diag([1.0, 2.0]), OFF, OFF) == pytest.approx(2 * math.log(2), rel=1e-13)


def test_wy_example():
    assert metric_eval(named_metric("wy"), np.diag([1.0, 4.0]), OFF, OFF) == pytest.approx(8 / 9, rel=1e-13)
    assert metric_eval(named_metric("wyd:0"), np.diag([1.0, 4.0]), OFF, OFF) == pytest.approx(8 / 9, rel=1e-13)


@pytest.mark.parametrize("name", NAMES)
def test_fisher_on_commuting(name, rng):
    lam = rng.uniform(0.2, 2.0, 4)
    x = rng.standard_normal(4)
    y = rng.standard_normal(4)
    val = metric_eval(named_metric(name), np.diag(lam), np.diag(x), np.diag(y))
    assert val == pytest.approx(np.sum(x * y / lam), rel=1e-12)


def test_bures_identity(rng):
    X = rand_herm(rng, 3)
    assert metric_eval(named_metric("bures"), np.eye(3), X, X) == pytest.approx(np.trace(X @ X).real, rel=1e-13)


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_kernel_sum_matches_J(name, n, rng):
    m = named_metric(name)
    rho, X, Y = rand_pos(rng, n), rand_herm(rng, n), rand_herm(rng, n)
    v = metric_eval(m, rho, X, Y)
    assert v == pytest.approx(np.trace(X @ j_apply(m, rho, Y)).real, rel=1e-10)
    assert v == pytest.approx(metric_eval(m, rho, Y, X), rel=1e-12)
    assert v == pytest.approx(brute(m, rho, X, Y), rel=1e-10)
    assert np.max(np.abs(j_inverse(m, rho, j_apply(m, rho, X)) - X)) < 1e-10


@pytest.mark.parametrize("name", NAMES)
def test_positive(name, rng):
    rho, X = rand_pos(rng, 3), rand_herm(rng, 3)
    assert metric_eval(named_metric(name), rho, X, X) > 0


def test_bures_J(rng):
    rho, X = rand_pos(rng, 3), rand_herm(rng, 3)
    Y = j_apply(named_metric("bures"), rho, X)
    assert np.max(np.abs(Y @ rho + rho @ Y - 2 * X)) < 1e-10


def test_rld_J(rng):
    rho, X = rand_pos(rng, 3), rand_herm(rng, 3)
    ri = np.linalg.inv(rho)
    np.testing.assert_allclose(j_apply(named_metric("rld"), rho, X), 0.5 * (ri @ X + X @ ri), atol=1e-9)


@pytest.mark.parametrize("name", NAMES)
def test_commuting_J(name):
    rho, X = np.diag([0.3, 1.2, 2.0]), np.diag([1.0, -1.0, 0.5])
    np.testing.assert_allclose(j_apply(named_metric(name), rho, X), np.linalg.inv(rho) @ X, atol=1e-13)


def test_gram_at_identity():
    G = gram_matrix(named_metric("bkm"), np.eye(3))
    np.testing.assert_allclose(G, np.diag([1.0] * 3 + [2.0] * 6), atol=1e-14)


@pytest.mark.parametrize("name", ["bures", "bkm"])
def test_gram_diagonal(name, rng):
    rho = rand_pos(rng, 3)
    m = named_metric(name)
    G = gram_matrix(m, rho)
    off = G - np.diag(np.diag(G))
    assert np.max(np.abs(off)) < 1e-10
    B = tangent_basis(rho)
    np.testing.assert_allclose(np.diag(G), B.norms(m), rtol=1e-12)
    np.testing.assert_allclose(gram_inverse(m, rho), np.linalg.inv(G), rtol=1e-10, atol=1e-12)
    ob = B.orthonormal(m)
    np.testing.assert_allclose(gram_matrix(m, rho, ob), np.eye(9), atol=1e-10)


def test_wy_f2_norm():
    B = tangent_basis(np.diag([1.0, 4.0]))
    assert B.labels[2] == (2, 0, 1)
    assert gram_matrix(named_metric("wy"), np.diag([1.0, 4.0]))[2, 2] == pytest.approx(8 / 9, rel=1e-13)


def test_basis_layout():
    B = tangent_basis(np.diag([1.0, 2.0, 3.0]))
    assert [lab[0] for lab in B.labels] == [1, 1, 1, 2, 3, 2, 3, 2, 3]
    assert [lab[1:] for lab in B.labels[3:]] == [(0, 1), (0, 1), (0, 2), (0, 2), (1, 2), (1, 2)]
    for E in B.elements:
        assert np.max(np.abs(E - E.conj().T)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31))
def test_metric_ordering(n, seed):
    r = np.random.default_rng(seed)
    rho, X = rand_pos(r, n), rand_herm(r, n)
    vals = [metric_eval(named_metric(k), rho, X, X) for k in ("bures", "wy", "bkm", "rld")]
    for a, b in zip(vals, vals[1:]):
        assert a <= b * (1 + 1e-12)


def test_metric_from_g_matches_named(rng):
    rho, X = rand_pos(rng, 3), rand_herm(rng, 3)
    pairs = [(AlphaG(1.0), "bkm"), (ExtremeG(1.0), "bures"), (AlphaG(0.0), "wy"), (mix(AlphaG(2.0), 0.3), "wyd:2"), (ExtremeG(0.0), "rld")]
    for g, name in pairs:
        a = metric_eval(metric_from_g(g), rho, X, X)
        assert a == pytest.approx(metric_eval(named_metric(name), rho, X, X), rel=1e-11)


def test_metric_from_F(rng):
    rho, X = rand_pos(rng, 3), rand_herm(rng, 3)
    m = metric_from_F(lambda x: (1 + x) / 2, "b")
    assert metric_eval(m, rho, X, X) == pytest.approx(metric_eval(named_metric("bures"), rho, X, X), rel=1e-9)


@pytest.mark.parametrize("bad", ["foo", "wyd:5", "wyd:x"])
def test_bad_metric_name(bad):
    with pytest.raises(ValueError):
        named_metric(bad)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        metric_eval(named_metric("bkm"), np.eye(2), np.eye(3), np.eye(3))
