import math

import numpy as np
import pytest

from qig.alpha import nabla_alpha
from qig.gfunctions import AlphaG, ExtremeG, GFunction, kernel_cr, mix, transpose
from qig.ggeometry import (
    Q_tensor,
    conjugate_ode_residual,
    conjugate_ode_residual_alt,
    conjugate_residual,
    connection_coefficients,
    curvature_p,
    duality_residual,
    entropy,
    entropy_direct,
    flat_ode_residual,
    metric_connection,
    metric_curvature,
    metric_derivative,
    metric_eval_g,
    nabla_g,
    skewness,
)
from qig.metrics import metric_eval, metric_from_g, named_metric, tangent_basis

from conftest import central, rand_herm, rand_pos, rel

U_GRID = np.geomspace(1e-2, 1e2, 50)
GENERATORS = [AlphaG(1.0), AlphaG(-0.5), AlphaG(2.0), ExtremeG(2.0), ExtremeG(0.0), mix(AlphaG(3.0), 0.3)]


def ids(g):
    return g.label


class Shifted(GFunction):
    """``base + b (u - 1)``: same kernel, different linear coefficient."""

    family = "shifted"

    def __init__(self, base, b):
        self.base, self.b = base, b
        self.a = base.a + b
        super().__init__()

    def derivative(self, u, order=0):
        lin = self.b * (u - 1) if order == 0 else (self.b if order == 1 else 0.0)
        return self.base.derivative(u, order) + lin

    def k(self, u, order=0):
        return self.base.k(u, order)


# -- entropy


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_entropy_self_zero(g, rng):
    rho = rand_pos(rng, 3)
    assert entropy(g, rho, rho) == 0.0


def test_entropy_classical_kl():
    lam, mu = np.array([0.2, 0.3, 0.5]), np.array([0.6, 0.1, 0.3])
    H = entropy(AlphaG(1.0), np.diag(lam), np.diag(mu))
    assert H == pytest.approx(np.sum(mu * np.log(mu / lam)), rel=1e-12)


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_entropy_homogeneous(g, rng):
    rho, sigma = rand_pos(rng, 3), rand_pos(rng, 3)
    assert entropy(g, 2 * rho, 2 * sigma) == pytest.approx(2 * entropy(g, rho, sigma), rel=1e-12)


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_entropy_direct_formula(g, rng):
    rho, sigma = rand_pos(rng, 3), rand_pos(rng, 3, trace=2.0)
    assert entropy(g, rho, sigma) == pytest.approx(entropy_direct(g, rho, sigma), abs=1e-9)


def test_entropy_dimension_mismatch():
    with pytest.raises(ValueError):
        entropy(AlphaG(0.0), np.eye(2), np.eye(3))


def test_linear_term_shifts_entropy_only(rng):
    base = AlphaG(0.5)
    g = Shifted(base, 0.7)
    rho, sigma = rand_pos(rng, 2), rand_pos(rng, 2, trace=1.5)
    assert entropy(g, rho, sigma) - entropy(base, rho, sigma) == pytest.approx(0.7 * 0.5, rel=1e-10)
    assert curvature_p(g, 1.0, rho).norm < 1e-7


# -- metric from g


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_metric_is_entropy_hessian(g, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    h = 1e-4

    def H(s, t):
        return entropy(g, rho + s * X, rho + t * Y)

    fd = -(H(h, h) - H(h, -h) - H(-h, h) + H(-h, -h)) / (4 * h * h)
    val = metric_eval_g(g, rho, X, Y)
    assert abs(val - fd) / max(1.0, abs(val)) < 1e-5


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_metric_transpose_invariant(g, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    assert metric_eval_g(g, rho, X, Y) == pytest.approx(metric_eval_g(transpose(g), rho, X, Y), rel=1e-11)


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 0.5, 3.0])
def test_metric_alpha_is_wyd(alpha, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    assert metric_eval_g(AlphaG(alpha), rho, X, Y) == pytest.approx(metric_eval(named_metric(f"wyd:{alpha}"), rho, X, Y), rel=1e-9)


def test_metric_at_identity(rng):
    X, Y = rand_herm(rng, 3), rand_herm(rng, 3)
    assert metric_eval_g(ExtremeG(3.0), np.eye(3), X, Y) == pytest.approx(np.trace(X @ Y).real, rel=1e-12)


# -- Q and skewness


def _q_brute(g, rho, X, Y, Z):
    cr = kernel_cr(g)
    w, U = np.linalg.eigh(rho)
    x, y, z = (U.conj().T @ M @ U for M in (X, Y, Z))
    n = len(w)
    out = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                R = (cr.value(w[i], w[k]) - cr.value(w[j], w[k])) / (w[i] - w[j]) if i != j else None
                if R is None:
                    h = 1e-6
                    R = (cr.value(w[i] + h, w[k]) - cr.value(w[i] - h, w[k])) / (2 * h)
                out += R * x[k, i] * y[i, j] * z[j, k]
    return out


def test_q_brute_force(rng):
    rho = np.diag([0.4, 1.3])
    X, Y, Z = rand_herm(rng, 2), rand_herm(rng, 2), rand_herm(rng, 2)
    g = AlphaG(1.5)
    assert abs(Q_tensor(g, rho, X, Y, Z) - _q_brute(g, rho, X, Y, Z)) < 1e-8


@pytest.mark.parametrize("g", [AlphaG(1.5), ExtremeG(2.0)], ids=ids)
def test_q_at_identity(g, rng):
    X, Y, Z = rand_herm(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    expected = -g.alpha / 6 * np.trace(X @ Y @ Z)
    assert abs(Q_tensor(g, np.eye(3), X, Y, Z) - expected) < 1e-10


def test_q_symmetric_vanishes(rng):
    rho, X, Y, Z = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    assert abs(Q_tensor(ExtremeG(1.0), rho, X, Y, Z)) < 1e-14
    assert np.max(np.abs(skewness(AlphaG(0.0), rho).components)) < 1e-14


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_skewness_symmetric_and_connection_gap(g, rng):
    rho = rand_pos(rng, 3)
    S = skewness(g, rho)
    assert S.symmetry_defect() < 1e-9
    G1 = connection_coefficients(g, rho, 1.0).components
    G0 = connection_coefficients(g, rho, 0.0).components
    assert np.max(np.abs(S.components - (G1 - G0))) < 1e-9
    # raised D satisfies lambda(D(X,Y), Z) = D~(X,Y,Z)
    m = metric_from_g(g)
    B = tangent_basis(rho).orthonormal(m).elements
    assert metric_eval(m, rho, S.raised[0, 1], B[2]) == pytest.approx(S.components[0, 1, 2], abs=1e-10)


def test_skewness_bkm_nonzero(rng):
    assert np.max(np.abs(skewness(AlphaG(-1.0), rand_pos(rng, 2)).components)) > 1e-6


# -- metric connection


def test_metric_connection_scalar_point(rng):
    X, Y = rand_herm(rng, 3), rand_herm(rng, 3)
    c = 2.0
    out = metric_connection(named_metric("bkm"), c * np.eye(3), X, Y)
    # S(x,x|x) = -1/(4x) gives -(XY + YX)/(4c)
    np.testing.assert_allclose(out, -(X @ Y + Y @ X) / (4 * c), atol=1e-12)


@pytest.mark.parametrize("name", ["bures", "bkm", "rld", "wyd:2"])
def test_metric_connection_compatible(name, rng):
    m = named_metric(name)
    rho, X, Y, Z = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    fd = central(lambda s: metric_eval(m, rho + s * X, Y, Z))
    rhs = metric_eval(m, rho, metric_connection(m, rho, X, Y), Z) + metric_eval(m, rho, Y, metric_connection(m, rho, X, Z))
    assert abs(fd - rhs) / max(1.0, abs(fd)) < 1e-7
    assert rel(metric_connection(m, rho, X, Y), metric_connection(m, rho, Y, X)) < 1e-12


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_metric_connection_is_average(g, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    avg = 0.5 * (nabla_g(g, rho, X, Y) + nabla_g(transpose(g), rho, X, Y))
    assert rel(metric_connection(metric_from_g(g), rho, X, Y), avg) < 1e-8


# -- nabla^(g)


@pytest.mark.parametrize("alpha", [-3.0, -1.0, 0.0, 0.5, 2.0])
def test_nabla_g_alpha(alpha, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    assert rel(nabla_g(AlphaG(alpha), rho, X, Y), nabla_alpha(alpha, rho, X, Y)) < 1e-7


def test_nabla_g_symmetric_is_metric_connection(rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    g = ExtremeG(1.0)
    assert rel(nabla_g(g, rho, X, Y), metric_connection(named_metric("bures"), rho, X, Y)) < 1e-9


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_nabla_g_mixture_linear(g, rng):
    rho, X, Y = rand_pos(rng, 3), rand_herm(rng, 3), rand_herm(rng, 3)
    p = 0.3
    lhs = nabla_g(mix(g, p), rho, X, Y)
    rhs = p * nabla_g(g, rho, X, Y) + (1 - p) * nabla_g(transpose(g), rho, X, Y)
    assert rel(lhs, rhs) < 1e-9
    assert rel(nabla_g(g, rho, X, Y, p=p), lhs) < 1e-9


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_nabla_g_entropy_third_derivative(g, rng):
    # well-conditioned point keeps the nested difference accurate
    rho, X, Y, Z = rand_pos(rng, 2, trace=4.0), rand_herm(rng, 2), rand_herm(rng, 2), rand_herm(rng, 2)
    h = 1e-3

    def d2(u):
        H = lambda s, t: entropy(g, rho + s * X + t * Y, rho + u * Z)  # noqa: E731
        return (H(h, h) - H(h, -h) - H(-h, h) + H(-h, -h)) / (4 * h * h)

    fd = -(d2(h) - d2(-h)) / (2 * h)
    m = metric_from_g(g)
    val = metric_eval(m, rho, nabla_g(g, rho, X, Y), Z)
    assert abs(val - fd) / max(1.0, abs(val)) < 1e-4
    assert rel(nabla_g(g, rho, X, Y), nabla_g(g, rho, Y, X)) < 1e-10


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
@pytest.mark.parametrize("n", [2, 3])
def test_duality(g, n, rng):
    rho = rand_pos(rng, n)
    B = tangent_basis(rho).elements
    for p in (1.0, 0.3):
        for i, j, k in [(0, 1, 2), (1, 1, 0), (2, 3, 3)]:
            scale = max(1.0, abs(metric_derivative(metric_from_g(g), rho, B[i], B[j], B[k])))
            assert abs(duality_residual(g, rho, B[i], B[j], B[k], p)) / scale < 1e-7


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_classical_reduction(g):
    lam, x, y = np.array([0.3, 0.8, 1.9]), np.array([1.0, -0.4, 0.6]), np.array([0.2, 1.1, -0.7])
    out = nabla_g(g, np.diag(lam), np.diag(x), np.diag(y))
    np.testing.assert_allclose(np.diag(out).real, -(1 + g.alpha) / 2 * x * y / lam, rtol=1e-9, atol=1e-12)
    assert np.max(np.abs(out - np.diag(np.diag(out)))) < 1e-12


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_torsion_free(g, rng):
    assert connection_coefficients(g, rand_pos(rng, 3), 0.4).torsion_defect() < 1e-9


# -- curvature


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
@pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 0.3])
def test_curvature_routes(g, p, rng):
    R = curvature_p(g, p, rand_pos(rng, 2))
    assert R.route_gap < 1e-6
    assert R.antisymmetry_defect() < 1e-9
    Rb = R.metric_part
    assert np.max(np.abs(Rb - Rb.transpose(2, 3, 0, 1))) < 1e-9


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 1.0])
@pytest.mark.parametrize("p", [0.0, 1.0])
def test_alpha_connection_flat(alpha, p, rng):
    assert curvature_p(AlphaG(alpha), p, rand_pos(rng, 3)).norm < 1e-7


def test_metric_connection_not_flat_bkm(rng):
    R = curvature_p(AlphaG(-1.0), 0.5, rand_pos(rng, 2))
    assert np.max(np.abs(R.metric_part)) > 1e-5


def test_mixture_curvatures_agree_for_alpha(rng):
    rho = rand_pos(rng, 2)
    g = AlphaG(2.0)
    assert np.max(np.abs(curvature_p(g, 0.25, rho).components - curvature_p(g, 0.75, rho).components)) < 1e-7


@pytest.mark.parametrize("alpha", [0.5, 2.0, -1.0])
@pytest.mark.parametrize("p", [0.25, 0.5])
def test_curvature_from_skewness_when_flat(alpha, p, rng):
    rho = rand_pos(rng, 2)
    g = AlphaG(alpha)
    m = metric_from_g(g)
    D = skewness(g, rho).raised
    N = len(D)
    expected = np.empty((N, N, N, N))
    for a, b, c, d in np.ndindex(N, N, N, N):
        expected[a, b, c, d] = metric_eval(m, rho, D[a, d], D[b, c]) - metric_eval(m, rho, D[a, c], D[b, d])
    R = curvature_p(g, p, rho).components
    assert np.max(np.abs(R - p * (p - 1) * expected)) < 1e-6
    assert np.max(np.abs(expected)) > 1e-3 or alpha == 0.0


def test_extreme_not_flat(rng):
    assert curvature_p(ExtremeG(2.0), 1.0, rand_pos(rng, 2)).norm > 1e-4


def test_wy_metric_connection_flat(rng):
    rho = rand_pos(rng, 2)
    assert np.max(np.abs(metric_curvature(named_metric("wy"), rho))) < 1e-7
    for name in ("bures", "bkm", "rld"):
        assert np.max(np.abs(metric_curvature(named_metric(name), rho))) > 1e-5


def test_metric_curvature_matches_p_half(rng):
    rho = rand_pos(rng, 2)
    g = AlphaG(-1.0)
    assert np.max(np.abs(metric_curvature(named_metric("bkm"), rho) - curvature_p(g, 0.5, rho).components)) < 1e-8


# -- conjugate symmetry


@pytest.mark.parametrize("alpha", [0.5, 2.0])
@pytest.mark.parametrize("p", [0.0, 0.3, 0.5])
def test_conjugate_mixtures(alpha, p, rng):
    g = mix(AlphaG(alpha), p)
    assert abs(conjugate_residual(g, rand_pos(rng, 2))) < 1e-7
    assert max(abs(conjugate_ode_residual(g, u)) for u in U_GRID) < 1e-9


def test_conjugate_extreme_fails(rng):
    g = ExtremeG(2.0)
    assert abs(conjugate_residual(g, rand_pos(rng, 2))) > 1e-5
    assert abs(conjugate_ode_residual(g, 2.0)) > 1e-3


def test_conjugate_symmetric_zero(rng):
    assert abs(conjugate_residual(ExtremeG(1.0), rand_pos(rng, 2))) < 1e-12


def test_conjugate_residual_custom_components(rng):
    rho = rand_pos(rng, 3)
    B = tangent_basis(rho).elements
    assert abs(conjugate_residual(mix(AlphaG(2.0), 0.3), rho, B[0], B[3], B[4], B[5])) < 1e-7


@pytest.mark.parametrize("g", [ExtremeG(1.0), mix(ExtremeG(3.0), 0.5), mix(AlphaG(1.0), 0.5)], ids=ids)
def test_conjugate_ode_symmetric(g):
    for u in U_GRID:
        lhs = g.derivative(u) - g.derivative(1 / u, 1) - u * g.derivative(u, 1)
        assert abs(lhs) < 1e-9 * max(1.0, u)
        assert abs(conjugate_ode_residual(g, u)) < 1e-9 * max(1.0, u)


@pytest.mark.parametrize("g", GENERATORS, ids=ids)
def test_conjugate_ode_forms(g):
    for u in (0.1, 0.7, 2.0, 9.0):
        assert conjugate_ode_residual_alt(g, u) == pytest.approx(-0.5 * conjugate_ode_residual(g, u), abs=1e-10)


# -- flatness ODE


@pytest.mark.parametrize("alpha", [-3.0, -2.0, -1.0, 0.0, 0.5, 1.0, 3.0])
def test_flat_ode_alpha(alpha):
    assert max(abs(flat_ode_residual(AlphaG(alpha), u)) for u in U_GRID) < 1e-8


def test_flat_ode_symmetric_wy():
    for u in U_GRID:
        s = math.sqrt(u)
        gb, d1, d2 = 4 * (1 - s) ** 2, 4 - 4 / s, 2 / (u * s)
        assert abs(-gb + d1 * (u - 1) - 2 * d2 * u * (1 + u) + 8) < 1e-9 * max(1.0, u)
        assert abs(flat_ode_residual(AlphaG(0.0), u)) < 1e-8


def test_flat_ode_bures():
    assert abs(flat_ode_residual(ExtremeG(1.0), 2.0)) > 1e-3
