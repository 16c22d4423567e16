"""Alpha-embeddings, alpha-representations and the alpha-connections.

Vector fields are the ones with constant (-1)-representation, so ``X`` and
``Y`` below are plain Hermitian matrices and all derivatives are taken along
straight lines ``rho + sX``.
"""

from __future__ import annotations

import warnings

import numpy as np

from .divdiff import KernelTables, function_dd, function_tables
from .frechet import frechet2, kernel_derivative_eig
from .ggeometry import metric_derivative
from .kernels import AlphaEmbedding
from .metrics import MonotoneMetric, j_apply, j_inverse, metric_eval
from .spectral import as_point, as_tangent

ALPHA_RANGE = 3.0


class ScopeWarning(UserWarning):
    """A parameter lies outside the range where the monotone-metric theory applies."""


def _check_alpha(alpha):
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    if abs(alpha) > ALPHA_RANGE:
        warnings.warn(f"alpha={alpha:g} is outside [-3, 3]", ScopeWarning, stacklevel=3)
    return alpha


def alpha_embed(alpha, rho):
    """``f_alpha(rho)`` with ``f_alpha(x) = 2/(1-alpha) x^((1-alpha)/2)`` (``log`` at 1)."""
    rho = as_point(rho)
    f = AlphaEmbedding(alpha)
    return rho.function(f)


def _f1(alpha, rho):
    (F1,) = function_tables(AlphaEmbedding(alpha), rho.eigenvalues, 1)
    return F1


def L_alpha_apply(alpha, rho, X):
    """``L_alpha[rho](X)``, the alpha-representation of ``X``."""
    rho = as_point(rho)
    sd = rho.spectral
    return sd.from_eigen(_f1(alpha, rho) * sd.to_eigen(as_tangent(X, rho.n)))


def L_alpha_inverse(alpha, rho, Y, method="divide"):
    """Inverse of :func:`L_alpha_apply`.

    ``method="divide"`` divides by the first divided differences of
    ``f_alpha``; ``method="chain"`` multiplies by those of ``f_alpha^-1`` at
    the nodes ``f_alpha(l_i)``. The two agree to rounding.
    """
    rho = as_point(rho)
    sd = rho.spectral
    y = sd.to_eigen(np.asarray(Y, dtype=complex))
    if method == "divide":
        return sd.from_eigen(y / _f1(alpha, rho))
    if method != "chain":
        raise ValueError(f"unknown method {method!r}")
    f = AlphaEmbedding(alpha)
    finv = f.inverse()
    nodes = [f.derivative(float(v)) for v in rho.eigenvalues]
    n = rho.n
    G = np.array([[function_dd(finv, [nodes[i], nodes[j]]) for j in range(n)] for i in range(n)])
    return sd.from_eigen(G * y)


def K_alpha_apply(alpha, m: MonotoneMetric, rho, Y):
    """``K_alpha(Y) = L_alpha^-1 J_rho L_alpha^-1 (Y)``."""
    rho = as_point(rho)
    return L_alpha_inverse(alpha, rho, j_apply(m, rho, L_alpha_inverse(alpha, rho, Y)))


def nabla_alpha(alpha, rho, X, Y):
    """``nabla^(alpha)_X Y = L_alpha^-1 (d^2 f_alpha(rho)[X, Y])``."""
    alpha = _check_alpha(alpha)
    rho = as_point(rho)
    f = AlphaEmbedding(alpha)
    return L_alpha_inverse(alpha, rho, frechet2(f, rho, X, Y))


def _dual_parts(alpha, m, rho, X, Y):
    """``J'_X(Y)`` and ``d^2 f[X, L^-1 J Y]`` for the dual connection."""
    rho = as_point(rho)
    sd = rho.spectral
    x = sd.to_eigen(as_tangent(X, rho.n))
    y = sd.to_eigen(as_tangent(Y, rho.n, "Y"))
    tb = KernelTables(m.cbar, rho.eigenvalues, second_order=False)
    dJ = kernel_derivative_eig(tb, x, y)
    V = L_alpha_inverse(alpha, rho, j_apply(m, rho, Y))
    V = (V + V.conj().T) / 2
    f2 = sd.to_eigen(frechet2(AlphaEmbedding(alpha), rho, X, V))
    return rho, sd, dJ, f2


def nabla_alpha_dual(alpha, m: MonotoneMetric, rho, X, Y):
    """Dual of ``nabla^(alpha)`` with respect to ``m``.

    Differentiating ``L_alpha^-1 J (nabla*_X Y) = X (L_alpha^-1 J Y)`` gives
    ``nabla*_X Y = J^-1 (J'_X Y - d^2 f_alpha[X, L_alpha^-1 J Y])``.
    """
    alpha = _check_alpha(alpha)
    rho, sd, dJ, f2 = _dual_parts(alpha, m, rho, X, Y)
    return j_inverse(m, rho, sd.from_eigen(dJ - f2))


def dual_torsion(alpha, m: MonotoneMetric, rho, X, Y):
    """``nabla*_X Y - nabla*_Y X``; vanishes for all ``X, Y`` iff ``J_rho = L_alpha L_-alpha``."""
    return nabla_alpha_dual(alpha, m, rho, X, Y) - nabla_alpha_dual(alpha, m, rho, Y, X)


def alpha_duality_residual(alpha, m: MonotoneMetric, rho, X, Y, Z) -> float:
    """``X lambda(Y,Z) - lambda(nabla_X Y, Z) - lambda(Y, nabla*_X Z)``."""
    lhs = metric_derivative(m, rho, X, Y, Z)
    a = metric_eval(m, rho, nabla_alpha(alpha, rho, X, Y), Z)
    b = metric_eval(m, rho, Y, nabla_alpha_dual(alpha, m, rho, X, Z))
    return float(lhs - a - b)


def alpha_geodesic(alpha, rho0, rho1, t):
    """``f_alpha^-1((1-t) f_alpha(rho0) + t f_alpha(rho1))``."""
    rho0, rho1 = as_point(rho0), as_point(rho1)
    f = AlphaEmbedding(alpha)
    A = (1 - t) * alpha_embed(alpha, rho0) + t * alpha_embed(alpha, rho1)
    A = (A + A.conj().T) / 2
    w, U = np.linalg.eigh(A)
    return (U * f.inverse()(w)) @ U.conj().T
