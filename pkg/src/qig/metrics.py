"""Monotone Riemannian metrics on the positive-definite cone."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gfunctions import (
    F_bkm,
    F_bures,
    F_rld,
    F_wy,
    F_wyd,
    GFunction,
    MonotoneF,
    kernel_cbar,
)
from .spectral import PositivePoint, as_point, as_tangent


class MonotoneMetric:
    """``lambda_rho(X, Y) = Tr X J_rho(Y)`` with ``J_rho = cbar(L_rho, R_rho)``.

    ``cbar(x, y) = 1/(y F(x/y))`` is evaluated through the symmetric generator
    ``h`` of ``F`` as ``2 k_h(x/y)/y``, which keeps the derivative bundle exact
    for the named metrics.
    """

    def __init__(self, F: MonotoneF, h: GFunction | None = None):
        self.F = F
        self.h = h if h is not None else F.h
        self.cbar = kernel_cbar(self.h)

    @property
    def name(self) -> str:
        return self.F.name

    def cbar_matrix(self, rho: PositivePoint):
        lam = rho.eigenvalues
        return np.array([[self.cbar.value(float(x), float(y)) for y in lam] for x in lam])

    def __repr__(self):
        return f"MonotoneMetric({self.name})"


def metric_from_g(g: GFunction) -> MonotoneMetric:
    """The metric induced by any generator (it depends only on ``(g + g^)/2``)."""
    from .gfunctions import F_from_h

    return MonotoneMetric(F_from_h(g), g)


def named_metric(name: str) -> MonotoneMetric:
    """``bures``, ``rld``, ``bkm``, ``wy`` or ``wyd:<alpha>`` with alpha in [-3, 3]."""
    key = name.strip().lower()
    table = {"bures": F_bures, "rld": F_rld, "bkm": F_bkm, "wy": F_wy}
    if key in table:
        return MonotoneMetric(table[key]())
    if key.startswith("wyd:"):
        try:
            alpha = float(key[4:])
        except ValueError:
            raise ValueError(f"bad metric id {name!r}") from None
        if not -3.0 <= alpha <= 3.0:
            raise ValueError(f"WYD parameter {alpha} outside [-3, 3]")
        return MonotoneMetric(F_wyd(alpha))
    raise ValueError(f"unknown metric {name!r}; expected bures|rld|bkm|wy|wyd:<alpha>")


def metric_from_F(fun, name="custom") -> MonotoneMetric:
    """Metric of an arbitrary (assumed symmetric, normalized) function ``F``."""
    return MonotoneMetric(MonotoneF(fun, name))


def metric_eval(m: MonotoneMetric, rho, X, Y) -> float:
    """``sum_ij cbar(l_i, l_j) x_ji y_ij`` in the eigenbasis of ``rho``."""
    rho = as_point(rho)
    sd = rho.spectral
    x = sd.to_eigen(as_tangent(X, rho.n))
    y = sd.to_eigen(as_tangent(Y, rho.n, "Y"))
    val = np.sum(m.cbar_matrix(rho) * x.T * y)
    return float(val.real)


def j_apply(m: MonotoneMetric, rho, X):
    rho = as_point(rho)
    sd = rho.spectral
    return sd.from_eigen(m.cbar_matrix(rho) * sd.to_eigen(np.asarray(X, dtype=complex)))


def j_inverse(m: MonotoneMetric, rho, X):
    rho = as_point(rho)
    sd = rho.spectral
    return sd.from_eigen(sd.to_eigen(np.asarray(X, dtype=complex)) / m.cbar_matrix(rho))


@dataclass(frozen=True)
class TangentBasis:
    """Hermitian basis ``f1_aa, f2_ab, f3_ab`` adapted to the eigenbasis of a point.

    Ordering: all ``f1`` by ascending index, then ``(f2_ab, f3_ab)`` for
    ``a < b`` in lexicographic order. ``eigen`` holds eigen-coordinates with
    shape ``(n*n, n, n)``; ``labels`` the ``(kind, a, b)`` triples.
    """

    point: PositivePoint
    eigen: np.ndarray
    labels: tuple

    @property
    def elements(self):
        sd = self.point.spectral
        return [sd.from_eigen(e) for e in self.eigen]

    def __len__(self):
        return len(self.eigen)

    def norms(self, m: MonotoneMetric):
        """``lambda(f, f)`` from the closed form: ``cbar(l_a, l_a)`` or ``2 cbar(l_a, l_b)``."""
        C = m.cbar_matrix(self.point)
        return np.array([C[a, b] * (1.0 if kind == 1 else 2.0) for kind, a, b in self.labels])

    def orthonormal(self, m: MonotoneMetric) -> "TangentBasis":
        scale = 1.0 / np.sqrt(self.norms(m))
        return TangentBasis(self.point, self.eigen * scale[:, None, None], self.labels)


def tangent_basis(rho) -> TangentBasis:
    rho = as_point(rho)
    n = rho.n
    mats, labels = [], []
    for a in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[a, a] = 1.0
        mats.append(e)
        labels.append((1, a, a))
    for a in range(n):
        for b in range(a + 1, n):
            e2 = np.zeros((n, n), dtype=complex)
            e2[a, b] = e2[b, a] = 1.0
            e3 = np.zeros((n, n), dtype=complex)
            e3[a, b], e3[b, a] = 1j, -1j
            mats += [e2, e3]
            labels += [(2, a, b), (3, a, b)]
    return TangentBasis(rho, np.array(mats), tuple(labels))


def gram_matrix(m: MonotoneMetric, rho, basis: TangentBasis | None = None):
    """Real Gram matrix ``lambda(f_i, f_j)`` of a tangent basis."""
    rho = as_point(rho)
    basis = tangent_basis(rho) if basis is None else basis
    C = m.cbar_matrix(rho)
    E = basis.eigen
    G = np.einsum("ij,aji,bij->ab", C, E, E)
    return G.real


def gram_inverse(m: MonotoneMetric, rho, basis: TangentBasis | None = None):
    """Inverse Gram matrix using the diagonal form of the adapted basis."""
    rho = as_point(rho)
    basis = tangent_basis(rho) if basis is None else basis
    return np.diag(1.0 / basis.norms(m))
