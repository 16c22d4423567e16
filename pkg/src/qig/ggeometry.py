"""Relative g-entropies and the geometry they induce.

Tangent vectors are the constant (-1)-representation fields. All connection
and curvature quantities are assembled from divided-difference tables of the
kernels ``c``, ``c^``, ``cbar = c + c^`` and ``c_r = c^ - c`` in the
eigenbasis of the base point; finite differences appear only in tests.

Multilinear forms are evaluated on stacks of eigen-coordinate matrices, so
the same code produces single values and full component tensors over the
orthonormal adapted basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .divdiff import KernelTables
from .frechet import apply_kernel
from .gfunctions import GFunction
from .metrics import MonotoneMetric, metric_from_g, tangent_basis
from .spectral import as_point, as_tangent

IMAG_TOL = 1e-10


# ---------------------------------------------------------------------------
# eigen-coordinate multilinear forms


def _tri(T1, X, Y, Z):
    """``sum T(i,j|k) x_ki y_ij z_jk`` for stacks ``X, Y, Z``; complex ``[x, y, z]``."""
    return np.einsum("ijk,aki,bij,cjk->abc", T1, X, Y, Z, optimize=True)


def _quad(tables, X, Y, Z, W):
    """Directional derivative ``X Q(Y, Z, W)`` of ``Q(Y, Z, W) = sum T(i,j|k) y_ki z_ij w_jk``."""
    T2, Tm = tables.second, tables.mixed
    out = np.einsum("ijkl,xij,zjk,wkl,yli->xyzw", T2, X, Z, W, Y, optimize=True)
    out += np.einsum("ijkl,zij,xjk,wkl,yli->xyzw", T2, Z, X, W, Y, optimize=True)
    out += np.einsum("ijkl,zij,wjl,xlk,yki->xyzw", Tm, Z, W, X, Y, optimize=True)
    return out


def _real(arr, what):
    arr = np.asarray(arr)
    scale = max(1.0, float(np.max(np.abs(arr.real)))) if arr.size else 1.0
    if arr.size and np.max(np.abs(arr.imag)) > IMAG_TOL * scale:
        raise ArithmeticError(f"{what} has imaginary residue {np.max(np.abs(arr.imag)):.3g}")
    return arr.real


def _entropy_gamma(tc, th, X, Y, Z):
    """``lambda(nabla_X Y, Z)`` for the connection generated by kernel ``c`` (tables ``tc``)."""
    C = _tri(tc.first, X, Z, Y)  # C(X, Z, Y) stored as [x, z, y]
    H_xy = _tri(th.first, X, Y, Z)
    H_yx = _tri(th.first, Y, X, Z)
    return 2 * (H_xy + H_yx.transpose(1, 0, 2) - C.transpose(0, 2, 1)).real


def _entropy_dgamma(tc, th, X, Y, Z, W):
    """``X lambda(nabla_Y Z, W)`` on stacks; indices ``[x, y, z, w]``."""
    Hyzw = _quad(th, X, Y, Z, W)
    Hzyw = _quad(th, X, Z, Y, W)
    Cywz = _quad(tc, X, Y, W, Z)
    return 2 * (Hyzw + Hzyw.transpose(0, 2, 1, 3) - Cywz.transpose(0, 1, 3, 2)).real


# ---------------------------------------------------------------------------
# metric-only data


class MetricFrame:
    """A monotone metric at a point: kernel tables, ``S`` coefficients and adapted basis."""

    def __init__(self, m: MonotoneMetric, rho, second_order=False):
        self.metric = m
        self.rho = as_point(rho)
        self.sd = self.rho.spectral
        self.lam = self.rho.eigenvalues
        self.tbar = KernelTables(m.cbar, self.lam, second_order)
        self.basis = tangent_basis(self.rho).orthonormal(m)
        self.B = self.basis.eigen
        self.S = self._s_table()

    def _s_table(self):
        T = self.tbar.first
        cb = self.tbar.value
        # S[a,b,i] = (T[a,i,b] + T[b,i,a] - T[a,b,i]) / (2 cbar[a,b])
        S = np.einsum("aib->abi", T) + np.einsum("bia->abi", T) - T
        return S / (2 * cb[:, :, None])

    def eig(self, X):
        return self.sd.to_eigen(as_tangent(X, self.rho.n))

    def inner(self, U, V):
        """``lambda(U, V)`` for stacks of eigen-coordinates; ``[u, v]``."""
        return _real(np.einsum("ij,aji,bij->ab", self.tbar.value, U, V), "metric")

    def coords(self, V):
        """Orthonormal-basis coordinates of eigen-coordinate stacks ``V``; ``[v, m]``."""
        return self.inner(V, self.B)

    def from_coords(self, v):
        return np.tensordot(v, self.B, axes=(-1, 0))

    def nabla_bar(self, X, Y):
        """Eigen-coordinates of the metric connection ``nabla_X Y``; ``[x, y, i, j]``."""
        S = self.S
        t1 = np.einsum("abi,xai,yib->xyab", S, X, Y)
        t2 = np.einsum("abi,yai,xib->xyab", S, Y, X)
        return t1 + t2

    def gamma_bar(self, X, Y, Z):
        return self.inner(self.nabla_bar(X, Y).reshape(-1, *X.shape[1:]), Z).reshape(
            len(X), len(Y), len(Z)
        )

    def metric_derivative(self, X, Y, Z):
        """``X lambda(Y, Z)``; ``[x, y, z]``."""
        T, Tr = self.tbar.first, self.tbar.right
        left = np.einsum("ijk,yki,xij,zjk->xyz", T, Y, X, Z, optimize=True)
        right = np.einsum("ikl,xkl,zik,yli->xyz", Tr, X, Z, Y, optimize=True)
        return _real(left + right, "metric derivative")


# ---------------------------------------------------------------------------
# generator data


class Geometry(MetricFrame):
    """Everything induced by a generator ``g`` at a point ``rho``."""

    def __init__(self, g: GFunction, rho, second_order=True):
        self.g = g
        super().__init__(metric_from_g(g), rho, second_order)
        self.tc = KernelTables(g.kernel, self.lam, second_order)
        self.th = KernelTables(g.kernel.swapped(), self.lam, second_order)
        self.tr = self.th.combine(1.0, self.tc, -1.0)
        # the metric tables must agree with c + c^; keep the directly computed ones

    def tables_p(self, p):
        """Kernel tables of ``p g + (1-p) g^`` and of its transpose."""
        tc = self.tc.combine(p, self.th, 1 - p)
        th = self.th.combine(p, self.tc, 1 - p)
        return tc, th

    def gamma(self, X, Y, Z, p=1.0):
        """``lambda(nabla^(p)_X Y, Z)`` from the third derivative of the entropy."""
        tc, th = (self.tc, self.th) if p == 1.0 else self.tables_p(p)
        return _entropy_gamma(tc, th, X, Y, Z)

    def dgamma(self, X, Y, Z, W, p=1.0):
        tc, th = (self.tc, self.th) if p == 1.0 else self.tables_p(p)
        return _entropy_dgamma(tc, th, X, Y, Z, W)

    def q(self, X, Y, Z):
        return _tri(self.tr.first, X, Y, Z)

    def skew(self, X, Y, Z):
        """``D~(X, Y, Z) = 2 Re{Q(X,Y,Z) + Q(Y,X,Z) + Q(X,Z,Y)}``."""
        Qxyz = self.q(X, Y, Z)
        Qyxz = self.q(Y, X, Z).transpose(1, 0, 2)
        Qxzy = self.q(X, Z, Y).transpose(0, 2, 1)
        return 2 * (Qxyz + Qyxz + Qxzy).real

    def dskew(self, X, Y, Z, W):
        """``X D~(Y, Z, W)``; ``[x, y, z, w]``."""
        a = _quad(self.tr, X, Y, Z, W)
        b = _quad(self.tr, X, Z, Y, W).transpose(0, 2, 1, 3)
        c = _quad(self.tr, X, Y, W, Z).transpose(0, 1, 3, 2)
        return 2 * (a + b + c).real

    def dgamma_bar(self, X, Y, Z, W):
        """``X lambda(nabla-bar_Y Z, W)`` from the ``cbar`` tables."""
        tb = self.tc.combine(1.0, self.th, 1.0)
        a = _quad(tb, X, Y, Z, W)
        b = _quad(tb, X, Z, Y, W).transpose(0, 2, 1, 3)
        c = _quad(tb, X, Y, W, Z).transpose(0, 1, 3, 2)
        return (a + b - c).real


# ---------------------------------------------------------------------------
# entropy and metric


def entropy(g: GFunction, rho, sigma) -> float:
    """``H_g(rho, sigma) = a Tr(sigma - rho) + Tr (sigma - rho) c(L_sigma, R_rho)(sigma - rho)``."""
    rho, sigma = as_point(rho), as_point(sigma)
    if rho.n != sigma.n:
        raise ValueError("dimension mismatch")
    A = sigma.matrix - rho.matrix
    quad = np.trace(A @ apply_kernel(g.kernel, sigma, rho, A))
    return float((g.a * np.trace(A) + quad).real)


def entropy_direct(g: GFunction, rho, sigma) -> float:
    """``Tr rho^(1/2) g(L_sigma / R_rho)(rho^(1/2))`` evaluated spectrally."""
    rho, sigma = as_point(rho), as_point(sigma)
    mu, Phi = sigma.eigenvalues, sigma.eigenvectors
    lam, Psi = rho.eigenvalues, rho.eigenvectors
    overlap = np.abs(Phi.conj().T @ Psi) ** 2
    G = np.array([[g.derivative(float(x / y)) for y in lam] for x in mu])
    return float(np.sum(G * lam[None, :] * overlap))


def metric_eval_g(g: GFunction, rho, X, Y) -> float:
    """``lambda^g_rho(X, Y)`` through the kernel ``c + c^``."""
    fr = MetricFrame(metric_from_g(g), rho)
    return float(fr.inner(fr.eig(X)[None], fr.eig(Y)[None])[0, 0])


def metric_derivative(m: MonotoneMetric, rho, X, Y, Z) -> float:
    """``X lambda(Y, Z)`` for constant fields, analytic."""
    fr = MetricFrame(m, rho)
    x, y, z = (fr.eig(V)[None] for V in (X, Y, Z))
    return float(fr.metric_derivative(x, y, z)[0, 0, 0])


# ---------------------------------------------------------------------------
# connections


def Q_tensor(g: GFunction, rho, X, Y, Z) -> complex:
    """``Q(X,Y,Z) = sum R(l_i,l_j|l_k) x_ki y_ij z_jk`` with ``R`` the divided difference of ``c_r``.

    ``Q`` is complex in general; only ``2 Re`` of its symmetrization enters
    the skewness tensor.
    """
    geo = Geometry(g, rho, second_order=False)
    x, y, z = (geo.eig(V)[None] for V in (X, Y, Z))
    return complex(geo.q(x, y, z)[0, 0, 0])


@dataclass(frozen=True)
class SkewnessTensor:
    """``D~`` over the orthonormal adapted basis, and the raised ``D(b_i, b_j)`` matrices."""

    components: np.ndarray
    raised: np.ndarray
    basis: np.ndarray = field(repr=False)

    def symmetry_defect(self) -> float:
        D = self.components
        perms = [(0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
        return float(max(np.max(np.abs(D - D.transpose(p))) for p in perms))


def skewness(g: GFunction, rho) -> SkewnessTensor:
    geo = Geometry(g, rho, second_order=False)
    B = geo.B
    D = geo.skew(B, B, B)
    raised = np.array([[geo.sd.from_eigen(v) for v in row] for row in geo.from_coords(D)])
    return SkewnessTensor(D, raised, np.array(geo.basis.elements))


def metric_connection(m: MonotoneMetric, rho, X, Y):
    """Metric (Levi-Civita) connection ``nabla-bar_X Y`` of a monotone metric."""
    fr = MetricFrame(m, rho)
    d = fr.nabla_bar(fr.eig(X)[None], fr.eig(Y)[None])[0, 0]
    return fr.sd.from_eigen(d)


def nabla_g(g: GFunction, rho, X, Y, p=1.0):
    """``nabla^(g)_X Y`` (or the p-connection ``nabla^(p)``) as a Hermitian matrix."""
    geo = Geometry(g, rho, second_order=False)
    G = geo.gamma(geo.eig(X)[None], geo.eig(Y)[None], geo.B, p=p)[0, 0]
    return geo.sd.from_eigen(geo.from_coords(G))


def duality_residual(g: GFunction, rho, X, Y, Z, p=1.0) -> float:
    """``X lambda(Y,Z) - lambda(nabla^(p)_X Y, Z) - lambda(Y, nabla^(1-p)_X Z)``."""
    geo = Geometry(g, rho, second_order=False)
    x, y, z = (geo.eig(V)[None] for V in (X, Y, Z))
    lhs = geo.metric_derivative(x, y, z)[0, 0, 0]
    rhs = geo.gamma(x, y, z, p)[0, 0, 0] + geo.gamma(x, z, y, 1 - p)[0, 0, 0]
    return float(lhs - rhs)


@dataclass(frozen=True)
class ConnectionCoefficients:
    """``nabla_{b_i} b_j`` over the orthonormal basis: components and (-1)-representations."""

    components: np.ndarray
    vectors: np.ndarray
    tag: str

    def torsion_defect(self) -> float:
        G = self.components
        return float(np.max(np.abs(G - G.transpose(1, 0, 2))))


def connection_coefficients(g: GFunction, rho, p=1.0) -> ConnectionCoefficients:
    geo = Geometry(g, rho, second_order=False)
    B = geo.B
    G = geo.gamma(B, B, B, p)
    vecs = np.array([[geo.sd.from_eigen(v) for v in row] for row in geo.from_coords(G)])
    return ConnectionCoefficients(G, vecs, f"p={p:g}:{g.label}")


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureTensor:
    """``R(b_i, b_j, b_k, b_l) = lambda(nabla_i nabla_j b_k - nabla_j nabla_i b_k, b_l)``.

    ``components`` comes from the statistical-manifold decomposition,
    ``direct`` from the connection itself; ``route_gap`` is their largest
    componentwise difference.
    """

    components: np.ndarray
    direct: np.ndarray
    p: float
    tag: str
    metric_part: np.ndarray = field(repr=False)
    cubic_part: np.ndarray = field(repr=False)

    @property
    def route_gap(self) -> float:
        return float(np.max(np.abs(self.components - self.direct)))

    @property
    def norm(self) -> float:
        return float(np.max(np.abs(self.components)))

    def antisymmetry_defect(self) -> float:
        R = self.components
        return float(np.max(np.abs(R + R.transpose(1, 0, 2, 3))))


def curvature_bar(geo: MetricFrame, dgamma_bar):
    """Metric-connection curvature from ``X lambda(nabla-bar_Y Z, W)`` and ``nabla-bar``."""
    B = geo.B
    Gb = geo.coords(geo.nabla_bar(B, B).reshape(-1, *B.shape[1:])).reshape(len(B), len(B), -1)
    R = dgamma_bar - dgamma_bar.transpose(1, 0, 2, 3)
    R += np.einsum("acm,bdm->abcd", Gb, Gb) - np.einsum("bcm,adm->abcd", Gb, Gb)
    return R, Gb


def curvature_p(g: GFunction, p: float, rho) -> CurvatureTensor:
    """Curvature of the p-connection of ``g`` by two independent routes."""
    geo = Geometry(g, rho, second_order=True)
    B = geo.B
    # decomposition route
    Rbar, Gb = curvature_bar(geo, geo.dgamma_bar(B, B, B, B))
    D = geo.skew(B, B, B)
    XD = geo.dskew(B, B, B, B)
    F = (
        XD
        - np.einsum("abm,mcd->abcd", Gb, D)
        - np.einsum("acm,bmd->abcd", Gb, D)
        - np.einsum("adm,bcm->abcd", Gb, D)
    )
    DD = np.einsum("adj,bcj->abcd", D, D) - np.einsum("acj,bdj->abcd", D, D)
    s = 1.0 - 2.0 * p
    Rp = Rbar + 0.5 * s * (F.transpose(1, 0, 2, 3) - F) + 0.25 * s * s * DD
    # direct route
    G = geo.gamma(B, B, B, p)
    Gd = geo.gamma(B, B, B, 1 - p)
    dG = geo.dgamma(B, B, B, B, p)
    Rd = dG - dG.transpose(1, 0, 2, 3)
    Rd -= np.einsum("bcm,adm->abcd", G, Gd)
    Rd += np.einsum("acm,bdm->abcd", G, Gd)
    return CurvatureTensor(Rp, Rd, p, g.label, Rbar, DD)


def metric_curvature(m: MonotoneMetric, rho) -> np.ndarray:
    """Curvature of the metric connection of ``m`` over its orthonormal adapted basis."""
    fr = MetricFrame(m, rho, second_order=True)
    B = fr.B
    tb = fr.tbar
    a = _quad(tb, B, B, B, B)
    dgb = (a + a.transpose(0, 2, 1, 3) - a.transpose(0, 1, 3, 2)).real
    R, _ = curvature_bar(fr, dgb)
    return R


def conjugate_residual(g: GFunction, rho, X=None, Y=None, Z=None, W=None) -> float:
    """Antisymmetric part ``F(X,Y,Z,W) - F(Y,X,Z,W)`` of the covariant derivative of ``D~``.

    Defaults are the witness components ``X = Z = e_11`` and
    ``Y = W = e_12 + e_21`` in the eigenbasis of ``rho``.
    """
    geo = Geometry(g, rho, second_order=True)
    n = geo.rho.n
    if X is None:
        e11 = np.zeros((n, n), dtype=complex)
        e11[0, 0] = 1
        e12 = np.zeros((n, n), dtype=complex)
        e12[0, 1] = e12[1, 0] = 1
        x, y, z, w = e11, e12, e11, e12
    else:
        x, y, z, w = (geo.eig(V) for V in (X, Y, Z, W))
    x, y, z, w = (v[None] for v in (x, y, z, w))
    nb = geo.nabla_bar
    yz, yw, xz, xw = nb(y, z)[0], nb(y, w)[0], nb(x, z)[0], nb(x, w)[0]
    val = (
        geo.dskew(x, y, z, w)[0, 0, 0, 0]
        - geo.dskew(y, x, z, w)[0, 0, 0, 0]
        + geo.skew(x, yz, w)[0, 0, 0]
        + geo.skew(x, z, yw)[0, 0, 0]
        - geo.skew(y, xz, w)[0, 0, 0]
        - geo.skew(y, z, xw)[0, 0, 0]
    )
    return float(val)


# ---------------------------------------------------------------------------
# scalar ODE residuals


def _parts(g: GFunction, u, order):
    gh = g.transpose()
    gbar = g.derivative(u, order) + gh.derivative(u, order)
    gr = gh.derivative(u, order) - g.derivative(u, order)
    return gbar, gr


def conjugate_ode_residual(g: GFunction, u: float) -> float:
    """``-alpha gbar(u) - (2u g_r'(u) - g_r(u) + 2au + 2a)``; zero for conjugate symmetric g."""
    a, alpha = g.a, g.alpha
    gbar, gr = _parts(g, u, 0)
    _, dgr = _parts(g, u, 1)
    return -alpha * gbar - (2 * u * dgr - gr + 2 * a * u + 2 * a)


def conjugate_ode_residual_alt(g: GFunction, u: float) -> float:
    """``(1+alpha)/2 gbar(u) - (g'(1/u) + u g'(u) - au - a)``; equals ``-1/2`` times the other form."""
    a, alpha = g.a, g.alpha
    gbar, _ = _parts(g, u, 0)
    return 0.5 * (1 + alpha) * gbar - (g.derivative(1 / u, 1) + u * g.derivative(u, 1) - a * u - a)


def flat_ode_residual(g: GFunction, u: float) -> float:
    """``(a^2-1) gbar + gbar'(u-1) - 2 gbar'' u (1+u) + alpha (g_r' + 2a)(u-1) + 8``."""
    a, alpha = g.a, g.alpha
    gbar, _ = _parts(g, u, 0)
    dgbar, dgr = _parts(g, u, 1)
    ddgbar, _ = _parts(g, u, 2)
    return (
        (alpha**2 - 1) * gbar
        + dgbar * (u - 1)
        - 2 * ddgbar * u * (1 + u)
        + alpha * (dgr + 2 * a) * (u - 1)
        + 8
    )
