"""Operator convex generators ``g`` and the kernels derived from them.

Every generator is normalized by ``g(1) = 0`` and ``g''(1) = 1`` and is
described by its linear coefficient ``a = g'(1)`` and the function

    k(u) = (g(u) - a (u - 1)) / (u - 1)^2,

from which the two-variable kernel ``c(x, y) = k(x/y) / y`` follows. The
transpose ``u g(1/u)`` corresponds to swapping the kernel's arguments.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .kernels import EPS, RatioKernel, ScalarFunction, ScalarKernel, falling

SERIES_RADIUS = 0.25
SERIES_TERMS = 60


def _expm1_over(beta, t):
    """``expm1(beta t) / beta`` with the limit ``t`` at ``beta = 0``."""
    if beta == 0.0:
        return t
    return math.expm1(beta * t) / beta


def _from_k(kd, d, n):
    """``d^n/du^n [k(u) d^2]`` from derivatives ``kd(i)`` of k (``d = u - 1``)."""
    out = kd(n) * d * d
    if n >= 1:
        out += 2 * n * kd(n - 1) * d
    if n >= 2:
        out += n * (n - 1) * kd(n - 2)
    return out


class GFunction:
    """Base class for members of the class of normalized operator convex generators."""

    family = "abstract"
    max_order = 4

    def __init__(self):
        self._kernel = RatioKernel(_KAdapter(self), name=f"c[{self.label}]")

    # -- to be provided by subclasses
    a: float = 0.0

    def derivative(self, u, order=0):
        raise NotImplementedError

    def k(self, u, order=0):
        raise NotImplementedError

    def transpose(self) -> "GFunction":
        return TransposedG(self)

    def spec(self) -> dict:
        raise NotImplementedError

    @property
    def label(self) -> str:
        return self.family

    # -- derived
    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return np.vectorize(lambda v: self.derivative(float(v), 0))(u)

    @property
    def kernel(self) -> ScalarKernel:
        """``c(x, y) = k(x/y) / y``."""
        return self._kernel

    @property
    def alpha(self) -> float:
        return 2.0 * self.derivative(1.0, 3) + 3.0

    @property
    def is_symmetric(self) -> bool:
        return False

    def __repr__(self):
        return f"GFunction({self.label})"

    def check(self, grid=None):
        """Residuals of the normalization and convexity conditions."""
        grid = np.geomspace(1e-3, 1e3, 61) if grid is None else grid
        return {
            "g(1)": abs(self.derivative(1.0, 0)),
            "g''(1)-1": abs(self.derivative(1.0, 2) - 1.0),
            "alpha": self.alpha,
            "min g''": min(self.derivative(float(u), 2) for u in grid),
        }


class _KAdapter(ScalarFunction):
    def __init__(self, g):
        super().__init__(name=f"k[{g.label}]")
        self._g = g
        self.max_order = g.max_order

    def derivative(self, u, order=0):
        if order > self.max_order:
            raise NotImplementedError(order)
        return self._g.k(u, order)


class AlphaG(GFunction):
    """``4/(1-a^2) ((1+u)/2 - u^((1+a)/2))``, ``u log u`` at +1 and ``-log u`` at -1."""

    family = "alpha"

    def __init__(self, alpha):
        alpha = float(alpha)
        if abs(alpha) > 3.0:
            raise ValueError(f"alpha={alpha} outside [-3, 3]")
        self.alpha_param = alpha
        self.q = (1.0 + alpha) / 2.0
        if alpha == 1.0:
            self.a = 1.0
        elif alpha == -1.0:
            self.a = -1.0
        else:
            self.a = -2.0 * alpha / (1.0 - alpha * alpha)
        super().__init__()

    @property
    def label(self):
        return f"alpha:{self.alpha_param:g}"

    @property
    def is_symmetric(self):
        return self.alpha_param == 0.0

    def spec(self):
        return {"family": "alpha", "alpha": self.alpha_param}

    def transpose(self):
        return AlphaG(-self.alpha_param)

    # remainder P(u) = g(u) - a (u - 1) and its derivatives
    def _P(self, u, m):
        q = self.q
        if m == 0:
            t, d = math.log(u), u - 1.0
            if q >= 0.5:
                return (u * _expm1_over(q - 1.0, t) - d) / q
            return (d - _expm1_over(q, t)) / (1.0 - q)
        if m == 1:
            return _expm1_over(q - 1.0, math.log(u))
        return falling(q - 2.0, m - 2) * u ** (q - m)

    def _taylor(self, j):
        # g^{(j)}(1) for j >= 2
        return falling(self.q - 2.0, j - 2)

    def derivative(self, u, order=0):
        if order == 0:
            return self.a * (u - 1.0) + self._P(u, 0)
        if order == 1:
            return self.a + self._P(u, 1)
        return self._P(u, order)

    def k(self, u, order=0):
        d = u - 1.0
        if abs(d) < SERIES_RADIUS:
            total = 0.0
            for m in range(order, order + SERIES_TERMS):
                total += (
                    self._taylor(m + 2)
                    / math.factorial(m + 2)
                    * falling(m, order)
                    * d ** (m - order)
                )
            return total
        total = 0.0
        for j in range(order + 1):
            total += (
                math.comb(order, j)
                * self._P(u, order - j)
                * (-1) ** j
                * math.factorial(j + 1)
                * d ** (-2 - j)
            )
        return total


class ExtremeG(GFunction):
    """``(1+s)/2 (u-1)^2/(u+s)`` for ``s`` in ``[0, inf)`` and ``(u-1)^2/2`` at infinity."""

    family = "extreme"

    def __init__(self, s):
        s = float(s)
        if s < 0:
            raise ValueError("s must be non-negative")
        self.s = s
        self.a = 0.0
        super().__init__()

    @property
    def label(self):
        return f"extreme:{self.s:g}"

    @property
    def is_symmetric(self):
        return self.s == 1.0

    def spec(self):
        return {"family": "extreme", "s": "inf" if math.isinf(self.s) else self.s}

    def transpose(self):
        if self.s == 0.0:
            return ExtremeG(math.inf)
        if math.isinf(self.s):
            return ExtremeG(0.0)
        return ExtremeG(1.0 / self.s)

    def k(self, u, order=0):
        if math.isinf(self.s):
            return 0.5 if order == 0 else 0.0
        s = self.s
        return 0.5 * (1 + s) * (-1) ** order * math.factorial(order) / (u + s) ** (order + 1)

    def derivative(self, u, order=0):
        return _from_k(lambda i: self.k(u, i), u - 1.0, order)


class MeasureG(GFunction):
    """Generator given by a finite representing measure.

    ``k(u) = b + c/u + sum_i w_i (1 + s_i)/(u + s_i)`` where ``b`` and ``c`` are
    the masses at infinity and at zero. The masses are rescaled so that they
    add up to 1/2; the applied factor is kept in ``rescale``.
    """

    family = "measure"
    max_order = 8

    def __init__(self, a=0.0, atom_inf=0.0, atom_zero=0.0, nodes=(), weights=()):
        nodes = np.asarray(nodes, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if nodes.shape != weights.shape:
            raise ValueError("nodes and weights differ in length")
        if len(nodes) > 64:
            raise ValueError("at most 64 quadrature nodes")
        if np.any(nodes <= 0) or np.any(weights < 0) or atom_inf < 0 or atom_zero < 0:
            raise ValueError("measure must be positive with nodes in (0, inf)")
        total = atom_inf + atom_zero + weights.sum()
        if total <= 0:
            raise ValueError("measure has zero mass")
        self.rescale = 0.5 / total
        self.a = float(a)
        self.b = atom_inf * self.rescale
        self.c = atom_zero * self.rescale
        self.nodes = nodes
        self.weights = weights * self.rescale
        super().__init__()

    @classmethod
    def from_density(cls, density, lo, hi, npts=32, a=0.0, atom_inf=0.0, atom_zero=0.0):
        """Gauss-Legendre discretization of ``density(s) ds`` on ``[lo, hi]``."""
        x, w = np.polynomial.legendre.leggauss(npts)
        s = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * w * np.array([density(v) for v in s])
        return cls(a, atom_inf, atom_zero, s, w)

    @property
    def label(self):
        return f"measure[{len(self.nodes)}]"

    def spec(self):
        return {
            "family": "measure",
            "a": self.a,
            "atom_inf": self.b,
            "atom_zero": self.c,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }

    def transpose(self):
        return MeasureG(-self.a, self.c, self.b, 1.0 / self.nodes, self.weights)

    def k(self, u, order=0):
        sign = (-1) ** order * math.factorial(order)
        out = self.b if order == 0 else 0.0
        out += self.c * sign / u ** (order + 1)
        out += float(np.sum(self.weights * (1 + self.nodes) * sign / (u + self.nodes) ** (order + 1)))
        return out

    def derivative(self, u, order=0):
        lin = self.a * (u - 1.0) if order == 0 else (self.a if order == 1 else 0.0)
        return lin + _from_k(lambda i: self.k(u, i), u - 1.0, order)


class TransposedG(GFunction):
    """``u g(1/u)`` for an arbitrary base generator."""

    family = "transpose"

    def __init__(self, base: GFunction):
        self.base = base
        self.a = -base.a
        self.max_order = base.max_order
        GFunction.__init__(self)
        self._kernel = base.kernel.swapped()

    @property
    def label(self):
        return f"transpose[{self.base.label}]"

    def spec(self):
        return {"family": "transpose", "base": self.base.spec()}

    def transpose(self):
        return self.base

    def derivative(self, u, order=0):
        v = 1.0 / u
        g = self.base.derivative
        if order == 0:
            return u * g(v, 0)
        if order == 1:
            return g(v, 0) - v * g(v, 1)
        if order == 2:
            return v**3 * g(v, 2)
        if order == 3:
            return -3 * v**4 * g(v, 2) - v**5 * g(v, 3)
        if order == 4:
            return 12 * v**5 * g(v, 2) + 8 * v**6 * g(v, 3) + v**7 * g(v, 4)
        raise NotImplementedError(order)

    def k(self, u, order=0):
        return self.base.kernel.partial(0, order, 1.0, u)


class MixtureG(GFunction):
    """``p g + (1 - p) g^``; stays in the same convex set as ``g``."""

    family = "mixture"

    def __init__(self, base: GFunction, p: float):
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        self.base, self.p = base, p
        self.hat = base.transpose()
        self.a = (2 * p - 1) * base.a
        self.max_order = min(base.max_order, self.hat.max_order)
        GFunction.__init__(self)
        self._kernel = p * base.kernel + (1 - p) * self.hat.kernel

    @property
    def label(self):
        return f"mixture:{self.p:g}:{self.base.label}"

    @property
    def is_symmetric(self):
        return self.p == 0.5 or self.base.is_symmetric

    def spec(self):
        return {"family": "mixture", "p": self.p, "base": self.base.spec()}

    def transpose(self):
        return MixtureG(self.base, 1.0 - self.p)

    def derivative(self, u, order=0):
        return self.p * self.base.derivative(u, order) + (1 - self.p) * self.hat.derivative(u, order)

    def k(self, u, order=0):
        return self.p * self.base.k(u, order) + (1 - self.p) * self.hat.k(u, order)


class CustomG(GFunction):
    """User-supplied generator; derivatives by finite differences unless given."""

    family = "custom"
    max_order = 3

    def __init__(self, fun, derivatives=(), name="custom"):
        self._fn = ScalarFunction(fun, derivatives, name)
        self._name = name
        self.a = self._fn.derivative(1.0, 1)
        super().__init__()

    @property
    def label(self):
        return self._name

    def spec(self):
        return {"family": "custom", "name": self._name}

    def derivative(self, u, order=0):
        return self._fn.derivative(u, order)

    def _k0(self, u):
        d = u - 1.0
        if abs(d) < 1e-3:
            return 0.5 * self.derivative(1.0, 2) + self.derivative(1.0, 3) / 6 * d
        return (self.derivative(u) - self.a * d) / (d * d)

    def k(self, u, order=0):
        if order == 0:
            return self._k0(u)
        h = EPS ** (1.0 / (order + 2)) * max(1.0, u)
        return sum(
            (-1) ** j * math.comb(order, j) * self._k0(u + (order / 2 - j) * h)
            for j in range(order + 1)
        ) / h**order


class SymmetricFromF(GFunction):
    """Symmetric generator ``h = (u-1)^2 / (2 F(u))`` of a monotone function ``F``."""

    family = "from_F"
    max_order = 3

    def __init__(self, F: "MonotoneF"):
        self.F = F
        self.a = 0.0
        self._kfun = ScalarFunction(lambda u: 0.5 / F(u), name=f"1/2F[{F.name}]")
        self._kfun.max_order = 3
        super().__init__()

    @property
    def label(self):
        return f"h[{self.F.name}]"

    @property
    def is_symmetric(self):
        return True

    def spec(self):
        return {"family": "from_F", "F": self.F.name}

    def transpose(self):
        return self

    def k(self, u, order=0):
        return self._kfun.derivative(u, order)

    def derivative(self, u, order=0):
        return _from_k(lambda i: self.k(u, i), u - 1.0, order)


# ---------------------------------------------------------------------------
# public constructors and derived objects


def make_g_alpha(alpha) -> GFunction:
    return AlphaG(alpha)


def make_g_extreme(s) -> GFunction:
    return ExtremeG(s)


def transpose(g: GFunction) -> GFunction:
    return g.transpose()


def mix(g: GFunction, p: float) -> GFunction:
    """``p g + (1 - p) g^``."""
    return MixtureG(g, p)


def alpha_of(g: GFunction) -> float:
    return g.alpha


def k_of(g: GFunction) -> ScalarFunction:
    return _KAdapter(g)


def kernel_c(g: GFunction) -> ScalarKernel:
    return g.kernel


def kernel_cbar(g: GFunction) -> ScalarKernel:
    """Morozova-Chentsov kernel ``c + c^`` of the metric induced by ``g``."""
    return g.kernel + g.kernel.swapped()


def kernel_cr(g: GFunction) -> ScalarKernel:
    """Antisymmetric part ``c^ - c``."""
    return g.kernel.swapped() - g.kernel


def k_sym(g: GFunction, u):
    return g.k(u) + g.k(1.0 / u) / u


# ---------------------------------------------------------------------------
# operator monotone functions


class MonotoneF:
    """A symmetric normalized operator monotone function ``F``.

    ``h`` (optional) is the symmetric generator known to induce the same
    metric exactly; when absent one is built from ``F`` numerically.
    """

    def __init__(self, fun, name, h: GFunction | None = None):
        self._fun = fun
        self.name = name
        self._h = h

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.vectorize(lambda v: float(self._fun(float(v))))(x)

    @property
    def h(self) -> GFunction:
        return self._h if self._h is not None else SymmetricFromF(self)

    def check(self, grid=None):
        grid = np.geomspace(1e-3, 1e3, 61) if grid is None else grid
        vals = self(grid)
        return {
            "F(1)-1": abs(float(self(1.0)) - 1.0),
            "symmetry": float(np.max(np.abs(vals - grid * self(1.0 / grid)) / vals)),
            "monotone": bool(np.all(np.diff(vals) >= -1e-12 * vals[1:])),
        }

    def __repr__(self):
        return f"MonotoneF({self.name})"


def _F_bkm(x):
    return 1.0 if x == 1.0 else (x - 1.0) / math.log(x)


def _F_wyd(alpha):
    q = (1.0 + alpha) / 2.0

    def F(x):
        if x == 1.0:
            return 1.0
        t = math.log(x)
        return (x - 1.0) ** 2 / (_expm1_over(q, t) * _expm1_over(1.0 - q, t))

    return F


def F_bures():
    return MonotoneF(lambda x: 0.5 * (1.0 + x), "bures", ExtremeG(1.0))


def F_rld():
    return MonotoneF(lambda x: 2.0 * x / (1.0 + x), "rld", MixtureG(ExtremeG(0.0), 0.5))


def F_bkm():
    return MonotoneF(_F_bkm, "bkm", MixtureG(AlphaG(1.0), 0.5))


def F_wy():
    return MonotoneF(lambda x: 0.25 * (1.0 + math.sqrt(x)) ** 2, "wy", AlphaG(0.0))


def F_wyd(alpha):
    alpha = float(alpha)
    if abs(alpha) > 3.0:
        raise ValueError(f"WYD parameter {alpha} outside [-3, 3]")
    h = AlphaG(0.0) if alpha == 0.0 else MixtureG(AlphaG(alpha), 0.5)
    return MonotoneF(_F_wyd(alpha), f"wyd:{alpha:g}", h)


def F_from_h(h: GFunction) -> MonotoneF:
    """``F = 1 / k_sym``; for symmetric ``h`` this is ``(u-1)^2 / (2 h(u))``."""
    return MonotoneF(lambda x: 1.0 / k_sym(h, x), f"F[{h.label}]", h if h.is_symmetric else None)


def h_from_F(F: MonotoneF) -> GFunction:
    return F.h


# ---------------------------------------------------------------------------
# serialization


def g_from_spec(spec) -> GFunction:
    """Build a generator from a JSON object/string or a short form.

    Short forms: ``alpha:<a>``, ``extreme:<s>`` (``inf`` allowed) and
    ``mixture:<p>:<base short form>``.
    """
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            return g_from_spec(json.loads(text))
        fam, _, rest = text.partition(":")
        try:
            if fam == "alpha":
                return AlphaG(float(rest))
            if fam == "extreme":
                return ExtremeG(float(rest))
            if fam in ("mixture", "mix"):
                p, _, base = rest.partition(":")
                return MixtureG(g_from_spec(base), float(p))
        except ValueError as exc:
            raise ValueError(f"bad g spec {spec!r}: {exc}") from None
        raise ValueError(f"unknown g spec {spec!r}")
    if not isinstance(spec, dict):
        raise ValueError(f"bad g spec {spec!r}")
    spec = dict(spec)
    fam = spec.pop("family", None)
    allowed = {
        "alpha": {"alpha"},
        "extreme": {"s"},
        "mixture": {"p", "base"},
        "transpose": {"base"},
        "measure": {"a", "atom_inf", "atom_zero", "nodes", "weights"},
    }
    if fam not in allowed:
        raise ValueError(f"unknown family {fam!r}")
    extra = set(spec) - allowed[fam]
    if extra:
        raise ValueError(f"unknown keys for {fam}: {sorted(extra)}")
    if fam == "alpha":
        return AlphaG(float(spec["alpha"]))
    if fam == "extreme":
        return ExtremeG(float(spec["s"]))
    if fam == "mixture":
        return MixtureG(g_from_spec(spec["base"]), float(spec["p"]))
    if fam == "transpose":
        return TransposedG(g_from_spec(spec["base"]))
    return MeasureG(
        float(spec.get("a", 0.0)),
        float(spec.get("atom_inf", 0.0)),
        float(spec.get("atom_zero", 0.0)),
        spec.get("nodes", []),
        spec.get("weights", []),
    )
