"""Scalar functions of one variable and two-variable kernels with derivative bundles.

Both kinds of object expose derivatives through a single method so that the
divided-difference code can ask for "the r-th derivative at x" without
knowing where the function came from. Shipped families supply closed forms;
user callables fall back to central finite differences.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

EPS = np.finfo(float).eps


def _central_difference(f, x, order, scale=1.0):
    """Plain central difference for ``f^{(order)}(x)``; second-order accurate."""
    if order == 0:
        return f(x)
    h = EPS ** (1.0 / (order + 2)) * max(scale, abs(x))
    h = min(h, 0.5 * abs(x)) if x > 0 else h
    total = 0.0
    for k in range(order + 1):
        total += (-1) ** k * math.comb(order, k) * f(x + (order / 2 - k) * h)
    return total / h**order


def falling(p, n):
    """Falling factorial ``p (p-1) ... (p-n+1)``."""
    out = 1.0
    for j in range(n):
        out *= p - j
    return out


class ScalarFunction:
    """A real function on (0, inf) with derivatives of every order.

    The default implementation wraps a callable and differentiates it
    numerically; subclasses override :meth:`derivative`.
    """

    max_order = 8

    def __init__(self, fun=None, derivatives=(), name="custom"):
        self._fun = fun
        self._derivs = tuple(derivatives)
        self.name = name

    def derivative(self, x, order=0):
        if order == 0:
            return float(self._fun(x))
        if order <= len(self._derivs):
            return float(self._derivs[order - 1](x))
        if order > self.max_order:
            raise NotImplementedError(order)
        return _central_difference(self._fun, x, order)

    def __call__(self, x):
        return np.vectorize(lambda t: self.derivative(float(t), 0))(np.asarray(x, dtype=float))

    def diff(self, x, y):
        """``f(x) - f(y)``; overridden where a cancellation-free form exists."""
        return self.derivative(x) - self.derivative(y)

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


class Power(ScalarFunction):
    """``x**p``."""

    def __init__(self, p):
        super().__init__(name=f"x^{p}")
        self.p = float(p)

    def derivative(self, x, order=0):
        return falling(self.p, order) * x ** (self.p - order)

    def __call__(self, x):
        return np.asarray(x, dtype=float) ** self.p


class Exp(ScalarFunction):
    def __init__(self):
        super().__init__(name="exp")

    def derivative(self, x, order=0):
        return math.exp(x)

    def __call__(self, x):
        return np.exp(x)

    def diff(self, x, y):
        return math.exp(y) * math.expm1(x - y)


class AlphaEmbedding(ScalarFunction):
    """``f(x) = 2/(1-alpha) x^((1-alpha)/2)``, and ``log x`` at ``alpha = 1``."""

    def __init__(self, alpha):
        alpha = float(alpha)
        super().__init__(name=f"f_alpha({alpha:g})")
        self.alpha = alpha
        self.p = (1.0 - alpha) / 2.0

    def derivative(self, x, order=0):
        p = self.p
        if order == 0:
            return math.log(x) if p == 0 else x**p / p
        return falling(p - 1, order - 1) * x ** (p - order)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.log(x) if self.p == 0 else x**self.p / self.p

    def diff(self, x, y):
        t = math.log(x / y)
        if self.p == 0:
            return t
        return y**self.p * math.expm1(self.p * t) / self.p

    def inverse(self):
        return AlphaEmbeddingInverse(self.alpha)


class AlphaEmbeddingInverse(ScalarFunction):
    """Inverse of :class:`AlphaEmbedding`: ``(p y)^(1/p)``, or ``exp(y)`` when ``p = 0``."""

    def __init__(self, alpha):
        alpha = float(alpha)
        super().__init__(name=f"f_alpha^-1({alpha:g})")
        self.alpha = alpha
        self.p = (1.0 - alpha) / 2.0

    def derivative(self, y, order=0):
        p = self.p
        if p == 0:
            return math.exp(y)
        return p**order * falling(1.0 / p, order) * (p * y) ** (1.0 / p - order)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return np.exp(y) if self.p == 0 else (self.p * y) ** (1.0 / self.p)


def Log():
    return AlphaEmbedding(1.0)


# ---------------------------------------------------------------------------
# two-variable kernels


class ScalarKernel:
    """A function ``c(x, y)`` on (0, inf)^2 with partial derivatives.

    ``partial(a, b, x, y)`` returns ``d^a/dx^a d^b/dy^b c(x, y)``. The base
    class wraps a callable and uses nested central differences.
    """

    max_order = 4

    def __init__(self, fun=None, name="custom"):
        self._fun = fun
        self.name = name

    def value(self, x, y):
        return self.partial(0, 0, x, y)

    def __call__(self, x, y):
        return self.value(x, y)

    def partial(self, a, b, x, y):
        if a + b > self.max_order:
            raise NotImplementedError((a, b))
        if a == 0 and b == 0:
            return self._fun(x, y)
        if a > 0:
            return _central_difference(lambda s: self.partial(a - 1, b, s, y), x, 1)
        return _central_difference(lambda s: self.partial(0, b - 1, x, s), y, 1)

    def swapped(self) -> "ScalarKernel":
        return SwappedKernel(self)

    def __add__(self, other):
        return CombinedKernel([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return CombinedKernel([(1.0, self), (-1.0, other)])

    def __rmul__(self, w):
        return CombinedKernel([(float(w), self)])

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


@lru_cache(maxsize=None)
def _ratio_terms(a, b):
    """Symbolic derivative of ``k(x/y)/y``.

    Returns ``(m, terms)`` with ``d^a_x d^b_y c = y^-m * sum coef * u^j * k^(i)(u)``.
    """
    terms = {(0, 0): 1.0}
    m = 1
    for _ in range(a):
        new = {}
        for (j, i), coef in terms.items():
            if j:
                new[(j - 1, i)] = new.get((j - 1, i), 0.0) + coef * j
            new[(j, i + 1)] = new.get((j, i + 1), 0.0) + coef
        terms, m = new, m + 1
    for _ in range(b):
        new = {}
        for (j, i), coef in terms.items():
            new[(j, i)] = new.get((j, i), 0.0) - coef * (j + m)
            new[(j + 1, i + 1)] = new.get((j + 1, i + 1), 0.0) - coef
        terms, m = new, m + 1
    return m, tuple((coef, j, i) for (j, i), coef in terms.items() if coef != 0.0)


class RatioKernel(ScalarKernel):
    """``c(x, y) = k(x/y) / y`` for a one-variable function ``k``."""

    def __init__(self, k: ScalarFunction, name=None):
        super().__init__(name=name or f"ratio[{k.name}]")
        self.k = k
        self.max_order = k.max_order

    def partial(self, a, b, x, y):
        if a + b > self.max_order:
            raise NotImplementedError((a, b))
        u = x / y
        m, terms = _ratio_terms(a, b)
        kd = {}
        total = 0.0
        for coef, j, i in terms:
            if i not in kd:
                kd[i] = self.k.derivative(u, i)
            total += coef * u**j * kd[i]
        return total / y**m


class SwappedKernel(ScalarKernel):
    """``c(y, x)``."""

    def __init__(self, base: ScalarKernel):
        super().__init__(name=f"swap[{base.name}]")
        self.base = base
        self.max_order = base.max_order

    def partial(self, a, b, x, y):
        return self.base.partial(b, a, y, x)

    def swapped(self):
        return self.base


class CombinedKernel(ScalarKernel):
    """Finite linear combination ``sum w_i c_i``."""

    def __init__(self, parts):
        flat = []
        for w, c in parts:
            if isinstance(c, CombinedKernel):
                flat.extend((w * w2, c2) for w2, c2 in c.parts)
            else:
                flat.append((w, c))
        self.parts = tuple(flat)
        super().__init__(name="+".join(f"{w:g}*{c.name}" for w, c in self.parts))
        self.max_order = min(c.max_order for _, c in self.parts)

    def partial(self, a, b, x, y):
        return sum(w * c.partial(a, b, x, y) for w, c in self.parts if w != 0.0)


class ConstantKernel(ScalarKernel):
    def __init__(self, value=1.0):
        super().__init__(name=f"const[{value:g}]")
        self.c = float(value)
        self.max_order = 99

    def partial(self, a, b, x, y):
        return self.c if a == b == 0 else 0.0


class MonomialKernel(ScalarKernel):
    """``coef * x**p * y**q``; handy for exact tests."""

    def __init__(self, p, q, coef=1.0):
        super().__init__(name=f"{coef:g}*x^{p}*y^{q}")
        self.p, self.q, self.coef = float(p), float(q), float(coef)
        self.max_order = 99

    def partial(self, a, b, x, y):
        return (
            self.coef
            * falling(self.p, a)
            * falling(self.q, b)
            * x ** (self.p - a)
            * y ** (self.q - b)
        )
