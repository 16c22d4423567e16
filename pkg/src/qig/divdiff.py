"""Divided differences with confluent limits, for functions and kernels.

For a kernel ``c(x, y)`` the notation follows the usual operator-calculus
conventions:

* ``T(x, y | z)``    first divided difference of ``c(., z)`` over ``x, y``;
* ``T(z | x, y)``    first divided difference of ``c(z, .)`` over ``x, y``;
* ``T(x, y, z | w)`` second divided difference in the first argument;
* ``T(x, y | z, w)`` first divided difference in each argument.

Nodes that (nearly) coincide are handled by a Taylor expansion about their
mean instead of the raw quotient.
"""

from __future__ import annotations

import math

import numpy as np

# Relative node spread below which an order-r difference is evaluated by
# Taylor expansion about the cluster mean, keyed by r.
CONFLUENT_RTOL = {1: 1e-4, 2: 1e-3, 3: 3e-3}


def divided_difference(f, nodes, diff=None):
    """Divided difference ``f[x_0, ..., x_r]``.

    Parameters
    ----------
    f : callable
        ``f(x, order)`` returning the ``order``-th derivative at ``x``. May
        raise ``NotImplementedError`` for orders it cannot supply.
    nodes : sequence of float
    diff : callable, optional
        ``diff(x, y) = f(x) - f(y)`` computed without cancellation.
    """
    xs = sorted(float(x) for x in nodes)
    r = len(xs) - 1
    if r == 0:
        return f(xs[0], 0)
    spread = xs[-1] - xs[0]
    scale = max(abs(xs[0]), abs(xs[-1]))
    if spread <= CONFLUENT_RTOL.get(r, 3e-3) * scale:
        return _cluster(f, xs, r)
    if r == 1:
        num = diff(xs[1], xs[0]) if diff is not None else f(xs[1], 0) - f(xs[0], 0)
        return num / spread
    return (divided_difference(f, xs[1:], diff) - divided_difference(f, xs[:-1], diff)) / spread


def _cluster(f, xs, r):
    m = sum(xs) / len(xs)
    val = f(m, r) / math.factorial(r)
    s2 = sum((x - m) ** 2 for x in xs)
    if s2 > 0.0:
        try:
            # h_2 of the centred nodes is s2/2; h_1 vanishes at the mean
            val += f(m, r + 2) / math.factorial(r + 2) * 0.5 * s2
        except NotImplementedError:
            pass
    return val


def function_dd(fn, nodes):
    """Divided difference of a :class:`~qig.kernels.ScalarFunction`."""
    return divided_difference(fn.derivative, nodes, fn.diff)


def kernel_dd(c, xs, ys):
    """Divided difference of a kernel over ``xs`` in the first and ``ys`` in the second argument."""
    ys = tuple(ys)

    def outer(x, a):
        return divided_difference(lambda y, b: c.partial(a, b, x, y), ys)

    return divided_difference(outer, xs)


def dd1(c, x, y, z):
    """``T(x, y | z)``."""
    return kernel_dd(c, (x, y), (z,))


def dd1_right(c, z, x, y):
    """``T(z | x, y)``."""
    return kernel_dd(c, (z,), (x, y))


def dd2(c, x, y, z, w):
    """``T(x, y, z | w)``."""
    return kernel_dd(c, (x, y, z), (w,))


def dd_mixed(c, x, y, z, w):
    """``T(x, y | z, w)``."""
    return kernel_dd(c, (x, y), (z, w))


# ---------------------------------------------------------------------------
# eigenvalue tables


def function_tables(fn, lam, order):
    """Arrays of divided differences of ``fn`` on all index tuples of ``lam``.

    Returns a list ``[F1, ..., F_order]`` where ``F_r`` has ``r + 1`` indices.
    """
    lam = [float(v) for v in lam]
    n = len(lam)
    out = []
    for r in range(1, order + 1):
        arr = np.empty((n,) * (r + 1))
        for idx in np.ndindex(*arr.shape):
            key = tuple(sorted(idx))
            if key != idx:
                arr[idx] = arr[key]
                continue
            arr[idx] = function_dd(fn, [lam[i] for i in idx])
        out.append(arr)
    return out


class KernelTables:
    """Divided-difference tables of a kernel on a fixed spectrum.

    ``value[i, j]  = c(l_i, l_j)``
    ``first[i, j, k] = T(l_i, l_j | l_k)``
    ``right[i, k, l] = T(l_i | l_k, l_l)``
    ``second[i, j, k, l] = T(l_i, l_j, l_k | l_l)``
    ``mixed[i, j, k, l] = T(l_i, l_j | l_k, l_l)``

    Everything is computed in the constructor, so instances are immutable.
    """

    def __init__(self, c, lam, second_order=True):
        self.kernel = c
        lam = [float(v) for v in lam]
        self.lam = np.array(lam)
        n = len(lam)
        self.value = np.array([[c.value(x, y) for y in lam] for x in lam])
        self.first = np.empty((n, n, n))
        self.right = np.empty((n, n, n))
        for i, j, k in np.ndindex(n, n, n):
            if j < i:
                self.first[i, j, k] = self.first[j, i, k]
            else:
                self.first[i, j, k] = kernel_dd(c, (lam[i], lam[j]), (lam[k],))
            if k < j:
                self.right[i, j, k] = self.right[i, k, j]
            else:
                self.right[i, j, k] = kernel_dd(c, (lam[i],), (lam[j], lam[k]))
        self.second = self.mixed = None
        if second_order:
            self.second = np.empty((n,) * 4)
            self.mixed = np.empty((n,) * 4)
            for i, j, k, l in np.ndindex(n, n, n, n):
                key = tuple(sorted((i, j, k)))
                if key != (i, j, k):
                    self.second[i, j, k, l] = self.second[key + (l,)]
                else:
                    self.second[i, j, k, l] = kernel_dd(c, (lam[i], lam[j], lam[k]), (lam[l],))
                if j < i or l < k:
                    self.mixed[i, j, k, l] = self.mixed[min(i, j), max(i, j), min(k, l), max(k, l)]
                else:
                    self.mixed[i, j, k, l] = kernel_dd(c, (lam[i], lam[j]), (lam[k], lam[l]))

    def combine(self, w, other, w_other=1.0):
        """Tables of ``w * self.kernel + w_other * other.kernel`` without recomputation."""
        out = object.__new__(KernelTables)
        out.kernel = None
        out.lam = self.lam
        for name in ("value", "first", "right", "second", "mixed"):
            a, b = getattr(self, name), getattr(other, name)
            setattr(out, name, None if a is None or b is None else w * a + w_other * b)
        return out
