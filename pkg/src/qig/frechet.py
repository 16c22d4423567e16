"""Kernel superoperators and Frechet derivatives of matrix functions.

All sums are evaluated in the eigenbasis of the base point, where a kernel
superoperator ``c(L_sigma, R_rho)`` acts entrywise and derivatives become
divided-difference weighted index contractions.
"""

from __future__ import annotations

import numpy as np

from .divdiff import KernelTables, function_tables
from .spectral import as_point, as_tangent


def apply_kernel(c, left, right, A):
    """``c(L_left, R_right)(A)``.

    In the eigenbases ``(mu, phi)`` of ``left`` and ``(lam, psi)`` of
    ``right`` this is ``sum_ij c(mu_i, lam_j) <phi_i|A|psi_j> |phi_i><psi_j|``.
    """
    left, right = as_point(left), as_point(right)
    A = np.asarray(A, dtype=complex)
    if left.n != right.n or A.shape != (left.n, right.n):
        raise ValueError("dimension mismatch")
    mu, Phi = left.eigenvalues, left.eigenvectors
    lam, Psi = right.eigenvalues, right.eigenvectors
    C = np.array([[c.value(float(x), float(y)) for y in lam] for x in mu])
    return Phi @ (C * (Phi.conj().T @ A @ Psi)) @ Psi.conj().T


def kernel_derivative_eig(tables: KernelTables, x, a):
    """Eigen-coordinates of ``d/ds c(L_{rho+sX}, R_{rho+sX})(A)`` at ``s = 0``.

    ``x`` and ``a`` are eigen-coordinates of ``X`` and ``A``. The left
    perturbation contributes ``T(i,j|k) x_ij a_jk`` and the right one
    ``T(i|k,l) a_ik x_kl``.
    """
    left = np.einsum("ijk,ij,jk->ik", tables.first, x, a)
    right = np.einsum("ikl,ik,kl->il", tables.right, a, x)
    return left + right


def frechet1(f, rho, X):
    """``L_f[rho](X) = d/ds f(rho + sX)`` at ``s = 0``."""
    rho = as_point(rho)
    sd = rho.spectral
    X = as_tangent(X, rho.n)
    (F1,) = function_tables(f, rho.eigenvalues, 1)
    return sd.from_eigen(F1 * sd.to_eigen(X))


def frechet2(f, rho, X, Y):
    """``d^2/ds dt f(rho + sX + tY)`` at zero."""
    rho = as_point(rho)
    sd = rho.spectral
    x = sd.to_eigen(as_tangent(X, rho.n))
    y = sd.to_eigen(as_tangent(Y, rho.n, "Y"))
    _, F2 = function_tables(f, rho.eigenvalues, 2)
    out = np.einsum("ijk,ij,jk->ik", F2, x, y) + np.einsum("ijk,ij,jk->ik", F2, y, x)
    return sd.from_eigen(out)


def frechet3(f, rho, X, Y, Z):
    """Third Frechet derivative ``d^3/ds dt du f(rho + sX + tY + uZ)`` at zero."""
    rho = as_point(rho)
    sd = rho.spectral
    x, y, z = (sd.to_eigen(as_tangent(V, rho.n)) for V in (X, Y, Z))
    *_, F3 = function_tables(f, rho.eigenvalues, 3)
    out = np.zeros_like(x)
    for a, b, c in ((x, y, z), (x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)):
        out += np.einsum("ijkl,ij,jk,kl->il", F3, a, b, c)
    return sd.from_eigen(out)


def matrix_function(f, rho):
    """``f(rho)`` by spectral calculus."""
    rho = as_point(rho)
    return rho.function(lambda lam: np.array([f.derivative(float(v), 0) for v in lam]))
