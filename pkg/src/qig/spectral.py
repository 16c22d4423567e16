"""Spectral data for points of the positive-definite cone."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

TOL_HERM = 1e-12
TOL_RECON = 1e-10
COND_WARN = 1e6


class NotPositiveDefiniteError(ValueError):
    """Raised when a matrix handed to :class:`PositivePoint` has a non-positive eigenvalue."""


class ConditionWarning(UserWarning):
    pass


def hermitian_part(A, name="matrix"):
    """Return ``(A + A^H)/2`` as a complex array, warning if ``A`` was not Hermitian."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    H = 0.5 * (A + A.conj().T)
    defect = np.linalg.norm(A - H)
    if defect > TOL_HERM * max(1.0, np.linalg.norm(A)):
        warnings.warn(f"{name} is not Hermitian (defect {defect:.3g}); symmetrized", stacklevel=3)
    return H


def _fix_phases(U):
    # largest-magnitude component of each column made real positive
    idx = np.argmax(np.abs(U), axis=0)
    piv = U[idx, np.arange(U.shape[1])]
    return U * (np.abs(piv) / piv)[None, :]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and unitary eigenvectors (columns) of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T

    def to_eigen(self, X):
        """Coordinates ``U^H X U`` of ``X`` in the eigenbasis."""
        U = self.eigenvectors
        return U.conj().T @ X @ U

    def from_eigen(self, x):
        U = self.eigenvectors
        return U @ x @ U.conj().T

    def apply(self, fun):
        """Spectral calculus ``fun(A)`` for a vectorized scalar function."""
        U = self.eigenvectors
        return (U * fun(self.eigenvalues)) @ U.conj().T


def spectral_decompose(A) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic phase convention.

    Eigenvalues come back ascending. Each eigenvector is rescaled by a unit
    phase so that its largest-magnitude component is real and positive.
    """
    H = hermitian_part(A)
    w, U = np.linalg.eigh(H)
    U = _fix_phases(U)
    return SpectralDecomposition(w, U)


@dataclass(frozen=True)
class PositivePoint:
    """A positive-definite matrix together with its (eagerly computed) spectrum."""

    matrix: np.ndarray
    spectral: SpectralDecomposition = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        M = hermitian_part(self.matrix, "rho")
        sd = spectral_decompose(M)
        lam = sd.eigenvalues
        if lam[0] <= 0:
            raise NotPositiveDefiniteError(f"smallest eigenvalue {lam[0]:.3g} is not positive")
        if lam[-1] / lam[0] > COND_WARN:
            warnings.warn(
                f"eigenvalue ratio {lam[-1] / lam[0]:.3g} exceeds {COND_WARN:g}; "
                "kernel derivatives may be inaccurate",
                ConditionWarning,
                stacklevel=2,
            )
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "spectral", sd)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self):
        return self.spectral.eigenvalues

    @property
    def eigenvectors(self):
        return self.spectral.eigenvectors

    def function(self, fun):
        return self.spectral.apply(fun)

    def condition(self) -> float:
        lam = self.eigenvalues
        return float(lam[-1] / lam[0])


def as_point(rho) -> PositivePoint:
    return rho if isinstance(rho, PositivePoint) else PositivePoint(np.asarray(rho))


def as_tangent(X, n=None, name="X"):
    """Validate a tangent vector: a Hermitian ``n x n`` matrix."""
    H = hermitian_part(X, name)
    if n is not None and H.shape != (n, n):
        raise ValueError(f"{name} has shape {H.shape}, expected {(n, n)}")
    return H
