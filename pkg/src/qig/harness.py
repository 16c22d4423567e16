"""Randomized property checks: metric monotonicity and entropy axioms.

Each trial draws from its own generator, spawned from the master seed, so
reports are identical whatever the degree of parallelism.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .divdiff import dd1
from .frechet import apply_kernel
from .gfunctions import GFunction
from .ggeometry import entropy
from .metrics import MonotoneMetric, metric_eval
from .serialize import dumps, encode_matrix
from .spectral import as_point

MONO_TOL = 1e-10
AXIOM_TOL = {"positivity": 1e-8, "homogeneity": 1e-10, "convexity": 1e-9, "monotonicity": 1e-9, "derivative": 1e-6}


def _threads(threads=None):
    if threads is not None:
        return max(1, int(threads))
    try:
        return max(1, int(os.environ.get("QIG_THREADS", "1")))
    except ValueError:
        return 1


def _run(fn, seed, trials, threads=None):
    streams = np.random.SeedSequence(seed).spawn(trials)
    rngs = [np.random.default_rng(s) for s in streams]
    nt = _threads(threads)
    if nt == 1:
        return [fn(r) for r in rngs]
    with ThreadPoolExecutor(nt) as ex:
        return list(ex.map(fn, rngs))


# ---------------------------------------------------------------------------
# sampling


def _ginibre(rng, r, c):
    return rng.standard_normal((r, c)) + 1j * rng.standard_normal((r, c))


def random_positive(n, rng, trace=None):
    """``A A^* + delta I`` with ``delta = 0.05 Tr(A A^*)/n``; optionally rescaled to a trace."""
    A = _ginibre(rng, n, n)
    M = A @ A.conj().T
    M = M + 0.05 * np.trace(M).real / n * np.eye(n)
    M = (M + M.conj().T) / 2
    if trace is not None:
        M *= trace / np.trace(M).real
    return M


def random_hermitian(n, rng):
    A = _ginibre(rng, n, n)
    return (A + A.conj().T) / 2


@dataclass(frozen=True)
class StochasticMap:
    """Completely positive trace-preserving map ``rho -> sum K rho K^*``."""

    kraus_ops: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=complex) for K in self.kraus_ops)
        if not ops:
            raise ValueError("need at least one Kraus operator")
        shape = ops[0].shape
        if any(K.shape != shape for K in ops):
            raise ValueError("Kraus operators must share a shape")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def n_in(self):
        return self.kraus_ops[0].shape[1]

    @property
    def n_out(self):
        return self.kraus_ops[0].shape[0]

    def __call__(self, A):
        A = np.asarray(A, dtype=complex)
        out = sum(K @ A @ K.conj().T for K in self.kraus_ops)
        return (out + out.conj().T) / 2

    def trace_defect(self) -> float:
        S = sum(K.conj().T @ K for K in self.kraus_ops)
        return float(np.max(np.abs(S - np.eye(self.n_in))))


def sample_cptp(n_in, n_out, m, seed) -> StochasticMap:
    """Random channel from a Haar-like isometry ``C^n_in -> C^n_out (x) C^m``.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if min(n_in, n_out, m) < 1:
        raise ValueError("dimensions must be positive")
    if m * n_out < n_in:
        raise ValueError(f"m * n_out = {m * n_out} must be at least n_in = {n_in}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Q, R = np.linalg.qr(_ginibre(rng, m * n_out, n_in))
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    return StochasticMap(tuple(Q[i * n_out : (i + 1) * n_out] for i in range(m)))


# ---------------------------------------------------------------------------
# reports


@dataclass
class TrialReport:
    """Outcome of a randomized check; ``passed`` maps property names to booleans."""

    check: str
    subject: str
    seed: int
    trials: int
    max_violation: float
    passed: dict
    witness: dict | None = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    @property
    def violations(self) -> int:
        return int(self.stats.get("violations", 0))

    def to_dict(self):
        d = asdict(self)
        d["ok"] = self.ok
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())


# ---------------------------------------------------------------------------
# metric monotonicity


def check_metric_monotonicity(
    m: MonotoneMetric, trials, seed, n_in=3, n_out=2, kraus=None, tol=MONO_TOL, threads=None
) -> TrialReport:
    """Sample ``rho, X, T`` and test ``lambda_T(rho)(TX, TX) <= lambda_rho(X, X)``.

    ``rho`` is a density matrix; the slack is ``tol * max(1, lambda_rho(X, X))``.
    """
    kraus = kraus if kraus is not None else max(2, -(-n_in // n_out))

    def trial(rng):
        rho = random_positive(n_in, rng, trace=1.0)
        X = random_hermitian(n_in, rng)
        T = sample_cptp(n_in, n_out, kraus, rng)
        before = metric_eval(m, rho, X, X)
        after = metric_eval(m, T(rho), T(X), T(X))
        excess = (after - before) / max(1.0, abs(before))
        return excess, (rho, X, T, before, after)

    results = _run(trial, seed, trials, threads)
    excess = np.array([r[0] for r in results])
    worst = int(np.argmax(excess))
    rho, X, T, before, after = results[worst][1]
    bad = int(np.sum(excess > tol))
    witness = {
        "rho": encode_matrix(rho),
        "X": encode_matrix(X),
        "kraus": [encode_matrix(K) for K in T.kraus_ops],
        "lambda_before": before,
        "lambda_after": after,
    }
    return TrialReport(
        check="metric-monotonicity",
        subject=m.name,
        seed=int(seed),
        trials=int(trials),
        max_violation=float(max(excess.max(), 0.0)),
        passed={"monotone": bad == 0},
        witness=witness,
        stats={"violations": bad, "max_relative_excess": float(excess.max()), "n_in": n_in, "n_out": n_out},
    )


# ---------------------------------------------------------------------------
# entropy axioms


def entropy_gradient(g: GFunction, rho, sigma, Y) -> float:
    """``d/ds H_g(rho, sigma + sY)`` at ``s = 0`` from kernel divided differences."""
    rho, sigma = as_point(rho), as_point(sigma)
    Phi, Psi = sigma.eigenvectors, rho.eigenvectors
    mu, lam = sigma.eigenvalues, rho.eigenvalues
    A = sigma.matrix - rho.matrix
    c = g.kernel
    K = lambda B: apply_kernel(c, sigma, rho, B)  # noqa: E731
    # derivative of c(L_sigma, R_rho) in sigma: divided differences over the left spectrum
    n = len(mu)
    T = np.empty((n, n, n))
    for i, j, k in np.ndindex(n, n, n):
        T[i, j, k] = dd1(c, mu[i], mu[j], lam[k])
    y = Phi.conj().T @ Y @ Phi
    a = Phi.conj().T @ A @ Psi
    dK = Phi @ np.einsum("ijk,ij,jk->ik", T, y, a) @ Psi.conj().T
    val = g.a * np.trace(Y) + np.trace(Y @ K(A)) + np.trace(A @ K(Y)) + np.trace(A @ dK)
    return float(val.real)


def check_entropy_axioms(g: GFunction, trials, seed, n=2, tol=None, threads=None) -> TrialReport:
    """Positivity, homogeneity, joint convexity, monotonicity and differentiability of ``H_g``."""
    tol = dict(AXIOM_TOL, **(tol or {}))

    def trial(rng):
        rho = random_positive(n, rng, trace=1.0)
        sigma = random_positive(n, rng, trace=1.0)
        rho1 = random_positive(n, rng, trace=1.0)
        sigma1 = random_positive(n, rng, trace=1.0)
        H = entropy(g, rho, sigma)
        scale = max(1.0, abs(H))
        out = {}
        # (a) positivity for equal traces, strict away from the diagonal
        far = np.linalg.norm(rho - sigma) > 1e-2
        out["positivity"] = max(-H, (1e-8 - H) if far else 0.0)
        out["self"] = abs(entropy(g, rho, rho))
        # (b) homogeneity
        t = rng.uniform(0.5, 3.0)
        out["homogeneity"] = abs(entropy(g, t * rho, t * sigma) - t * H) / scale
        # (c) joint convexity along a segment
        H1 = entropy(g, rho1, sigma1)
        Hm = entropy(g, (rho + rho1) / 2, (sigma + sigma1) / 2)
        out["convexity"] = (Hm - (H + H1) / 2) / max(1.0, abs(H), abs(H1))
        # (d) monotonicity under a channel
        T = sample_cptp(n, n, 2, rng)
        out["monotonicity"] = (entropy(g, T(rho), T(sigma)) - H) / scale
        # (e) differentiability: analytic gradient against central differences
        Y = random_hermitian(n, rng)
        h = 1e-4
        Hs = [entropy(g, rho, sigma + s * h * Y) for s in (-2, -1, 1, 2)]
        fd = (Hs[0] - 8 * Hs[1] + 8 * Hs[2] - Hs[3]) / (12 * h)
        an = entropy_gradient(g, rho, sigma, Y)
        out["derivative"] = abs(fd - an) / max(1.0, abs(an))
        return out

    results = _run(trial, seed, trials, threads)
    keys = ["positivity", "homogeneity", "convexity", "monotonicity", "derivative"]
    worst = {k: float(max(r[k] for r in results)) for k in keys}
    passed = {k: worst[k] <= tol[k] for k in keys}
    passed["self"] = max(r["self"] for r in results) == 0.0
    return TrialReport(
        check="entropy-axioms",
        subject=g.label,
        seed=int(seed),
        trials=int(trials),
        max_violation=float(max(worst.values())),
        passed=passed,
        stats={"worst": worst, "tolerances": {k: tol[k] for k in keys}, "n": n},
    )
