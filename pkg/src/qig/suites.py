"""Seeded verification suites behind ``qig verify``.

Every suite returns a :class:`SuiteResult` of named checks; each check
compares a measured value against a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alpha import dual_torsion, nabla_alpha, nabla_alpha_dual
from .gfunctions import F_wyd, GFunction, g_from_spec
from .ggeometry import (
    Geometry,
    conjugate_ode_residual,
    conjugate_residual,
    curvature_p,
    flat_ode_residual,
    metric_curvature,
)
from .harness import _run, check_entropy_axioms, check_metric_monotonicity, random_positive
from .metrics import MonotoneMetric, metric_from_g, named_metric, tangent_basis

# base tolerances for n <= 3; relaxed tenfold per extra dimension
TOL = {
    "identity": 1e-7,
    "torsion_zero": 1e-8,
    "torsion_witness": 1e-4,
    "conjugate_zero": 1e-7,
    "conjugate_witness": 1e-5,
    "conjugate_ode_zero": 1e-9,
    "conjugate_ode_witness": 1e-3,
    "flat_ode_zero": 1e-8,
    "flat_zero": 1e-7,
    "flat_witness": 1e-4,
    "route_gap": 1e-6,
    "antisymmetry": 1e-9,
}
U_GRID = np.geomspace(1e-2, 1e2, 50)


RELAXED = {"identity", "torsion_zero", "conjugate_zero", "flat_zero", "route_gap"}


def tolerance(name, n, overrides=None):
    """Threshold ``name`` for dimension ``n``; zero-type thresholds grow tenfold per dimension above 3."""
    base = (overrides or {}).get(name, TOL[name])
    return base * 10.0 ** max(0, n - 3) if name in RELAXED else base


@dataclass
class Check:
    name: str
    value: float
    threshold: float
    kind: str  # "below" or "above"

    @property
    def passed(self) -> bool:
        v = abs(self.value)
        return bool(v < self.threshold) if self.kind == "below" else bool(v > self.threshold)

    def to_dict(self):
        return {
            "name": self.name,
            "value": float(self.value),
            "threshold": self.threshold,
            "kind": self.kind,
            "passed": self.passed,
        }


@dataclass
class SuiteResult:
    suite: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, name, value, threshold, kind="below"):
        self.checks.append(Check(name, float(value), float(threshold), kind))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        bad = [c.name for c in self.checks if not c.passed]
        state = "PASS" if not bad else "FAIL"
        return f"{self.suite}: {state} ({len(self.checks) - len(bad)}/{len(self.checks)} checks)"

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "info": self.info,
            "summary": self.summary(),
        }


def _points(n, seed, count):
    return _run(lambda rng: random_positive(n, rng, trace=1.0), seed, count)


def _hermitian_basis(rho):
    return tangent_basis(rho).elements


def _same_metric(m: MonotoneMetric, alpha) -> bool:
    x = np.geomspace(1e-2, 1e2, 41)
    ref = F_wyd(alpha)
    return bool(np.max(np.abs(m.F(x) - ref(x)) / ref(x)) < 1e-10)


# ---------------------------------------------------------------------------


def suite_torsion(alpha, m: MonotoneMetric, n=2, seed=0, trials=1, tol=None) -> SuiteResult:
    """Torsion of the dual of ``nabla^(alpha)`` with respect to ``m``."""
    res = SuiteResult("torsion", info={"alpha": alpha, "metric": m.name, "n": n, "seed": seed})
    matched = abs(alpha) <= 3 and _same_metric(m, alpha)
    res.info["expected"] = "torsion-free" if matched else "torsion"
    worst, witness = 0.0, None
    dual_gap = 0.0
    for rho in _points(n, seed, trials):
        B = _hermitian_basis(rho)
        for i in range(len(B)):
            for j in range(i + 1, len(B)):
                T = dual_torsion(alpha, m, rho, B[i], B[j])
                v = float(np.max(np.abs(T)))
                if v >= worst:
                    worst, witness = v, (i, j)
                if matched:
                    d = nabla_alpha_dual(alpha, m, rho, B[i], B[j]) - nabla_alpha(-alpha, rho, B[i], B[j])
                    dual_gap = max(dual_gap, float(np.max(np.abs(d))))
    res.info["witness_basis_pair"] = witness
    if matched:
        res.add("dual_torsion", worst, tolerance("torsion_zero", n, tol))
        res.add("dual_minus_nabla(-alpha)", dual_gap, tolerance("identity", n, tol))
    else:
        res.add("dual_torsion", worst, tolerance("torsion_witness", n, tol), "above")
    if abs(alpha) > 3:
        res.info["scope"] = "alpha outside [-3, 3]"
    return res


def suite_duality(g: GFunction, n=2, seed=0, trials=10, p=1.0, tol=None) -> SuiteResult:
    """``X lambda(Y,Z) = lambda(nabla^(p)_X Y, Z) + lambda(Y, nabla^(1-p)_X Z)`` on basis triples."""
    res = SuiteResult("duality", info={"g": g.label, "p": p, "n": n, "seed": seed, "trials": trials})
    worst = 0.0
    for rho in _points(n, seed, trials):
        geo = Geometry(g, rho, second_order=False)
        B = geo.B
        dl = geo.metric_derivative(B, B, B)
        G1 = geo.gamma(B, B, B, p)
        G2 = geo.gamma(B, B, B, 1 - p)
        r = dl - G1 - G2.transpose(0, 2, 1)
        scale = max(1.0, float(np.max(np.abs(dl))))
        worst = max(worst, float(np.max(np.abs(r))) / scale)
    res.add("duality_residual", worst, tolerance("identity", n, tol))
    return res


def suite_conjugate(g: GFunction, n=2, seed=0, tol=None) -> SuiteResult:
    """Tensor and ODE criteria for conjugate symmetry; passes when both agree."""
    res = SuiteResult("conjugate", info={"g": g.label, "n": n, "seed": seed})
    (rho,) = _points(n, seed, 1)
    tensor = abs(conjugate_residual(g, rho))
    ode = float(max(abs(conjugate_ode_residual(g, u)) for u in U_GRID))
    symmetric = ode < tolerance("conjugate_ode_zero", n, tol)
    res.info["classification"] = "conjugate-symmetric" if symmetric else "not conjugate-symmetric"
    if symmetric:
        res.add("ode_residual", ode, tolerance("conjugate_ode_zero", n, tol))
        res.add("tensor_residual", tensor, tolerance("conjugate_zero", n, tol))
    else:
        res.add("ode_residual", ode, tolerance("conjugate_ode_witness", n, tol), "above")
        res.add("tensor_residual", tensor, tolerance("conjugate_witness", n, tol), "above")
    return res


def suite_flatness(g: GFunction, n=2, seed=0, tol=None) -> SuiteResult:
    """Flat-ODE residual against the curvature of ``nabla^(g)``; passes when both agree."""
    res = SuiteResult("flatness", info={"g": g.label, "n": n, "seed": seed})
    (rho,) = _points(n, seed, 1)
    ode = float(max(abs(flat_ode_residual(g, u)) for u in U_GRID))
    R = curvature_p(g, 1.0, rho)
    flat = ode < tolerance("flat_ode_zero", n, tol)
    res.info["classification"] = "flat" if flat else "not flat (expected)"
    res.info["curvature_norm"] = R.norm
    if flat:
        res.add("ode_residual", ode, tolerance("flat_ode_zero", n, tol))
        res.add("curvature_norm", R.norm, tolerance("flat_zero", n, tol))
    else:
        res.add("ode_residual", ode, tolerance("flat_ode_zero", n, tol), "above")
        res.add("curvature_norm", R.norm, tolerance("flat_witness", n, tol), "above")
    res.add("route_gap", R.route_gap, tolerance("route_gap", n, tol))
    return res


def suite_curvature(g: GFunction | None, p=0.5, m: MonotoneMetric | None = None, n=2, seed=0, tol=None):
    """Internal consistency of curvature tensors: route agreement and symmetries."""
    (rho,) = _points(n, seed, 1)
    if g is None:
        R = metric_curvature(m, rho)
        res = SuiteResult("curvature", info={"metric": m.name, "n": n, "seed": seed, "norm": float(np.max(np.abs(R)))})
        res.add("antisymmetry", np.max(np.abs(R + R.transpose(1, 0, 2, 3))), TOL["antisymmetry"])
        res.add("pair_symmetry", np.max(np.abs(R - R.transpose(2, 3, 0, 1))), TOL["antisymmetry"])
        return res
    R = curvature_p(g, p, rho)
    Rd = curvature_p(g, 1 - p, rho)
    res = SuiteResult("curvature", info={"g": g.label, "p": p, "n": n, "seed": seed, "norm": R.norm})
    res.add("route_gap", R.route_gap, tolerance("route_gap", n, tol))
    res.add("antisymmetry", R.antisymmetry_defect(), TOL["antisymmetry"])
    Rbar = R.metric_part
    res.add("metric_pair_symmetry", np.max(np.abs(Rbar - Rbar.transpose(2, 3, 0, 1))), TOL["antisymmetry"])
    # R^p(X,Y,Z,W) = -R^(1-p)(X,Y,W,Z) holds for every dual pair
    res.add("dual_pair_relation", np.max(np.abs(R.components + Rd.components.transpose(0, 1, 3, 2))), tolerance("identity", n, tol))
    return res


def suite_monotonicity(m: MonotoneMetric, trials=1000, seed=0, n_in=3, n_out=2):
    rep = check_metric_monotonicity(m, trials, seed, n_in=n_in, n_out=n_out)
    res = SuiteResult("monotonicity", info={"metric": m.name, "report": rep.to_dict()})
    res.add("violations", rep.violations, 0.5)
    return res


def suite_entropy_axioms(g: GFunction, trials=200, seed=0, n=2):
    rep = check_entropy_axioms(g, trials, seed, n=n)
    res = SuiteResult("entropy-axioms", info={"g": g.label, "report": rep.to_dict()})
    for k, ok in rep.passed.items():
        worst = rep.stats["worst"].get(k, 0.0)
        res.checks.append(Check(k, 0.0 if ok else 1.0, 0.5, "below"))
        res.info.setdefault("worst", {})[k] = worst
    return res


SUITES = ("torsion", "duality", "conjugate", "flatness", "monotonicity", "entropy-axioms", "curvature")


def resolve_metric(metric=None, g=None):
    if metric:
        return named_metric(metric)
    if g is not None:
        return metric_from_g(g_from_spec(g) if isinstance(g, str) else g)
    return None
