"""``qig`` command line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .alpha import dual_torsion, nabla_alpha, nabla_alpha_dual
from .gfunctions import g_from_spec
from .ggeometry import (
    conjugate_ode_residual,
    connection_coefficients,
    curvature_p,
    entropy,
    entropy_direct,
    flat_ode_residual,
    metric_connection,
    metric_curvature,
    nabla_g,
    skewness,
)
from .harness import random_hermitian, random_positive
from .metrics import gram_matrix, metric_eval, named_metric
from .serialize import config_hash, decode_matrix, dumps, encode_matrix
from .spectral import as_point
from . import suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
CONFIG_KEYS = ("n", "seed", "metric", "g", "alpha", "p", "trials", "tol", "out", "format", "input")
DEFAULTS = {"n": 2, "seed": 0, "p": 1.0, "format": "json"}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration


def _parse_tol(values):
    """``--tol 1e-8`` sets the primary identity tolerance; ``--tol name=value`` any named one."""
    out = {}
    for item in values or []:
        if isinstance(item, (int, float)):
            out["identity"] = float(item)
            continue
        name, sep, val = str(item).partition("=")
        try:
            if not sep:
                out["identity"] = float(name)
            else:
                if name not in suites.TOL:
                    raise UsageError(f"unknown tolerance {name!r}; known: {', '.join(sorted(suites.TOL))}")
                out[name] = float(val)
        except ValueError:
            raise UsageError(f"bad tolerance {item!r}") from None
    return out


def build_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        extra = set(data) - set(CONFIG_KEYS) - {"command", "suite"}
        if extra:
            raise UsageError(f"unknown config keys: {sorted(extra)}")
        cfg.update({k: v for k, v in data.items() if k in CONFIG_KEYS})
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    tol = cfg.get("tol")
    if isinstance(tol, dict):
        tol = [f"{k}={v}" for k, v in tol.items()]
    elif tol is not None and not isinstance(tol, list):
        tol = [tol]
    cfg["tol"] = _parse_tol(tol)
    n = cfg["n"]
    if not isinstance(n, int) or n < 2:
        raise UsageError("--n must be an integer >= 2")
    if cfg["format"] not in ("json", "csv"):
        raise UsageError("--format must be json or csv")
    if not 0.0 <= float(cfg["p"]) <= 1.0:
        raise UsageError("--p must lie in [0, 1]")
    if cfg.get("trials") is not None and int(cfg["trials"]) < 1:
        raise UsageError("--trials must be positive")
    if cfg.get("metric"):
        try:
            named_metric(cfg["metric"])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if cfg.get("g"):
        try:
            g_from_spec(cfg["g"])
        except (ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from None
    return cfg


def _inputs(cfg):
    """``rho, sigma, X, Y, Z`` from ``--input`` (JSON) or the seed."""
    n = cfg["n"]
    rng = np.random.default_rng(cfg["seed"])
    data = {
        "rho": random_positive(n, rng, trace=1.0),
        "sigma": random_positive(n, rng, trace=1.0),
        "X": random_hermitian(n, rng),
        "Y": random_hermitian(n, rng),
        "Z": random_hermitian(n, rng),
    }
    if cfg.get("input"):
        try:
            with open(cfg["input"]) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read input: {exc}") from None
        extra = set(raw) - set(data)
        if extra:
            raise UsageError(f"unknown input keys: {sorted(extra)}")
        for k, v in raw.items():
            M = decode_matrix(v)
            if M.shape != (n, n):
                raise UsageError(f"input {k} has shape {M.shape}, expected ({n}, {n})")
            data[k] = M
    return data


def _metric(cfg, required=True):
    if cfg.get("metric"):
        return named_metric(cfg["metric"])
    if cfg.get("g"):
        return suites.resolve_metric(g=cfg["g"])
    if required:
        raise UsageError("this command needs --metric or --g")
    return None


def _g(cfg, required=True):
    if cfg.get("g"):
        return g_from_spec(cfg["g"])
    if required:
        raise UsageError("this command needs --g")
    return None


# ---------------------------------------------------------------------------
# commands


def cmd_metric(cfg):
    m = _metric(cfg)
    d = _inputs(cfg)
    rho = as_point(d["rho"])
    out = {
        "metric": m.name,
        "kernel": f"cbar[{m.h.label}]",
        "value": metric_eval(m, rho, d["X"], d["Y"]),
        "eigenvalues": rho.eigenvalues.tolist(),
    }
    if cfg["n"] <= 4:
        out["gram"] = gram_matrix(m, rho).tolist()
    return out, True


def cmd_entropy(cfg):
    g = _g(cfg)
    d = _inputs(cfg)
    h1 = entropy(g, d["rho"], d["sigma"])
    h2 = entropy_direct(g, d["rho"], d["sigma"])
    return {"g": g.label, "value": h1, "direct_formula": h2, "difference": abs(h1 - h2)}, True


def cmd_connection(cfg):
    d = _inputs(cfg)
    rho, X, Y = d["rho"], d["X"], d["Y"]
    out = {}
    if cfg.get("alpha") is not None:
        a = float(cfg["alpha"])
        out["connection"] = f"alpha={a:g}"
        out["nabla"] = encode_matrix(nabla_alpha(a, rho, X, Y))
        if cfg.get("metric"):
            m = named_metric(cfg["metric"])
            out["metric"] = m.name
            out["dual"] = encode_matrix(nabla_alpha_dual(a, m, rho, X, Y))
            out["dual_torsion_norm"] = float(np.max(np.abs(dual_torsion(a, m, rho, X, Y))))
    elif cfg.get("g"):
        g = _g(cfg)
        p = float(cfg["p"])
        out["connection"] = f"p={p:g}:{g.label}"
        out["nabla"] = encode_matrix(nabla_g(g, rho, X, Y, p=p))
        out["torsion_defect"] = connection_coefficients(g, rho, p).torsion_defect()
    elif cfg.get("metric"):
        m = named_metric(cfg["metric"])
        out["connection"] = f"metric:{m.name}"
        out["nabla"] = encode_matrix(metric_connection(m, rho, X, Y))
    else:
        raise UsageError("connection needs --alpha, --g or --metric")
    return out, True


def _curvature(cfg):
    d = _inputs(cfg)
    if cfg.get("g"):
        g = _g(cfg)
        R = curvature_p(g, float(cfg["p"]), d["rho"])
        return R.components, {"tag": R.tag, "p": R.p, "route_gap": R.route_gap, "norm": R.norm}
    m = _metric(cfg)
    R = metric_curvature(m, d["rho"])
    return R, {"tag": f"metric:{m.name}", "norm": float(np.max(np.abs(R)))}


def cmd_curvature(cfg):
    R, info = _curvature(cfg)
    info["antisymmetry_defect"] = float(np.max(np.abs(R + R.transpose(1, 0, 2, 3))))
    info["components"] = R.tolist()
    return info, True


def cmd_verify(cfg, suite):
    n, seed, tol = cfg["n"], cfg["seed"], cfg["tol"]
    trials = cfg.get("trials")
    if suite == "torsion":
        if cfg.get("alpha") is None:
            raise UsageError("torsion needs --alpha")
        a = float(cfg["alpha"])
        m = named_metric(cfg["metric"]) if cfg.get("metric") else named_metric(f"wyd:{a}")
        res = suites.suite_torsion(a, m, n=n, seed=seed, trials=trials or 1, tol=tol)
    elif suite == "duality":
        res = suites.suite_duality(_g(cfg), n=n, seed=seed, trials=trials or 10, p=float(cfg["p"]), tol=tol)
    elif suite == "conjugate":
        res = suites.suite_conjugate(_g(cfg), n=n, seed=seed, tol=tol)
    elif suite == "flatness":
        res = suites.suite_flatness(_g(cfg), n=n, seed=seed, tol=tol)
    elif suite == "curvature":
        g = _g(cfg, required=False)
        m = None if g is not None else _metric(cfg)
        res = suites.suite_curvature(g, p=float(cfg["p"]), m=m, n=n, seed=seed, tol=tol)
    elif suite == "monotonicity":
        res = suites.suite_monotonicity(_metric(cfg), trials=trials or 1000, seed=seed, n_in=max(n, 2) + 1, n_out=n)
    elif suite == "entropy-axioms":
        res = suites.suite_entropy_axioms(_g(cfg), trials=trials or 200, seed=seed, n=n)
    else:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(suites.SUITES)}")
    return res.to_dict(), res.passed


def _tensor_csv(arr, header: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    names = "ijkl"[: arr.ndim]
    w.writerow(list(names) + ["value"])
    for idx in np.ndindex(*arr.shape):
        w.writerow(list(idx) + [repr(float(arr[idx]))])
    return buf.getvalue()


def _grid_csv(rows, header: dict) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u", "residual"])
    for u, r in rows:
        w.writerow([repr(float(u)), repr(float(r))])
    return buf.getvalue()


def cmd_report(cfg):
    out_dir = cfg.get("out")
    if not out_dir:
        raise UsageError("report needs --out DIR")
    os.makedirs(out_dir, exist_ok=True)
    g = _g(cfg)
    d = _inputs(cfg)
    header = {k: cfg[k] for k in sorted(cfg) if k not in ("out",)}
    header["config_hash"] = config_hash(cfg)
    files = {}
    R = curvature_p(g, float(cfg["p"]), d["rho"])
    files["curvature.csv"] = _tensor_csv(R.components, dict(header, tensor="curvature", route_gap=R.route_gap))
    S = skewness(g, d["rho"])
    files["skewness.csv"] = _tensor_csv(S.components, dict(header, tensor="skewness"))
    grid = suites.U_GRID
    files["flat_ode.csv"] = _grid_csv([(u, flat_ode_residual(g, u)) for u in grid], dict(header, grid="flat-ode"))
    files["conjugate_ode.csv"] = _grid_csv(
        [(u, conjugate_ode_residual(g, u)) for u in grid], dict(header, grid="conjugate-ode")
    )
    for name, text in files.items():
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(text)
    summary = {
        "files": sorted(files),
        "curvature_norm": R.norm,
        "route_gap": R.route_gap,
        "skewness_norm": float(np.max(np.abs(S.components))),
        "flat_ode_max": float(max(abs(flat_ode_residual(g, u)) for u in grid)),
        "conjugate_ode_max": float(max(abs(conjugate_ode_residual(g, u)) for u in grid)),
    }
    return summary, True


# ---------------------------------------------------------------------------
# driver


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="matrix dimension (default 2)")
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--metric", help="bures | rld | bkm | wy | wyd:<alpha>")
    common.add_argument("--g", help="generator: alpha:<a>, extreme:<s>, mixture:<p>:<base> or JSON")
    common.add_argument("--alpha", type=float, help="alpha parameter")
    common.add_argument("--p", type=float, help="p-connection parameter in [0, 1] (default 1)")
    common.add_argument("--trials", type=int, help="number of random trials")
    common.add_argument("--tol", action="append", help="tolerance override: VALUE or NAME=VALUE")
    common.add_argument("--out", help="output file (directory for 'report')")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    common.add_argument("--input", help="JSON file with matrices rho, sigma, X, Y, Z")
    common.add_argument("--config", help="JSON file with run configuration")

    parser = argparse.ArgumentParser(prog="qig", description="Information geometry of positive matrices.")
    parser.add_argument("--version", action="version", version=f"qig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("metric", parents=[common], help="evaluate a monotone metric")
    sub.add_parser("entropy", parents=[common], help="evaluate a relative g-entropy")
    sub.add_parser("connection", parents=[common], help="evaluate a covariant derivative")
    sub.add_parser("curvature", parents=[common], help="curvature tensor components")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", help=" | ".join(suites.SUITES))
    sub.add_parser("report", parents=[common], help="write tensor dumps and ODE residual grids")
    return parser


def _emit(text, cfg):
    path = cfg.get("out")
    if path and cfg.get("command") != "report":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finite(obj):
    if isinstance(obj, float):
        return np.isfinite(obj)
    if isinstance(obj, dict):
        return all(_finite(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return all(_finite(v) for v in obj)
    return True


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = build_config(args)
        cfg["command"] = args.command
        if args.command == "verify":
            cfg["suite"] = args.suite
        if args.command == "curvature" and cfg["format"] == "csv":
            R, info = _curvature(cfg)
            header = {k: v for k, v in cfg.items() if k != "out"}
            header.update(info, config_hash=config_hash(cfg))
            _emit(_tensor_csv(R, header), cfg)
            return EXIT_OK
        handlers = {
            "metric": cmd_metric,
            "entropy": cmd_entropy,
            "connection": cmd_connection,
            "curvature": cmd_curvature,
            "report": cmd_report,
        }
        if args.command == "verify":
            result, ok = cmd_verify(cfg, args.suite)
        else:
            result, ok = handlers[args.command](cfg)
    except UsageError as exc:
        print(f"qig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"qig: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"qig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not _finite(result):
        print("qig: numeric failure: non-finite result", file=sys.stderr)
        return EXIT_NUMERIC
    report = {
        "command": args.command,
        "config": {k: v for k, v in sorted(cfg.items())},
        "config_hash": config_hash(cfg),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "result": result,
        "status": "pass" if ok else "fail",
    }
    _emit(dumps(report) + "\n", cfg)
    if args.command == "verify":
        print(result["summary"], file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
