"""JSON encodings for complex matrices and report hashing."""

from __future__ import annotations

import hashlib
import json

import numpy as np


def encode_matrix(A):
    """Row-major nested lists of ``[re, im]`` pairs."""
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def decode_matrix(data):
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(complex)
    raise ValueError("matrix must be a 2-D list of numbers or [re, im] pairs")


def config_hash(cfg: dict) -> str:
    """Stable hash of a configuration; the ``timestamp`` key is ignored."""
    clean = {k: v for k, v in cfg.items() if k != "timestamp"}
    blob = json.dumps(clean, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o).__name__}")
