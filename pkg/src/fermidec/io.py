"""CSV and JSON serialization.

Numbers are written with 17 significant digits (``%.17g``) so values
round-trip exactly. A run manifest, when given, is written as ``#`` comment
lines at the top of CSV files and under a ``"manifest"`` key in JSON files.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import StructuralError
from .lindblad_channel import CONVENTIONS, GaussianChannel

FLOAT_FMT = "%.17g"
MATRIX_KINDS = ("covariance", "hamiltonian")


def fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return FLOAT_FMT % float(v)


def manifest_lines(manifest: Optional[Mapping]) -> list:
    if not manifest:
        return []
    return [f"# {k}: {json.dumps(manifest[k], sort_keys=True)}" for k in sorted(manifest)]


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence], manifest: Optional[Mapping] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = manifest_lines(manifest)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_csv(path) -> tuple:
    """``(columns, data)``; comment lines are skipped."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln and not ln.startswith("#")]
    cols = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]]).reshape(-1, len(cols))
    return cols, data


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path, payload: Mapping, manifest: Optional[Mapping] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    obj = dict(payload)
    if manifest:
        obj["manifest"] = dict(manifest)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# matrices

def write_matrix_csv(path, m) -> Path:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(",".join(fmt(v) for v in row) for row in m) + "\n", encoding="utf-8")
    return path


def read_matrix_csv(path) -> np.ndarray:
    rows = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip() and not ln.startswith("#")]
    m = np.array([[float(x) for x in ln.split(",")] for ln in rows])
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StructuralError(f"matrix CSV {path} is not square")
    return m


def matrix_to_json(m, kind: str) -> dict:
    if kind not in MATRIX_KINDS:
        raise StructuralError(f"kind must be one of {MATRIX_KINDS}")
    m = np.asarray(m, dtype=float)
    return {"dim": int(m.shape[0]), "data": [float(v) for v in m.ravel()], "kind": kind}


def _unflatten(data, dim: int) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        if arr.size != dim * dim:
            raise StructuralError(f"flat data has {arr.size} entries, expected {dim * dim}")
        arr = arr.reshape(dim, dim)
    if arr.shape != (dim, dim):
        raise StructuralError(f"data shape {arr.shape} does not match dim {dim}")
    return arr


def matrix_from_json(obj: Mapping, kind: Optional[str] = None) -> np.ndarray:
    """Accepts flat row-major or nested ``data``."""
    if kind is not None and obj.get("kind") != kind:
        raise StructuralError(f"expected kind {kind!r}, got {obj.get('kind')!r}")
    return _unflatten(obj["data"], int(obj["dim"]))


# channels

def channel_to_json(ch: GaussianChannel) -> dict:
    return {
        "dim": ch.dim,
        "X": [float(v) for v in ch.x.ravel()],
        "Y": [float(v) for v in ch.y.ravel()],
        "convention": ch.convention,
    }


def channel_from_json(obj: Mapping, validate: bool = True) -> GaussianChannel:
    conv = obj.get("convention", "calibrated")
    if conv not in CONVENTIONS:
        raise StructuralError(f"unknown convention {conv!r}")
    dim = int(obj["dim"])
    return GaussianChannel(_unflatten(obj["X"], dim), _unflatten(obj["Y"], dim), conv, validate=validate)


# result tables

def write_delta_trace(path, trace, manifest=None) -> Path:
    rows = zip(trace.times, trace.delta_norms, trace.d_norms, trace.bound)
    return write_csv(path, ("t", "norm_delta", "norm_D", "bound_2D2"), rows, manifest)


def write_bound_curves(path, curves, manifest=None) -> Path:
    rows = zip(curves.times, curves.delta_norms, curves.bound)
    return write_csv(path, ("t", "delta_norm", "bound"), rows, manifest)


def write_markov_trajectory(path, traj, manifest=None) -> Path:
    rows = ((int(s), v[0], v[1], d) for s, v, d in zip(traj.steps, traj.v, traj.dist))
    return write_csv(path, ("step", "v1", "v2", "dist_to_pi"), rows, manifest)
