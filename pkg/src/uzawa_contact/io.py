"""Instance, solution and history file formats.

Instance JSON::

    {"d": int, "m": int,
     "K": [d*d reals, row-major], "p": [d], "N": [m*d reals, row-major],
     "h": [m], "meta": {...}}

History CSV header: ``k,dual_obj,primal_obj,residual_total,step_norm,restarted``.

Floats are written with ``repr`` so every value round-trips exactly.
"""

import csv
import json
import math

import numpy as np

from .diagnostics import HISTORY_FIELDS, kkt_residual
from .errors import ContactError, ParseError
from .problem import ContactQP

__all__ = [
    "qp_to_dict",
    "qp_from_dict",
    "save_instance",
    "load_instance",
    "solution_to_dict",
    "write_json",
    "write_history_csv",
    "read_history_csv",
]


def qp_to_dict(qp):
    return {
        "d": qp.dim,
        "m": qp.ncon,
        "K": qp.stiffness.ravel().tolist(),
        "p": qp.load.tolist(),
        "N": qp.constraint_matrix.ravel().tolist(),
        "h": qp.gap_offset.tolist(),
        "meta": qp.meta,
    }


def _field(doc, name):
    if name not in doc:
        raise ParseError(f"missing field '{name}'")
    return doc[name]


def _int_field(doc, name):
    value = _field(doc, name)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ParseError(f"field '{name}' must be a positive integer, got {value!r}")
    return value


def _vector_field(doc, name, length):
    value = _field(doc, name)
    if not isinstance(value, list):
        raise ParseError(f"field '{name}' must be a list of numbers")
    if len(value) != length:
        raise ParseError(f"field '{name}' has {len(value)} entries, expected {length}")
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise ParseError(f"field '{name}' entry {i} is not a finite number: {x!r}")
    return np.array(value, dtype=float)


def qp_from_dict(doc):
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    d = _int_field(doc, "d")
    m = _int_field(doc, "m")
    K = _vector_field(doc, "K", d * d).reshape(d, d)
    p = _vector_field(doc, "p", d)
    N = _vector_field(doc, "N", m * d).reshape(m, d)
    h = _vector_field(doc, "h", m)
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("field 'meta' must be an object")
    try:
        return ContactQP(K, p, N, h, meta=meta)
    except (ContactError, ValueError) as exc:
        raise ParseError(f"field 'K': {exc}") from exc


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, allow_nan=False)
        fh.write("\n")


def save_instance(qp, path):
    write_json(path, qp_to_dict(qp))


def load_instance(path):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return qp_from_dict(doc)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def solution_to_dict(qp, result):
    res = kkt_residual(qp, result.u, result.r)
    return {
        "method": result.method.value,
        "status": result.status.value,
        "iterations": result.iterations,
        "alpha": result.alpha,
        "u": result.u.tolist(),
        "r": result.r.tolist(),
        "kkt": res.norms(),
    }


def write_history_csv(path, history):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HISTORY_FIELDS)
        for rec in history:
            k, dual, primal, total, step, restarted = rec.as_row()
            writer.writerow([k, repr(dual), repr(primal), repr(total), repr(step), restarted])


def read_history_csv(path):
    """Parse a history CSV into a dict of numpy columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != HISTORY_FIELDS:
            raise ParseError(f"{path}: unexpected header {header}")
        rows = [row for row in reader]
    cols = list(zip(*rows)) if rows else [()] * len(HISTORY_FIELDS)
    out = {}
    for name, col in zip(HISTORY_FIELDS, cols):
        if name in ("k", "restarted"):
            out[name] = np.array([int(v) for v in col], dtype=int)
        else:
            out[name] = np.array([float(v) for v in col])
    return out
