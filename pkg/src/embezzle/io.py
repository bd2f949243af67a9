"""JSON serialisation of density matrices.

Two layouts are accepted::

    {"shape": [2, 2], "entries": [[re, im], ...]}   # row-major, D*D pairs
    {"shape": [2], "diag": [p0, p1]}                # diagonal states

Numbers are written with 17 significant digits so that a round trip is
exact for float64.
"""
import json
from math import prod

import numpy as np

from .states import DensityMatrix

__all__ = ["state_to_json", "state_from_json", "write_state", "read_state", "StateFormatError"]


class StateFormatError(ValueError):
    pass


def _num(x):
    return format(float(x), ".17g")


def _is_diagonal(m):
    if np.count_nonzero(m - np.diag(np.diag(m))):
        return False
    return not (np.iscomplexobj(m) and np.any(m.imag))


def state_to_json(state, diag=None):
    """Serialise ``state``; ``diag=None`` picks the diagonal layout when it is exact."""
    m = state.entries
    if diag is None:
        diag = _is_diagonal(m)
    shape = "[" + ", ".join(str(s) for s in state.shape) + "]"
    if diag:
        values = np.diag(m)
        if np.iscomplexobj(values) and np.any(values.imag):
            raise StateFormatError("diagonal layout needs a real diagonal")
        body = ", ".join(_num(v) for v in values.real)
        return '{"shape": ' + shape + ', "diag": [' + body + "]}"
    flat = np.asarray(m, dtype=complex).ravel()
    body = ", ".join(f"[{_num(z.real)}, {_num(z.imag)}]" for z in flat)
    return '{"shape": ' + shape + ', "entries": [' + body + "]}"


def state_from_json(text):
    try:
        obj = json.loads(text) if isinstance(text, str) else text
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "shape" not in obj:
        raise StateFormatError('state JSON needs a "shape" field')
    shape = tuple(int(s) for s in obj["shape"])
    dim = prod(shape)
    if ("entries" in obj) == ("diag" in obj):
        raise StateFormatError('give exactly one of "entries" or "diag"')
    if "diag" in obj:
        probs = np.asarray(obj["diag"], dtype=float)
        if probs.shape != (dim,):
            raise StateFormatError(f"diag has {probs.size} values, shape needs {dim}")
        return DensityMatrix.from_diag(probs, shape)
    pairs = np.asarray(obj["entries"], dtype=float)
    if pairs.shape != (dim * dim, 2):
        raise StateFormatError(f"entries must be {dim * dim} [re, im] pairs")
    m = (pairs[:, 0] + 1j * pairs[:, 1]).reshape(dim, dim)
    if not np.any(m.imag):
        m = m.real
    return DensityMatrix(m, shape)


def write_state(path, state, diag=None):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(state_to_json(state, diag=diag))
        fh.write("\n")


def read_state(path):
    with open(path, encoding="utf-8") as fh:
        return state_from_json(fh.read())
