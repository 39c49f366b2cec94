"""Matrix JSON: {"dim": D, "entries": [[[re, im], ...], ...]} row-major."""
import json

import numpy as np

from .errors import InputError


def to_json_obj(A) -> dict:
    A = np.asarray(A, dtype=complex)
    return {
        "dim": int(A.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def from_json_obj(obj) -> np.ndarray:
    try:
        D = int(obj["dim"])
        rows = obj["entries"]
        A = np.array([[complex(e[0], e[1]) for e in row] for row in rows], dtype=complex)
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise InputError(f"malformed matrix JSON: {exc}") from exc
    if A.shape != (D, D):
        raise InputError(f"matrix JSON declares dim {D} but entries have shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix JSON contains non-finite entries")
    return A


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return from_json_obj(json.load(fh))


def load_matrix_list(path) -> list:
    """A single matrix, a JSON list of matrices, or {"generators": [...]}."""
    with open(path) as fh:
        obj = json.load(fh)
    if isinstance(obj, dict) and "generators" in obj:
        obj = obj["generators"]
    if isinstance(obj, dict):
        return [from_json_obj(obj)]
    if not isinstance(obj, list):
        raise InputError("expected a matrix or a list of matrices")
    return [from_json_obj(o) for o in obj]


def dump_matrix(A, path):
    with open(path, "w") as fh:
        json.dump(to_json_obj(A), fh)
