"""JSON state and density files.

State file::

    {"dims": [N1, ..., Nm],
     "amplitudes": [{"index": [l1, ..., lm], "re": x, "im": y}, ...]}

Density file: the same ``dims`` header plus
``"entries": [{"row": [...], "col": [...], "re": x, "im": y}, ...]``.
Missing entries are zero and the matrix is completed Hermitian, so one
triangle is enough.
"""
from __future__ import annotations

import json
import os
import tempfile
from math import prod
from pathlib import Path

import numpy as np

from .errors import StateFormatError
from .state import DensityMatrix, PureState

CONFLICT_TOL = 1e-12


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _dims(doc, source) -> tuple[int, ...]:
    if not isinstance(doc, dict) or "dims" not in doc:
        raise StateFormatError(f"{source}: missing 'dims'")
    dims = doc["dims"]
    if not isinstance(dims, list) or not dims or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise StateFormatError(f"{source}: 'dims' must be a non-empty list of integers")
    if any(d < 2 for d in dims):
        raise StateFormatError(f"{source}: every subsystem dimension must be >= 2")
    return tuple(dims)


def _index(raw, dims, source, what) -> tuple[int, ...]:
    if not isinstance(raw, list) or len(raw) != len(dims):
        raise StateFormatError(f"{source}: {what} must list {len(dims)} indices, got {raw!r}")
    for i, d in zip(raw, dims):
        if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < d:
            raise StateFormatError(f"{source}: {what} {raw!r} out of range for dims {list(dims)}")
    return tuple(raw)


def _complex(item, source) -> complex:
    try:
        re = float(item.get("re", 0.0))
        im = float(item.get("im", 0.0))
    except (TypeError, ValueError):
        raise StateFormatError(f"{source}: 're'/'im' must be numbers in {item!r}") from None
    return complex(re, im)


def parse_state(text: str, source: str = "<string>") -> PureState:
    doc = _load_json(text, source)
    dims = _dims(doc, source)
    amps = doc.get("amplitudes")
    if not isinstance(amps, list):
        raise StateFormatError(f"{source}: 'amplitudes' must be a list")
    coeffs = np.zeros(prod(dims), dtype=np.complex128)
    seen = set()
    for item in amps:
        if not isinstance(item, dict):
            raise StateFormatError(f"{source}: amplitude entries must be objects")
        idx = _index(item.get("index"), dims, source, "index")
        if idx in seen:
            raise StateFormatError(f"{source}: duplicate amplitude index {list(idx)}")
        seen.add(idx)
        coeffs[np.ravel_multi_index(idx, dims)] = _complex(item, source)
    return PureState(dims, coeffs)


def parse_density(text: str, source: str = "<string>") -> DensityMatrix:
    doc = _load_json(text, source)
    dims = _dims(doc, source)
    entries = doc.get("entries")
    if not isinstance(entries, list):
        raise StateFormatError(f"{source}: 'entries' must be a list")
    n = prod(dims)
    mat = np.zeros((n, n), dtype=np.complex128)
    given = {}
    for item in entries:
        if not isinstance(item, dict):
            raise StateFormatError(f"{source}: density entries must be objects")
        r = int(np.ravel_multi_index(_index(item.get("row"), dims, source, "row"), dims))
        c = int(np.ravel_multi_index(_index(item.get("col"), dims, source, "col"), dims))
        if (r, c) in given:
            raise StateFormatError(f"{source}: duplicate density entry {item.get('row')},{item.get('col')}")
        given[(r, c)] = _complex(item, source)
    for (r, c), v in given.items():
        if r == c and abs(v.imag) > CONFLICT_TOL:
            raise StateFormatError(f"{source}: diagonal entry {r} has nonzero imaginary part")
        mirror = given.get((c, r))
        if mirror is not None and abs(mirror - np.conj(v)) > CONFLICT_TOL:
            raise StateFormatError(f"{source}: entries ({r},{c}) and ({c},{r}) are not Hermitian conjugates")
        mat[r, c] = v
        mat[c, r] = np.conj(v)
    return DensityMatrix(dims, mat)


def read_state(path) -> PureState:
    path = Path(path)
    return parse_state(path.read_text(), str(path))


def read_density(path) -> DensityMatrix:
    path = Path(path)
    return parse_density(path.read_text(), str(path))


def state_to_dict(state: PureState, tol: float = 0.0) -> dict:
    """State-file object listing amplitudes with modulus above ``tol``."""
    amps = []
    for flat in np.flatnonzero(np.abs(state.coeffs) > tol):
        a = state.coeffs[flat]
        idx = np.unravel_index(flat, state.dims)
        amps.append({"index": [int(i) for i in idx], "re": float(a.real), "im": float(a.imag)})
    return {"dims": list(state.dims), "amplitudes": amps}


def density_to_dict(rho: DensityMatrix, tol: float = 0.0) -> dict:
    """Density-file object holding the upper triangle."""
    entries = []
    n = rho.matrix.shape[0]
    for r in range(n):
        for c in range(r, n):
            v = rho.matrix[r, c]
            if abs(v) > tol:
                entries.append({
                    "row": [int(i) for i in np.unravel_index(r, rho.dims)],
                    "col": [int(i) for i in np.unravel_index(c, rho.dims)],
                    "re": float(v.real),
                    "im": float(v.imag),
                })
    return {"dims": list(rho.dims), "entries": entries}


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

