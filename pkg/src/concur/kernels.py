"""Class-contribution kernels.

Both kernels compute, for one active set, the sum over blocks and term pairs
of ``|P_u - P_v|**2`` where ``P_u = a[u] * a[complement(u)]``. Blocks are
addressed through per-subsystem offset tables: subsystem ``j`` at coordinate
``c`` contributes ``off0[j, c]`` to a vertex with bit 0 and ``off1[j, c]``
with bit 1 (inactive subsystems have ``off0 == off1``).
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from ._accel import HAS_NUMBA, njit
from .operators import term_set


@lru_cache(maxsize=256)
def block_tables(dims, active):
    """Offset tables for the block lattice of ``active`` (1-based labels).

    Returns ``(off0, off1, counts, active_pos)`` as read-only int64 arrays.
    ``dims`` and ``active`` must be tuples (the result is cached).
    """
    m = len(dims)
    strides = np.ones(m, dtype=np.int64)
    for j in range(m - 2, -1, -1):
        strides[j] = strides[j + 1] * dims[j + 1]
    act0 = sorted(a - 1 for a in active)
    coords = []
    for j, d in enumerate(dims):
        if j in act0:
            coords.append(list(itertools.combinations(range(d), 2)))
        else:
            coords.append([(t, t) for t in range(d)])
    width = max(len(c) for c in coords)
    off0 = np.zeros((m, width), dtype=np.int64)
    off1 = np.zeros((m, width), dtype=np.int64)
    counts = np.zeros(m, dtype=np.int64)
    for j, cs in enumerate(coords):
        counts[j] = len(cs)
        for c, (k, l) in enumerate(cs):
            off0[j, c] = k * strides[j]
            off1[j, c] = l * strides[j]
    tables = (off0, off1, counts, np.array(act0, dtype=np.int64))
    for a in tables:
        a.setflags(write=False)
    return tables


@lru_cache(maxsize=None)
def _terms(s):
    arr = term_set(s).as_array()
    arr.setflags(write=False)
    return arr


@njit(cache=True, nogil=True)
def _contribution_loops(coeffs, off0, off1, counts, active_pos, terms):
    m = counts.size
    s = active_pos.size
    ncls = 1 << (s - 1)
    is_active = np.zeros(m, dtype=np.bool_)
    for b in range(s):
        is_active[active_pos[b]] = True
    ctr = np.zeros(m, dtype=np.int64)
    prods = np.empty(ncls, dtype=np.complex128)
    total = 0.0
    while True:
        base = 0
        for j in range(m):
            if not is_active[j]:
                base += off0[j, ctr[j]]
        nonzero = False
        for c in range(ncls):
            iu = base
            iv = base
            for b in range(s):
                j = active_pos[b]
                if (c >> (s - 1 - b)) & 1:
                    iu += off1[j, ctr[j]]
                    iv += off0[j, ctr[j]]
                else:
                    iu += off0[j, ctr[j]]
                    iv += off1[j, ctr[j]]
            p = coeffs[iu] * coeffs[iv]
            prods[c] = p
            if p != 0:
                nonzero = True
        # blocks with all products zero add nothing
        if nonzero:
            for t in range(terms.shape[0]):
                d = prods[terms[t, 0]] - prods[terms[t, 1]]
                total += d.real * d.real + d.imag * d.imag
        j = m - 1
        while j >= 0:
            ctr[j] += 1
            if ctr[j] < counts[j]:
                break
            ctr[j] = 0
            j -= 1
        if j < 0:
            break
    return total


def _vertex_index_grid(off0, off1, counts, active_pos, c):
    """Flat amplitude indices of canonical vertex ``c`` over the whole block lattice."""
    m = counts.size
    s = active_pos.size
    bit_of = {int(j): (c >> (s - 1 - b)) & 1 for b, j in enumerate(active_pos)}
    iu = np.zeros(tuple(counts), dtype=np.int64)
    iv = np.zeros(tuple(counts), dtype=np.int64)
    for j in range(m):
        shape = [1] * m
        shape[j] = counts[j]
        a0 = off0[j, : counts[j]].reshape(shape)
        a1 = off1[j, : counts[j]].reshape(shape)
        if j in bit_of and bit_of[j]:
            iu = iu + a1
            iv = iv + a0
        else:
            iu = iu + a0
            iv = iv + a1
    return iu.reshape(-1), iv.reshape(-1)


def _contribution_numpy(coeffs, off0, off1, counts, active_pos, terms):
    s = active_pos.size
    prods = []
    for c in range(1 << (s - 1)):
        iu, iv = _vertex_index_grid(off0, off1, counts, active_pos, c)
        prods.append(coeffs[iu] * coeffs[iv])
    total = 0.0
    for a, b in terms:
        d = prods[a] - prods[b]
        total += float(np.sum(d.real * d.real + d.imag * d.imag))
    return total


BACKENDS = ("numba", "numpy")
DEFAULT_BACKEND = "numba" if HAS_NUMBA else "numpy"


def contribution(coeffs, dims, active, backend=None) -> float:
    """Sum of squared antipodal-product differences for one active set."""
    backend = backend or DEFAULT_BACKEND
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is unavailable or disabled")
    off0, off1, counts, active_pos = block_tables(tuple(dims), tuple(active))
    terms = _terms(len(active_pos))
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if backend == "numba":
        return float(_contribution_loops(coeffs, off0, off1, counts, active_pos, terms))
    return _contribution_numpy(coeffs, off0, off1, counts, active_pos, terms)


def warmup() -> None:
    """Trigger JIT compilation (or load the on-disk cache) ahead of timed work."""
    if HAS_NUMBA:
        # PureState amplitudes are read-only, which numba types separately
        for writeable in (False, True):
            a = np.zeros(8, dtype=np.complex128)
            a.setflags(write=writeable)
            contribution(a, (2, 2, 2), (1, 2), backend="numba")
