"""Brute-force operator-expectation evaluator.

Independent of the closed-form kernels: operator entries come from the
Kronecker product of the single-subsystem phase-complement matrices, and the
term pairs are rediscovered per block from those entries.
"""
from __future__ import annotations

import itertools

import numpy as np

from .errors import DimensionError, SizeGuardError
from .operators import (
    BlockIndex,
    ClassOperator,
    antipode,
    dense_operator,
    iter_blocks,
    local_factors,
)
from .state import PureState

ORACLE_MAX_DIM = 4096


def expectation(state: PureState, op: np.ndarray) -> complex:
    """``<Phi| O C Phi> = sum_{u,v} conj(a_u) O_uv conj(a_v)``, accumulated row-major."""
    op = np.asarray(op)
    n = state.size
    if op.shape != (n, n):
        raise DimensionError(f"operator shape {op.shape} does not match state size {n}")
    a = state.coeffs.conj()
    total = 0j
    for u in range(n):
        if a[u] == 0:
            continue
        total += a[u] * complex(np.dot(op[u], a))
    return total


def expectation_entries(state: PureState, entries) -> complex:
    """Same bilinear form for a sparse operator given as ``(row, col, value)`` triples."""
    a = state.coeffs
    total = 0j
    for r, c, v in entries:
        total += np.conj(a[r]) * v * np.conj(a[c])
    return total


def _entry(factors, row, col) -> complex:
    out = 1 + 0j
    for f, r, c in zip(factors, row, col):
        out *= f[r, c]
        if out == 0:
            break
    return out


def block_pairs(op: ClassOperator, block: BlockIndex, dims):
    """Upper anti-diagonal entries of ``op`` on ``block`` as ``{u: (row, col, value)}``.

    ``u`` ranges over vertices with a zero leading bit; the row is vertex ``u``
    and the column its complement.
    """
    factors = local_factors(op, block, dims)
    s = op.order
    out = {}
    for u in range(1 << (s - 1)):
        row = block.vertex_index(u, op.active)
        col = block.vertex_index(antipode(u, s), op.active)
        flat_r = int(np.ravel_multi_index(row, dims))
        flat_c = int(np.ravel_multi_index(col, dims))
        out[u] = (flat_r, flat_c, _entry(factors, row, col))
    return out


def discovered_pairs(ops, block: BlockIndex, dims):
    """Vertex pairs whose entries have opposite sign for at least one operator in ``ops``.

    Returns ``{(u, v): entries}`` with the two-entry sub-operator taken from the
    first operator that separates ``u`` and ``v``.
    """
    found = {}
    for op in ops:
        ent = block_pairs(op, block, dims)
        for u, v in itertools.combinations(sorted(ent), 2):
            if (u, v) in found:
                continue
            # entries are real +-1: (+-i)^2 from the pi/2 pair times +1 from the pi factors
            if np.real(ent[u][2] * np.conj(ent[v][2])) < 0:
                found[(u, v)] = (ent[u], ent[v])
    return found


def _guard(state: PureState):
    if state.size > ORACLE_MAX_DIM:
        raise SizeGuardError(f"oracle limited to prod(dims) <= {ORACLE_MAX_DIM}, got {state.size}")


def oracle_class_contribution(state: PureState, active, slow: bool = False) -> float:
    """Sum of ``|<Phi| O_pair C Phi>|^2`` over blocks and separating vertex pairs.

    With ``slow=True`` every sub-operator is cut from the fully materialized
    operator and evaluated densely.
    """
    _guard(state)
    active = tuple(sorted(active))
    ops = [ClassOperator(state.m, active, p) for p in itertools.combinations(active, 2)]
    dims = state.dims
    total = 0.0
    for block in iter_blocks(dims, active):
        pairs = discovered_pairs(ops, block, dims)
        dense = {}
        for (u, v), (eu, ev) in sorted(pairs.items()):
            if slow:
                op = next(o for o in ops if _separates(o, block, dims, u, v))
                if op not in dense:
                    dense[op] = dense_operator(op, block, dims)
                full = dense[op]
                sub = np.zeros_like(full)
                for r, c, _ in (eu, ev):
                    sub[r, c] = full[r, c]
                val = expectation(state, sub)
            else:
                val = expectation_entries(state, (eu, ev))
            total += float(abs(val) ** 2)
    return total


def _separates(op, block, dims, u, v) -> bool:
    ent = block_pairs(op, block, dims)
    return np.real(ent[u][2] * np.conj(ent[v][2])) < 0


def w_half_expectations(state: PureState, active, block: BlockIndex):
    """Upper and lower anti-diagonal half expectations of a W operator on one block."""
    r1, r2 = sorted(active)
    op = ClassOperator(state.m, (r1, r2), (r1, r2))
    full = dense_operator(op, block, state.dims)
    s = 2
    upper = np.zeros_like(full)
    lower = np.zeros_like(full)
    for u in range(1 << s):
        row = int(np.ravel_multi_index(block.vertex_index(u, op.active), state.dims))
        col = int(np.ravel_multi_index(block.vertex_index(antipode(u, s), op.active), state.dims))
        target = upper if u < (1 << (s - 1)) else lower
        target[row, col] = full[row, col]
    return expectation(state, upper), expectation(state, lower)


def verify_state(state: PureState, sets=None, engine=None):
    """Engine-vs-oracle deviations per active set as ``[(S, engine, oracle, |diff|)]``."""
    from .engine import class_contribution
    from .operators import active_sets

    _guard(state)
    engine = engine or class_contribution
    sets = sets or active_sets(state.m)
    rows = []
    for S in sets:
        e = engine(state, S).value
        o = oracle_class_contribution(state, S)
        rows.append((tuple(S), e, o, abs(e - o)))
    return rows


__all__ = [
    "ORACLE_MAX_DIM",
    "expectation",
    "expectation_entries",
    "oracle_class_contribution",
    "verify_state",
    "w_half_expectations",
    "block_pairs",
    "discovered_pairs",
]
