"""Phase-POVM complement operators and the W/GHZ class operator families.

Subsystems are labelled 1..m in class descriptors; basis indices are 0-based.
A block vertex over an active set ``S = (j_1 < ... < j_s)`` is an ``s``-bit
integer whose most significant bit belongs to ``j_1``; bit value 0 selects
``k_j`` and 1 selects ``l_j``. Antipodal vertices (bitwise complement) are
identified, and the representative with a zero leading bit is canonical.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import DimensionError

ANTISYM_TOL = 1e-12


class PhaseTag(enum.Enum):
    HALF_PI = "half_pi"
    PI = "pi"
    IDENTITY = "identity"

    @property
    def angle(self) -> float:
        return {PhaseTag.HALF_PI: np.pi / 2, PhaseTag.PI: np.pi}[self]


def phase_table(N: int, value: float) -> np.ndarray:
    """Antisymmetric table with ``phi[k, l] = value`` for every ``k < l``."""
    upper = np.triu(np.full((N, N), float(value)), 1)
    return upper - upper.T


def _as_phase_table(N: int, phase) -> np.ndarray:
    if np.isscalar(phase):
        return phase_table(N, phase)
    phi = np.asarray(phase, dtype=float)
    if phi.shape != (N, N):
        raise DimensionError(f"phase table must be {N}x{N}, got {phi.shape}")
    if np.max(np.abs(phi + phi.T)) > ANTISYM_TOL:
        raise ValueError("phase table must be antisymmetric with zero diagonal")
    return phi


def build_delta(N: int, phase) -> np.ndarray:
    """POVM phase matrix with entries ``exp(i phi[k, l])``.

    ``phase`` is either an antisymmetric ``N x N`` table or a scalar applied to
    all ``k < l`` (and negated below the diagonal).
    """
    return np.exp(1j * _as_phase_table(N, phase))


def build_delta_complement(N: int, phase) -> np.ndarray:
    """Orthogonal complement ``I - Delta`` of the phase matrix."""
    return np.eye(N, dtype=np.complex128) - build_delta(N, phase)


@dataclass(frozen=True)
class ClassOperator:
    """Descriptor of one W (``|S| = 2``) or GHZ^s (``|S| = s >= 3``) operator.

    ``active`` and ``pair`` hold 1-based subsystem labels. The ``pair``
    subsystems carry phase pi/2, the rest of ``active`` carries pi, and all
    other subsystems get the identity.
    """

    m: int
    active: tuple[int, ...]
    pair: tuple[int, int]

    def __post_init__(self):
        active = tuple(sorted(self.active))
        if len(set(active)) != len(active) or len(active) < 2:
            raise ValueError(f"active set must hold at least two distinct labels: {self.active}")
        if active[0] < 1 or active[-1] > self.m:
            raise ValueError(f"active set {active} out of range 1..{self.m}")
        r1, r2 = self.pair
        if not (r1 < r2 and r1 in active and r2 in active):
            raise ValueError(f"pair {self.pair} must be an ordered pair inside {active}")
        object.__setattr__(self, "active", active)

    @property
    def order(self) -> int:
        return len(self.active)

    @property
    def family(self) -> str:
        return "W" if self.order == 2 else f"GHZ{self.order}"

    def phase_spec(self) -> tuple[PhaseTag, ...]:
        tags = []
        for j in range(1, self.m + 1):
            if j in self.pair:
                tags.append(PhaseTag.HALF_PI)
            elif j in self.active:
                tags.append(PhaseTag.PI)
            else:
                tags.append(PhaseTag.IDENTITY)
        return tuple(tags)


def enumerate_class_operators(m: int) -> list[ClassOperator]:
    """All class operators for ``m`` subsystems, ordered by ``|S|``, then ``S``, then pair."""
    if m < 3:
        raise ValueError(f"class operators are defined for m >= 3, got m={m}")
    ops = []
    for s in range(2, m + 1):
        for active in itertools.combinations(range(1, m + 1), s):
            for pair in itertools.combinations(active, 2):
                ops.append(ClassOperator(m, active, pair))
    return ops


def active_sets(m: int) -> list[tuple[int, ...]]:
    """Every active set with ``2 <= |S| <= m`` in enumeration order."""
    return [S for s in range(2, m + 1) for S in itertools.combinations(range(1, m + 1), s)]


def vertex_bits(u: int, s: int) -> tuple[int, ...]:
    return tuple((u >> (s - 1 - b)) & 1 for b in range(s))


def antipode(u: int, s: int) -> int:
    return u ^ ((1 << s) - 1)


def canonical_vertex(u: int, s: int) -> int:
    return u if u < (1 << (s - 1)) else antipode(u, s)


def sign_vector(op: ClassOperator) -> dict[int, int]:
    """Anti-diagonal sign of ``op`` at ``(u, complement(u))`` for every block vertex ``u``."""
    s = op.order
    b1 = op.active.index(op.pair[0])
    b2 = op.active.index(op.pair[1])
    signs = {}
    for u in range(1 << s):
        bits = vertex_bits(u, s)
        signs[u] = 1 if bits[b1] != bits[b2] else -1
    return signs


@dataclass(frozen=True)
class TermSet:
    """Unordered pairs of canonical vertices entering one class contribution."""

    order: int
    pairs: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def as_array(self) -> np.ndarray:
        return np.array(self.pairs, dtype=np.int64).reshape(-1, 2)


@lru_cache(maxsize=None)
def _term_set_for_order(s: int) -> TermSet:
    m = s
    found = set()
    for pair in itertools.combinations(range(1, s + 1), 2):
        signs = sign_vector(ClassOperator(m, tuple(range(1, s + 1)), pair))
        for u, v in itertools.combinations(range(1 << (s - 1)), 2):
            if signs[u] != signs[v]:
                found.add((u, v))
    return TermSet(s, tuple(sorted(found)))


def term_set(active: Union[int, Sequence[int]]) -> TermSet:
    """Term pairs for an active set (or just its size).

    Collects, over every pi/2 pair choice inside ``S``, the canonical vertex
    pairs on which the operator signs differ, without duplicates.
    """
    s = active if isinstance(active, (int, np.integer)) else len(tuple(active))
    if s < 2:
        raise ValueError("active set needs at least two subsystems")
    return _term_set_for_order(int(s))


@dataclass(frozen=True)
class BlockIndex:
    """One ``(k_j, l_j)`` pair per active subsystem, one fixed ``t_j`` elsewhere.

    ``entries[j]`` (0-based subsystem) is either a ``(k, l)`` tuple or an int.
    """

    entries: tuple

    def is_active(self, j: int) -> bool:
        return isinstance(self.entries[j], tuple)

    def validate(self, dims, active) -> None:
        act0 = {a - 1 for a in active}
        if len(self.entries) != len(dims):
            raise DimensionError("block index length does not match dims")
        for j, (e, d) in enumerate(zip(self.entries, dims)):
            if j in act0:
                if not (isinstance(e, tuple) and 0 <= e[0] < e[1] < d):
                    raise DimensionError(f"subsystem {j + 1} needs a pair 0 <= k < l < {d}, got {e}")
            elif not (isinstance(e, (int, np.integer)) and 0 <= e < d):
                raise DimensionError(f"subsystem {j + 1} needs a fixed index below {d}, got {e}")

    def vertex_index(self, u: int, active) -> tuple[int, ...]:
        """Multi-index of block vertex ``u``."""
        s = len(active)
        bits = dict(zip((a - 1 for a in active), vertex_bits(u, s)))
        out = []
        for j, e in enumerate(self.entries):
            out.append(e[bits[j]] if j in bits else e)
        return tuple(out)


def iter_blocks(dims, active) -> Iterator[BlockIndex]:
    """Blocks for active set ``active`` in lexicographic order (last subsystem fastest)."""
    act0 = {a - 1 for a in active}
    axes = []
    for j, d in enumerate(dims):
        if j in act0:
            axes.append(list(itertools.combinations(range(d), 2)))
        else:
            axes.append(list(range(d)))
    for entries in itertools.product(*axes):
        yield BlockIndex(tuple(entries))


def local_factors(op: ClassOperator, block: BlockIndex, dims) -> list[np.ndarray]:
    """Single-subsystem matrices whose Kronecker product is the embedded operator.

    Non-identity factors are complements of the phase matrix restricted to the
    block's ``(k, l)`` plane; all other entries are zero.
    """
    block.validate(dims, op.active)
    factors = []
    for j, (tag, d) in enumerate(zip(op.phase_spec(), dims)):
        if tag is PhaseTag.IDENTITY:
            factors.append(np.eye(d, dtype=np.complex128))
            continue
        k, l = block.entries[j]
        full = build_delta_complement(d, tag.angle)
        mask = np.zeros((d, d), dtype=bool)
        mask[np.ix_([k, l], [k, l])] = True
        factors.append(np.where(mask, full, 0))
    return factors


def dense_operator(op: ClassOperator, block: BlockIndex, dims, max_dim: int = 4096) -> np.ndarray:
    """Fully materialized ``(prod N_j)^2`` operator for one block."""
    dims = tuple(dims)
    if prod(dims) > max_dim:
        raise DimensionError(f"refusing to materialize a {prod(dims)}-dimensional operator")
    out = np.ones((1, 1), dtype=np.complex128)
    for f in local_factors(op, block, dims):
        out = np.kron(out, f)
    return out


def dump_operator(mat: np.ndarray, tol: float = 0.0) -> list[tuple[int, int, float, float]]:
    """Nonzero entries as ``(row, col, re, im)`` rows, row-major."""
    rows, cols = np.nonzero(np.abs(mat) > tol)
    return [(int(r), int(c), float(mat[r, c].real), float(mat[r, c].imag)) for r, c in zip(rows, cols)]
