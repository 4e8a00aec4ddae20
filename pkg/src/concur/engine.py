"""Closed-form concurrence for pure multipartite states."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Union

from . import kernels
from ._accel import worker_count
from .errors import NormalizationError
from .operators import active_sets
from .state import NORM_TOL, PureState, norm2

Norm = Union[float, str]
PARALLEL_MIN_SIZE = 4096


@dataclass(frozen=True)
class ClassContribution:
    active: tuple[int, ...]
    value: float

    @property
    def order(self) -> int:
        return len(self.active)


@dataclass(frozen=True)
class ConcurrenceReport:
    dims: tuple[int, ...]
    normalization: float
    contributions: tuple[ClassContribution, ...]
    total: float
    w_sum: float = field(init=False)
    ghz_sums: dict = field(init=False)

    def __post_init__(self):
        w = 0.0
        ghz = {}
        for c in self.contributions:
            if c.order == 2:
                w += c.value
            else:
                ghz[c.order] = ghz.get(c.order, 0.0) + c.value
        object.__setattr__(self, "w_sum", w)
        object.__setattr__(self, "ghz_sums", dict(sorted(ghz.items())))

    @property
    def raw_sum(self) -> float:
        return _ordered_sum(c.value for c in self.contributions)

    def contribution(self, active) -> float:
        active = tuple(sorted(active))
        for c in self.contributions:
            if c.active == active:
                return c.value
        raise KeyError(active)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "normalization": self.normalization,
            "contributions": [{"activeSet": list(c.active), "value": c.value} for c in self.contributions],
            "wSum": self.w_sum,
            "ghzSums": {str(s): v for s, v in self.ghz_sums.items()},
            "total": self.total,
        }


def _ordered_sum(values) -> float:
    total = 0.0
    for v in values:
        total += v
    return total


def calibrate_norm(m: int) -> float:
    """Normalization giving the m-qubit GHZ state concurrence exactly 1."""
    if m < 3:
        raise ValueError(f"normalization is defined for m >= 3, got m={m}")
    return 4.0 / (2 ** (m - 1) - 1)


def resolve_norm(norm: Norm, m: int) -> float:
    if isinstance(norm, str):
        if norm == "raw":
            return 1.0
        if norm == "ghz":
            return calibrate_norm(m)
        raise ValueError(f"unknown normalization mode {norm!r}")
    norm = float(norm)
    if not norm > 0:
        raise ValueError("normalization constant must be positive")
    return norm


def _check_active(state: PureState, active) -> tuple[int, ...]:
    active = tuple(sorted(int(a) for a in active))
    if len(set(active)) != len(active):
        raise ValueError(f"duplicate labels in active set {active}")
    if not 2 <= len(active) <= state.m:
        raise ValueError(f"active set size must be in 2..{state.m}, got {len(active)}")
    if active[0] < 1 or active[-1] > state.m:
        raise ValueError(f"active set {active} out of range 1..{state.m}")
    return active


def class_contribution(state: PureState, active, backend=None) -> ClassContribution:
    """Sum of ``|P_u - P_v|^2`` over all blocks and term pairs of ``active``."""
    active = _check_active(state, active)
    value = kernels.contribution(state.coeffs, state.dims, active, backend=backend)
    return ClassContribution(active, value)


def _check_normalized(state: PureState, allow_unnormalized: bool) -> None:
    if state.m < 3:
        raise ValueError(f"concurrence is defined here for m >= 3 subsystems, got m={state.m}")
    if not allow_unnormalized:
        n = norm2(state)
        if abs(n - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm^2 is {n!r}; pass allow_unnormalized to override")


def total_concurrence(
    state: PureState,
    norm: Norm = 1.0,
    allow_unnormalized: bool = False,
    backend=None,
    workers: int | None = None,
) -> ConcurrenceReport:
    """Square root of the normalized sum of every class contribution, ``|S| = 2..m``."""
    _check_normalized(state, allow_unnormalized)
    nm = resolve_norm(norm, state.m)
    sets = active_sets(state.m)
    workers = worker_count() if workers is None else max(1, workers)
    # thread startup outweighs the kernels on small states
    if workers > 1 and len(sets) > 1 and state.size >= PARALLEL_MIN_SIZE:
        with ThreadPoolExecutor(max_workers=min(workers, len(sets))) as pool:
            contribs = list(pool.map(lambda S: class_contribution(state, S, backend), sets))
    else:
        contribs = [class_contribution(state, S, backend) for S in sets]
    raw = _ordered_sum(c.value for c in contribs)
    return ConcurrenceReport(state.dims, nm, tuple(contribs), math.sqrt(nm * raw))


def _alpha(state: PureState):
    a = state.tensor()
    return lambda i, j, k: complex(a[i, j, k])


def three_partite_concurrence(
    state: PureState, norm: Norm = 1.0, allow_unnormalized: bool = False
) -> ConcurrenceReport:
    """Three-partite closed form, evaluated sum by sum with explicit loops."""
    if state.m != 3:
        raise ValueError(f"three-partite formula needs m = 3, got m={state.m}")
    _check_normalized(state, allow_unnormalized)
    nm = resolve_norm(norm, 3)
    a = _alpha(state)
    N1, N2, N3 = state.dims

    def sq(z):
        return z.real * z.real + z.imag * z.imag

    w12 = w13 = w23 = 0.0
    for k1 in range(N1):
        for l1 in range(k1 + 1, N1):
            for k2 in range(N2):
                for l2 in range(k2 + 1, N2):
                    for t3 in range(N3):
                        w12 += sq(a(k1, l2, t3) * a(l1, k2, t3) - a(k1, k2, t3) * a(l1, l2, t3))
    for k1 in range(N1):
        for l1 in range(k1 + 1, N1):
            for t2 in range(N2):
                for k3 in range(N3):
                    for l3 in range(k3 + 1, N3):
                        w13 += sq(a(k1, t2, l3) * a(l1, t2, k3) - a(k1, t2, k3) * a(l1, t2, l3))
    for t1 in range(N1):
        for k2 in range(N2):
            for l2 in range(k2 + 1, N2):
                for k3 in range(N3):
                    for l3 in range(k3 + 1, N3):
                        w23 += sq(a(t1, k2, l3) * a(t1, l2, k3) - a(t1, k2, k3) * a(t1, l2, l3))

    ghz = 0.0
    for k1 in range(N1):
        for l1 in range(k1 + 1, N1):
            for k2 in range(N2):
                for l2 in range(k2 + 1, N2):
                    for k3 in range(N3):
                        for l3 in range(k3 + 1, N3):
                            p_kkk = a(k1, k2, k3) * a(l1, l2, l3)
                            p_kll = a(k1, l2, l3) * a(l1, k2, k3)
                            p_klk = a(k1, l2, k3) * a(l1, k2, l3)
                            p_kkl = a(k1, k2, l3) * a(l1, l2, k3)
                            ghz += (
                                sq(p_kll - p_kkk)
                                + sq(p_klk - p_kkl)
                                + sq(p_kkl - p_kll)
                                + sq(p_klk - p_kkk)
                                + sq(p_klk - p_kll)
                                + sq(p_kkl - p_kkk)
                            )

    contribs = (
        ClassContribution((1, 2), w12),
        ClassContribution((1, 3), w13),
        ClassContribution((2, 3), w23),
        ClassContribution((1, 2, 3), ghz),
    )
    raw = _ordered_sum(c.value for c in contribs)
    return ConcurrenceReport(state.dims, nm, contribs, math.sqrt(nm * raw))
