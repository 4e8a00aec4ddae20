"""Convex-roof upper bounds for mixed states.

A decomposition of ``rho = sum_n p_n |Phi_n><Phi_n|`` into ``K`` pure states
is ``x_i = sum_n U[i, n] sqrt(p_n) Phi_n`` for a column-orthonormal ``K x r``
matrix ``U``; member ``i`` has weight ``|x_i|^2``. The search takes ``U`` as
the leading ``r`` columns of a ``K x K`` unitary and walks it with Givens
rotations. Since the pure concurrence scales as ``|c|^2``, the weighted term
``|x_i|^2 C(x_i / |x_i|)`` equals ``C(x_i)`` on the unnormalized vector.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .engine import Norm, resolve_norm
from .kernels import contribution
from .operators import active_sets
from .state import DensityMatrix, PureState

ISOMETRY_TOL = 1e-10
DROP_NORM = 1e-14
REL_IMPROVEMENT = 1e-10
MIN_STEP = 1e-7


@dataclass(frozen=True)
class Ensemble:
    weights: tuple[float, ...]
    states: tuple[PureState, ...]

    def __len__(self):
        return len(self.weights)

    @property
    def dims(self):
        return self.states[0].dims

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_ensemble(self.dims, self.weights, self.states)

    def average(self, norm: Norm = 1.0) -> float:
        from .engine import total_concurrence
        total = 0.0
        for p, s in zip(self.weights, self.states):
            total += p * total_concurrence(s, norm, allow_unnormalized=True).total
        return total


def eigen_ensemble(rho: DensityMatrix, cutoff: float = 1e-12) -> Ensemble:
    """Eigenvectors of ``rho`` above ``cutoff``, by descending eigenvalue.

    Each eigenvector is rephased so its largest-magnitude component (first one
    on ties) is real and positive.
    """
    rho.validate()
    herm = 0.5 * (rho.matrix + rho.matrix.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    order = np.argsort(-vals, kind="stable")
    weights, states = [], []
    for i in order:
        if vals[i] <= cutoff:
            continue
        v = vecs[:, i]
        k = int(np.argmax(np.abs(v)))
        v = v * (abs(v[k]) / v[k])
        v[k] = abs(v[k])
        weights.append(float(vals[i]))
        states.append(PureState(rho.dims, v))
    return Ensemble(tuple(weights), tuple(states))


def _base_rows(base: Ensemble) -> np.ndarray:
    return np.array([math.sqrt(p) * s.coeffs for p, s in zip(base.weights, base.states)])


def _members(vectors: np.ndarray, dims) -> Ensemble:
    weights, states = [], []
    for x in vectors:
        n = np.linalg.norm(x)
        if n < DROP_NORM:
            continue
        weights.append(float(n * n))
        states.append(PureState(dims, x / n))
    return Ensemble(tuple(weights), tuple(states))


def mix_ensemble(base: Ensemble, param: np.ndarray) -> Ensemble:
    """Re-mix ``base`` with a column-orthonormal ``K x r`` matrix."""
    param = np.asarray(param, dtype=np.complex128)
    r = len(base)
    if param.ndim != 2 or param.shape[1] != r or param.shape[0] < r:
        raise ValueError(f"mixing matrix must be K x {r} with K >= {r}, got {param.shape}")
    gram = param.conj().T @ param
    if np.max(np.abs(gram - np.eye(r))) > ISOMETRY_TOL:
        raise ValueError("mixing matrix columns are not orthonormal")
    return _members(param @ _base_rows(base), base.dims)


def random_unitary(K: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


class _Objective:
    """Sum of raw pure concurrences of unnormalized members, cached per row."""

    def __init__(self, dims, norm: float):
        self.dims = tuple(dims)
        self.norm = norm
        self.sets = active_sets(len(dims))

    def member(self, x: np.ndarray) -> float:
        raw = 0.0
        for S in self.sets:
            raw += contribution(x, self.dims, S)
        return math.sqrt(self.norm * raw)


@dataclass
class RoofResult:
    value: float
    ensemble: Ensemble
    eigen_average: float
    restart_values: list[float] = field(default_factory=list)
    history: list[float] = field(default_factory=list)
    best_restart: int = 0
    is_upper_bound: bool = True

    def __iter__(self):
        # allows ``value, ensemble = roof_estimate(...)``
        return iter((self.value, self.ensemble))


def _descend(W, rows, obj, iters, step0):
    K = W.shape[0]
    X = W[:, : rows.shape[0]] @ rows
    cost = np.array([obj.member(x) for x in X])
    value = float(np.sum(cost))
    history = [value]
    step = step0
    pairs = list(itertools.combinations(range(K), 2))
    for _ in range(iters):
        if value <= 0.0:
            break
        start = value
        for a, b in pairs:
            best = None
            for theta in (step, -step):
                for phi in (0.0, math.pi / 2):
                    c, s = math.cos(theta), math.sin(theta)
                    e = complex(math.cos(phi), math.sin(phi))
                    xa = c * X[a] - e * s * X[b]
                    xb = e.conjugate() * s * X[a] + c * X[b]
                    ca, cb = obj.member(xa), obj.member(xb)
                    trial = value - cost[a] - cost[b] + ca + cb
                    if trial < value and (best is None or trial < best[0]):
                        best = (trial, theta, phi, xa, xb, ca, cb)
            if best is not None:
                trial, theta, phi, xa, xb, ca, cb = best
                c, s = math.cos(theta), math.sin(theta)
                e = complex(math.cos(phi), math.sin(phi))
                wa = c * W[a] - e * s * W[b]
                wb = e.conjugate() * s * W[a] + c * W[b]
                W[a], W[b] = wa, wb
                X[a], X[b] = xa, xb
                cost[a], cost[b] = ca, cb
                value = float(np.sum(cost))
        history.append(value)
        if start - value <= REL_IMPROVEMENT * max(start, 1e-300):
            step *= 0.5
            if step < MIN_STEP:
                break
    return W, value, history


def roof_estimate(
    rho: DensityMatrix,
    K: int | None = None,
    restarts: int = 4,
    iters: int = 200,
    seed: int = 0,
    norm: Norm = 1.0,
    step: float = math.pi / 8,
) -> RoofResult:
    """Smallest ensemble-averaged pure concurrence found by random-restart descent.

    Restart 0 starts from the eigen-ensemble, so the reported value never
    exceeds its average. The result is an upper bound on the convex roof.
    """
    base = eigen_ensemble(rho)
    r = len(base)
    K = r + 1 if K is None else int(K)
    if K < r:
        raise ValueError(f"ensemble size K={K} is below rank(rho)={r}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    nm = resolve_norm(norm, rho.m)
    obj = _Objective(rho.dims, nm)
    rows = _base_rows(base)
    eigen_avg = float(sum(obj.member(x) for x in rows))

    best = None
    values = []
    for restart in range(restarts):
        if restart == 0:
            W0 = np.eye(K, dtype=np.complex128)
        else:
            W0 = random_unitary(K, np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, restart]))
        W, value, hist = _descend(W0.copy(), rows, obj, iters, step)
        values.append(value)
        # ties keep the earlier restart
        if best is None or value < best[0]:
            best = (value, W, hist, restart)

    value, W, hist, idx = best
    ens = _members(W[:, :r] @ rows, rho.dims)
    return RoofResult(value, ens, eigen_avg, values, hist, idx)


def reconstruction_error(ens: Ensemble, rho: DensityMatrix) -> float:
    return float(np.max(np.abs(ens.density().matrix - rho.matrix)))


__all__ = [
    "Ensemble", "RoofResult", "eigen_ensemble", "mix_ensemble", "roof_estimate",
    "random_unitary", "reconstruction_error",
]
