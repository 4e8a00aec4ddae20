"""Pure states and density matrices over ``m`` subsystems.

Amplitudes are stored as a flat complex vector in row-major order, so the
multi-index ``(l_1, ..., l_m)`` (0-based) maps to
``np.ravel_multi_index(index, dims)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import DimensionError

NORM_TOL = 1e-9


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if len(dims) == 0:
        raise DimensionError("at least one subsystem is required")
    if any(d < 2 for d in dims):
        raise DimensionError(f"subsystem dimensions must be >= 2, got {dims}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """Dense amplitude vector with per-subsystem dimensions."""

    dims: tuple[int, ...]
    coeffs: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        coeffs = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if coeffs.size != prod(dims):
            raise DimensionError(
                f"expected {prod(dims)} amplitudes for dims {dims}, got {coeffs.size}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def m(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return self.coeffs.size

    def tensor(self) -> np.ndarray:
        """Amplitudes viewed as an ``m``-dimensional array."""
        return self.coeffs.reshape(self.dims)

    def amplitude(self, index: Sequence[int]) -> complex:
        return complex(self.coeffs[np.ravel_multi_index(tuple(index), self.dims)])

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(norm2(self) - 1.0) <= tol

    def scaled(self, c: complex) -> "PureState":
        return PureState(self.dims, c * self.coeffs)

    def normalized(self) -> "PureState":
        n = np.sqrt(norm2(self))
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.dims, self.coeffs / n)

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.coeffs, other.coeffs)

    def __repr__(self):
        return f"PureState(dims={self.dims}, nnz={np.count_nonzero(self.coeffs)})"

    @classmethod
    def from_amplitudes(cls, dims, amplitudes: dict) -> "PureState":
        """Build a state from ``{multi_index: amplitude}``; missing entries are zero."""
        dims = _check_dims(dims)
        coeffs = np.zeros(prod(dims), dtype=np.complex128)
        for index, value in amplitudes.items():
            coeffs[np.ravel_multi_index(tuple(index), dims)] = value
        return cls(dims, coeffs)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        mat = np.array(self.matrix, dtype=np.complex128)
        n = prod(dims)
        if mat.shape != (n, n):
            raise DimensionError(f"expected a {n}x{n} matrix for dims {dims}, got {mat.shape}")
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return len(self.dims)

    def validate(self, tol: float = NORM_TOL) -> None:
        """Raise ``ValueError`` unless Hermitian, unit trace and positive semidefinite."""
        mat = self.matrix
        herm_err = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
        if herm_err > tol:
            raise ValueError(f"density matrix is not Hermitian (max deviation {herm_err:.3g})")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > tol:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))[0]
        if lo < -tol:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")

    @classmethod
    def from_pure(cls, state: PureState) -> "DensityMatrix":
        v = state.coeffs
        return cls(state.dims, np.outer(v, v.conj()))

    @classmethod
    def from_ensemble(cls, dims, weights, states) -> "DensityMatrix":
        n = prod(dims)
        mat = np.zeros((n, n), dtype=np.complex128)
        for p, s in zip(weights, states):
            mat += p * np.outer(s.coeffs, s.coeffs.conj())
        return cls(dims, mat)


def conjugate(state: PureState) -> PureState:
    """Complex-conjugate every amplitude in the computational basis."""
    return PureState(state.dims, state.coeffs.conj())


def norm2(state: PureState) -> float:
    """Sum of squared moduli, accumulated in lexicographic index order."""
    total = 0.0
    for a in np.abs(state.coeffs) ** 2:
        total += a
    return float(total)


def apply_local_phases(state: PureState, phases) -> PureState:
    """Multiply each amplitude by ``exp(i * sum_j phases[j][l_j])``."""
    if len(phases) != state.m:
        raise DimensionError(f"need {state.m} phase lists, got {len(phases)}")
    factor = np.ones((), dtype=np.complex128)
    for j, (ph, d) in enumerate(zip(phases, state.dims)):
        ph = np.asarray(ph, dtype=float)
        if ph.shape != (d,):
            raise DimensionError(f"subsystem {j} needs {d} phases, got {ph.shape}")
        shape = [1] * state.m
        shape[j] = d
        factor = factor * np.exp(1j * ph).reshape(shape)
    return PureState(state.dims, (state.tensor() * factor).reshape(-1))


def permute_subsystems(state: PureState, perm: Sequence[int]) -> PureState:
    """Reorder subsystems; ``perm`` is 1-based and new subsystem ``i`` is old ``perm[i]``."""
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(1, state.m + 1)):
        raise DimensionError(f"{perm} is not a permutation of 1..{state.m}")
    axes = [p - 1 for p in perm]
    new = np.transpose(state.tensor(), axes)
    return PureState(tuple(state.dims[a] for a in axes), new.reshape(-1))


def relabel_basis(state: PureState, subsystem: int, perm: Sequence[int]) -> PureState:
    """Permute basis labels within one subsystem (0-based ``subsystem``)."""
    perm = np.asarray(perm, dtype=int)
    if sorted(perm.tolist()) != list(range(state.dims[subsystem])):
        raise DimensionError("invalid basis permutation")
    new = np.take(state.tensor(), perm, axis=subsystem)
    return PureState(state.dims, new.reshape(-1))


def random_state(dims, seed: int) -> PureState:
    """Normalized state with i.i.d. complex standard normal amplitudes."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(int(seed) & 0xFFFFFFFFFFFFFFFF)
    n = prod(dims)
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    z /= np.sqrt(np.sum(np.abs(z) ** 2))
    return PureState(dims, z)


def product_state(factors) -> PureState:
    """Tensor product of single-subsystem vectors."""
    vec = np.ones(1, dtype=np.complex128)
    dims = []
    for f in factors:
        f = np.asarray(f, dtype=np.complex128)
        vec = np.kron(vec, f)
        dims.append(f.size)
    return PureState(tuple(dims), vec)


def ghz_state(m: int, d: int = 2) -> PureState:
    """``(|0...0> + ... + |d-1...d-1>) / sqrt(d)`` on ``m`` subsystems of dimension ``d``."""
    dims = (d,) * m
    return PureState.from_amplitudes(dims, {(i,) * m: 1 / np.sqrt(d) for i in range(d)})


def w_state(m: int) -> PureState:
    """Equal superposition of the single-excitation qubit basis states."""
    dims = (2,) * m
    amps = {}
    for j in range(m):
        idx = [0] * m
        idx[j] = 1
        amps[tuple(idx)] = 1 / np.sqrt(m)
    return PureState.from_amplitudes(dims, amps)
