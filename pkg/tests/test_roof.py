import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from concur.engine import total_concurrence
from concur.roof import (
    eigen_ensemble,
    mix_ensemble,
    random_unitary,
    reconstruction_error,
    roof_estimate,
)
from concur.state import DensityMatrix, PureState, random_state


def _basis(*idx):
    return PureState.from_amplitudes((2, 2, 2), {idx: 1.0})


def _random_low_rank(dims, rank, seed):
    rng = np.random.default_rng(seed)
    states = [random_state(dims, seed * 10 + i) for i in range(rank)]
    w = rng.uniform(0.1, 1, rank)
    return DensityMatrix.from_ensemble(dims, w / w.sum(), states)


class TestEigenEnsemble:
    def test_pure(self):
        ens = eigen_ensemble(DensityMatrix.from_pure(_basis(0, 0, 0)))
        assert len(ens) == 1
        assert ens.weights[0] == pytest.approx(1.0)

    def test_diagonal(self):
        rho = DensityMatrix.from_ensemble((2, 2, 2), [0.5, 0.5], [_basis(0, 0, 0), _basis(1, 1, 1)])
        ens = eigen_ensemble(rho)
        assert_allclose(ens.weights, [0.5, 0.5])

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction(self, seed):
        rho = _random_low_rank((2, 3, 2), 3, seed)
        ens = eigen_ensemble(rho)
        assert len(ens) == 3
        assert reconstruction_error(ens, rho) <= 1e-10
        assert list(ens.weights) == sorted(ens.weights, reverse=True)
        for s in ens.states:
            k = np.argmax(np.abs(s.coeffs))
            assert s.coeffs[k].imag == 0 and s.coeffs[k].real > 0

    def test_invalid(self):
        with pytest.raises(ValueError):
            eigen_ensemble(DensityMatrix((2, 2, 2), np.eye(8)))


class TestMix:
    def test_identity(self):
        rho = _random_low_rank((2, 2, 2), 2, 1)
        base = eigen_ensemble(rho)
        ens = mix_ensemble(base, np.eye(2))
        assert_allclose(ens.weights, base.weights, atol=1e-14)
        for a, b in zip(ens.states, base.states):
            assert_allclose(a.coeffs, b.coeffs, atol=1e-14)

    @pytest.mark.parametrize("theta", np.linspace(0, np.pi, 9))
    def test_rotation_reconstructs(self, theta):
        rho = _random_low_rank((2, 2, 2), 2, 2)
        base = eigen_ensemble(rho)
        U = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        ens = mix_ensemble(base, U)
        assert reconstruction_error(ens, rho) <= 1e-10
        assert sum(ens.weights) == pytest.approx(1.0, abs=1e-12)

    def test_zero_members_dropped(self):
        base = eigen_ensemble(_random_low_rank((2, 2, 2), 2, 3))
        param = np.zeros((3, 2))
        param[0, 0] = param[2, 1] = 1
        assert len(mix_ensemble(base, param)) == 2

    def test_non_isometric(self):
        base = eigen_ensemble(_random_low_rank((2, 2, 2), 2, 3))
        with pytest.raises(ValueError):
            mix_ensemble(base, np.ones((2, 2)))

    def test_random_isometry(self):
        rho = _random_low_rank((3, 2, 2), 3, 4)
        base = eigen_ensemble(rho)
        U = random_unitary(5, np.random.default_rng(0))[:, :3]
        assert reconstruction_error(mix_ensemble(base, U), rho) <= 1e-10


class TestRoof:
    def test_rank_one(self, w3):
        res = roof_estimate(DensityMatrix.from_pure(w3), seed=0)
        assert abs(res.value - math.sqrt(1 / 3)) <= 1e-10

    def test_separable_mixture(self):
        rho = DensityMatrix.from_ensemble((2, 2, 2), [0.5, 0.5], [_basis(0, 0, 0), _basis(1, 0, 0)])
        value, ens = roof_estimate(rho, seed=0)
        assert value <= 1e-9

    def test_ghz_w_mixture(self, ghz3, w3):
        rho = DensityMatrix.from_ensemble((2, 2, 2), [0.5, 0.5], [ghz3, w3])
        bound = 0.5 * (math.sqrt(0.75) + math.sqrt(1 / 3))
        res = roof_estimate(rho, K=3, restarts=2, iters=60, seed=5)
        assert res.value <= res.eigen_average + 1e-15
        assert res.value <= bound
        assert reconstruction_error(res.ensemble, rho) <= 1e-8
        assert res.ensemble.average() == pytest.approx(res.value, abs=1e-12)
        assert all(b <= a for a, b in zip(res.history, res.history[1:]))

    def test_deterministic(self):
        rho = _random_low_rank((2, 2, 2), 2, 9)
        a = roof_estimate(rho, K=3, restarts=2, iters=30, seed=17)
        b = roof_estimate(rho, K=3, restarts=2, iters=30, seed=17)
        assert a.value == b.value
        assert a.restart_values == b.restart_values

    def test_k_below_rank(self):
        with pytest.raises(ValueError):
            roof_estimate(_random_low_rank((2, 2, 2), 3, 1), K=2)

    def test_ghz_normalization(self, ghz3):
        res = roof_estimate(DensityMatrix.from_pure(ghz3), seed=0, norm="ghz")
        assert res.value == pytest.approx(1.0, abs=1e-10)
        assert total_concurrence(ghz3, "ghz").total == pytest.approx(res.value, abs=1e-10)
