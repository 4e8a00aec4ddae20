import os
import subprocess
import sys

import numpy as np
import pytest

from concur import kernels
from concur._accel import HAS_NUMBA
from concur.operators import active_sets
from concur.state import random_state

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba unavailable or disabled")


@needs_numba
@pytest.mark.parametrize("dims", [(2, 2, 2), (3, 2, 4), (2, 3, 2, 3), (2, 2, 2, 2, 2)])
def test_backends_agree(dims):
    s = random_state(dims, 3)
    for S in active_sets(len(dims)):
        a = kernels.contribution(s.coeffs, dims, S, backend="numba")
        b = kernels.contribution(s.coeffs, dims, S, backend="numpy")
        assert a == pytest.approx(b, abs=1e-13)


@needs_numba
def test_numba_deterministic():
    s = random_state((3, 3, 3), 8)
    vals = {kernels.contribution(s.coeffs, s.dims, (1, 2, 3), backend="numba") for _ in range(5)}
    assert len(vals) == 1


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.contribution(np.ones(8), (2, 2, 2), (1, 2), backend="fortran")


def test_block_tables_layout():
    off0, off1, counts, pos = kernels.block_tables((3, 2, 2), (1, 3))
    assert counts.tolist() == [3, 2, 1]
    assert pos.tolist() == [0, 2]
    # subsystem 1 pairs (0,1), (0,2), (1,2) with stride 4
    assert off0[0, :3].tolist() == [0, 0, 4]
    assert off1[0, :3].tolist() == [4, 8, 8]
    assert off0[1, :2].tolist() == off1[1, :2].tolist() == [0, 2]


def test_env_flag_selects_numpy():
    code = (
        "import concur._accel as a, concur.kernels as k;"
        "print(a.HAS_NUMBA, k.DEFAULT_BACKEND)"
    )
    env = dict(os.environ, CONCUR_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "numpy"]
