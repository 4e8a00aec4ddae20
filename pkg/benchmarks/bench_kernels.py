"""Compare the numba and numpy contribution kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are called directly, so ``CONCUR_DISABLE_NUMBA`` only matters
in that it removes the numba column.
"""
import argparse
import time

from concur import kernels
from concur._accel import HAS_NUMBA
from concur.operators import active_sets
from concur.state import random_state

CASES = [
    (2, 2, 2),
    (3, 3, 3),
    (2, 2, 2, 2, 2, 2),
    (4, 4, 4, 4),
    (6, 6, 6, 6),
    (2,) * 10,
]


def run(dims, backend, repeat):
    s = random_state(dims, 0)
    sets = active_sets(len(dims))
    best = float("inf")
    value = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        value = sum(kernels.contribution(s.coeffs, dims, S, backend=backend) for S in sets)
        best = min(best, time.perf_counter() - t0)
    return best, value


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    kernels.warmup()
    print(f"{'dims':<24}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}{'|diff|':>12}")
    for dims in CASES:
        times, values = [], []
        for b in backends:
            t, v = run(dims, b, args.repeat)
            times.append(t)
            values.append(v)
        row = f"{','.join(map(str, dims)):<24}" + "".join(f"{t * 1e3:>12.3f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x{abs(values[0] - values[1]):>12.2e}"
        print(row)


if __name__ == "__main__":
    main()
