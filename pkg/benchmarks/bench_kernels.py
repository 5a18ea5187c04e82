"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from findmap import kernels
from findmap.kernels import _numpy

try:
    from findmap.kernels import _numba
except ImportError:  # pragma: no cover
    _numba = None


def _cases(rng):
    n = 200
    true_xy = rng.uniform(0, 1000, (n, 2))
    claimed = true_xy.copy()
    kind = np.zeros(n, dtype=np.int64)
    value = np.zeros(n)
    claimed[::4] += rng.uniform(-50, 50, (len(claimed[::4]), 2))
    kind[::4] = 1
    value[::4] = rng.uniform(0.5, 2.0, len(value[::4]))
    acc = (true_xy, claimed, 0, kind, value, 1.0, 0.125, 3e8, 340.0, 1e-9)

    xy = rng.uniform(0, 1000, (14, 2))
    conic = (xy, kernels.combos(14, 5), rng.uniform(0, 1000, 2))

    stations = rng.uniform(0, 10, (6, 2))
    pinv = np.linalg.pinv(stations[1:] - stations[0])
    grid = (stations, pinv, rng.uniform(-5, 15, (40_000, 2)), np.geomspace(0.25, 4, 32), 0, 1e-9)
    return {"accusation_matrix": acc, "min_conic_det_with": conic, "grid_scan": grid}


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cases = _cases(np.random.default_rng(args.seed))
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fargs in cases.items():
        t_np = _best(getattr(_numpy, name), fargs, args.repeat)
        if _numba is None:
            print(f"{name:<22}{t_np * 1e3:>12.2f}{'n/a':>12}{'':>10}")
            continue
        fn = getattr(_numba, name)
        fn(*fargs)  # compile outside the timed loop
        t_nb = _best(fn, fargs, args.repeat)
        print(f"{name:<22}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
