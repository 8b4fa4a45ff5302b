"""Timing comparison of the compiled and pure-Python kernel backends.

Run:  python3 benchmarks/bench_kernels.py [N]

N scales the synthetic workload (default 20000 frontier points).  Times are
the median of 5 repeats.  The same arrays go through both backends and the
outputs are cross-checked before timing, so the table compares like with
like.
"""

import math
import sys
import time

import numpy as np

from rotorb.kernels import load
from rotorb.geometry import Angle, Line3, Point2
from rotorb.words import make_generators
from rotorb.orbit import SamplerBudget, bfs_orbit

GOLDEN = math.pi * (math.sqrt(5.0) - 1.0) / 2.0


def median_time(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return sorted(times)[len(times) // 2]


def make_workload(n, rng):
    points = rng.uniform(-5, 5, size=(n, 3))
    base = np.tile(rng.uniform(-1, 1, size=(2, 3))[None], (n, 1, 1))
    dirs = np.zeros((n, 2, 3))
    dirs[:, 0] = rng.normal(size=(n, 3))
    dirs[:, 1] = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    last = rng.integers(-1, 4, size=n).astype(np.int64)
    movegen = np.array([0, 0, 1, 1], dtype=np.int64)
    lin = np.stack([np.eye(3) for _ in range(4)])
    shift = rng.uniform(-1, 1, size=(4, 3))
    return points, base, dirs, last, movegen, lin, shift


def bench_backend(backend, n, rng):
    points, base, dirs, last, movegen, lin, shift = make_workload(n, rng)
    cosv = np.full(4, math.cos(GOLDEN))
    sinv = np.full(4, math.sin(GOLDEN))
    queries = rng.uniform(-5, 5, size=(n // 4, 3))

    rows = {}
    rows["expand_stationary"] = median_time(
        lambda: backend.expand_stationary(points, last, lin, shift, movegen))
    rows["expand_peripatetic_3d"] = median_time(
        lambda: backend.expand_peripatetic_3d(points, base, dirs, last,
                                              cosv, sinv, movegen))

    def dedup_run():
        d = backend.Dedup(3, 1e-3)
        d.add_batch(points)

    rows["dedup_add_batch"] = median_time(dedup_run)

    index = backend.GridIndex(points)
    rows["grid_nearest_batch"] = median_time(lambda: index.nearest_batch(queries))
    return rows


def bench_orbit(name, n_points):
    gens = make_generators(2, [(Point2(0.0, 0.0), Angle.raw(GOLDEN)),
                               (Point2(1.0, 0.0), Angle.raw(GOLDEN))])
    budget = SamplerBudget(max_len=10, max_exp=6, max_points=n_points)

    # orbit resolves kernels through rotorb.kernels module attributes, so
    # swap them for the duration of the timing
    import rotorb.kernels as K
    saved = (K.expand_stationary, K.expand_peripatetic_2d,
             K.expand_peripatetic_3d, K.Dedup, K.GridIndex, K.BACKEND_NAME)
    mod = load(name)
    K.expand_stationary = mod.expand_stationary
    K.expand_peripatetic_2d = mod.expand_peripatetic_2d
    K.expand_peripatetic_3d = mod.expand_peripatetic_3d
    K.Dedup = mod.Dedup
    K.GridIndex = mod.GridIndex
    K.BACKEND_NAME = mod.BACKEND_NAME
    try:
        t = median_time(lambda: bfs_orbit(gens, np.array([0.5, 0.5]),
                                          "peripatetic", budget), repeats=3)
    finally:
        (K.expand_stationary, K.expand_peripatetic_2d, K.expand_peripatetic_3d,
         K.Dedup, K.GridIndex, K.BACKEND_NAME) = saved
    return t


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    rng = np.random.default_rng(0)

    backends = {}
    backends["python"] = load("python")
    try:
        backends["compiled"] = load("compiled")
    except ImportError:
        print("compiled backend not built; showing python only")

    # sanity: identical outputs before timing anything
    if len(backends) == 2:
        pts, base, dirs, last, movegen, lin, shift = make_workload(512, rng)
        a = backends["python"].expand_stationary(pts, last, lin, shift, movegen)
        b = backends["compiled"].expand_stationary(pts, last, lin, shift, movegen)
        assert all(np.allclose(x, y, atol=1e-12) for x, y in zip(a, b))

    results = {name: bench_backend(mod, n, np.random.default_rng(1))
               for name, mod in backends.items()}
    orbit_times = {name: bench_orbit(name, 50000) for name in backends}

    names = list(backends)
    print(f"\nworkload: {n} frontier points, 4 moves; orbit: 50k point budget")
    header = f"{'kernel':<24}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    keys = list(results[names[0]]) + ["bfs_orbit (end-to-end)"]
    for key in keys:
        if key == "bfs_orbit (end-to-end)":
            vals = [orbit_times[n] for n in names]
        else:
            vals = [results[n][key] for n in names]
        line = f"{key:<24}" + "".join(f"{v * 1e3:>10.2f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{vals[0] / vals[1]:>9.1f}x" if names[1] == "compiled" \
                else f"{vals[1] / vals[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
