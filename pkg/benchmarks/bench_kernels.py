"""Time the compiled and numpy kernel backends on the same inputs.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from raysep import kernels

C_ATTRACT = -1 - np.exp(-1)
C_SIEGEL = complex(0.737368878078319901518240381368, 4.55871237171245679703811745804)


def cases():
    rng = np.random.default_rng(0)
    grid = (np.linspace(-3, 3, 400)[None, :] + 1j * np.linspace(-3, 3, 300)[:, None]).ravel()
    seeds = rng.uniform(-4, 4, 20000) + 1j * rng.uniform(-8, 8, 20000)
    ring = 2j * np.pi * 0.6180339887 + 0.8 * np.exp(2j * np.pi * np.arange(256) / 256)
    poly = rng.normal(size=2000).cumsum() + 1j * rng.normal(size=2000).cumsum()
    pts = rng.uniform(-20, 20, 20000) + 1j * rng.uniform(-20, 20, 20000)
    return {
        "escape_time exp 120k px": lambda k: k.escape_time(kernels.EXP, C_ATTRACT, grid, 200, 50.0),
        "newton p=2 20k seeds": lambda k: k.newton(kernels.EXP, C_ATTRACT, 2, seeds, 60, 1e-15),
        "recurrence 256 x 1e4": lambda k: k.recurrence(kernels.EXP, C_SIEGEL, 1, ring, 10_000, 1e10),
        "crossing_parity 2k edges": lambda k: k.crossing_parity(poly.real, poly.imag, pts.real, pts.imag),
        "polyline_distance 2k edges": lambda k: k.polyline_distance(poly.real, poly.imag, pts.real, pts.imag),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = kernels.backends()
    names = list(impls)
    print(f"{'kernel':30s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, run in cases().items():
        ts = [best_of(lambda k=impls[n]: run(k), args.repeat) for n in names]
        row = f"{label:30s}" + "".join(f"{t:11.4f}s" for t in ts)
        if len(ts) > 1:
            row += f"{ts[1] / ts[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
