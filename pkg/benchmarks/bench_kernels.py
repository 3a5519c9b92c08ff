"""Compare the compiled kernels against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--n 2000] [--repeat 3]
"""
import argparse
import time

import numpy as np

import pirouette._kernels_py as kpy

try:
    import pirouette._kernels as kext
except ImportError:
    kext = None

PI = np.array([4, 2, 0], dtype=np.int64)
PJ = np.array([0, 2, 4], dtype=np.int64)
CO = np.array([-0.25, -0.5, -0.25], dtype=np.float64)
WIN = (-0.705, 0.705, -0.705, 0.705)


def bench_solves(mod, pts):
    done = 0
    for x, y in pts:
        _, _, code = mod.solve_forward(PI, PJ, CO, 1.0, x, y, *WIN,
                                       1e-12, 64, x)
        done += code == 0
    return done


def bench_orbits(mod, pts, n=200):
    done = 0
    for x, y in pts[:40]:
        _, m, _ = mod.iterate_orbit(PI, PJ, CO, 1.0, x, y, n, *WIN,
                                    1e-12, 64)
        done += m
    return done


def bench_jacobians(mod, pts):
    done = 0
    for x, y in pts[:40]:
        _, _, _, code = mod.orbit_jacobian(PI, PJ, CO, 1.0, x, y, 20,
                                           *WIN, 1e-12, 64)
        done += code == 0
    return done


def bench_spin(mod, pts, n=20000):
    angles = np.linspace(0.0, 2 * np.pi, 8, endpoint=False)
    total = 0.0
    for _ in range(8):
        total += float(np.sum(mod.spin(0.9, 0.1, -0.1, 1.2, n, angles)))
    return total


def timed(fn, mod, pts, repeat):
    best = min(measure(fn, mod, pts) for _ in range(repeat))
    return best


def measure(fn, mod, pts):
    t0 = time.perf_counter()
    fn(mod, pts)
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000,
                    help="points per solve benchmark")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(42)
    pts = rng.uniform(-0.6, 0.6, (args.n, 2))

    benches = [("forward solves", bench_solves),
               ("orbit iteration", bench_orbits),
               ("orbit jacobians", bench_jacobians),
               ("spin accumulation", bench_spin)]
    print(f"{'benchmark':<20} {'python':>10} {'cython':>10} {'speedup':>9}")
    for name, fn in benches:
        tp = timed(fn, kpy, pts, args.repeat)
        if kext is None:
            print(f"{name:<20} {tp * 1e3:>8.1f}ms {'n/a':>10} {'':>9}")
            continue
        tc = timed(fn, kext, pts, args.repeat)
        print(f"{name:<20} {tp * 1e3:>8.1f}ms {tc * 1e3:>8.1f}ms "
              f"{tp / tc:>8.1f}x")
    if kext is None:
        print("compiled kernels unavailable; fallback timings only")


if __name__ == "__main__":
    main()
