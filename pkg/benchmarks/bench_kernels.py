"""Compiled kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py [--paths 2000] [--points 200000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from parabolic_max import _backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--points", type=int, default=200_000, help="Airy kernel evaluation points")
    p.add_argument("--paths", type=int, default=2_000, help="sampled paths per run")
    p.add_argument("--h", type=float, default=1e-4)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    if not _backend.COMPILED:
        print("compiled extension not available; only the fallback can be timed")
    backends = [("python", _backend.pure)]
    if _backend.COMPILED:
        backends.insert(0, ("compiled", _backend.kernels))

    x = np.linspace(-50.0, 50.0, args.points)
    steps = int(4.0 / args.h)
    key = 0x1234_5678_9ABC_DEF0
    cases = {
        "airy_kernel": lambda k: k.airy_kernel(x),
        "airy_kernel scaled": lambda k: k.airy_kernel(np.abs(x), True),
        "sample_paths": lambda k: k.sample_paths(key, 0, args.paths, steps, args.h, 0.5, 4, 25.0),
    }
    print(f"{'kernel':<20} {'backend':<9} {'seconds':>10} {'slowdown':>8}  max rel diff")
    for name, fn in cases.items():
        ref_time, ref_out = None, None
        for label, mod in backends:
            secs, out = best_of(lambda: fn(mod), args.repeat)
            if ref_time is None:
                ref_time, ref_out = secs, out
                diff = ""
            else:
                a, b = np.asarray(ref_out, dtype=float), np.asarray(out, dtype=float)
                diff = f"{np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)):.1e}"
            print(f"{name:<20} {label:<9} {secs:>10.4f} {secs / ref_time:>7.1f}x  {diff}")


if __name__ == "__main__":
    main()
