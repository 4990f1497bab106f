"""Time the compiled and numpy kernel backends on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N] [--m 16]

Each kernel is run on both backends, outputs are checked for agreement and the
best-of-N wall time is reported with the speedup of the compiled version.
"""
import argparse
import sys
import timeit

import numpy as np

from vidsal import kernels


def cases(m):
    rng = np.random.default_rng(0)
    xs, ys = rng.uniform(0, 320, 240), rng.uniform(0, 240, 240)
    w = rng.uniform(0, 1, 240)
    stack = rng.random((8, 320 * 320))
    stack /= stack.sum(axis=1, keepdims=True)
    sim = rng.random((m, m))
    sim = (sim + sim.T) / 2
    np.fill_diagonal(sim, 1.0)
    return {
        "density_accumulate 320x240, 240 fixations": (kernels.density_accumulate, (xs, ys, w, 320, 240, 9.6)),
        "pairwise_intersection 8 maps at 320x320": (kernels.pairwise_intersection, (stack,)),
        f"enumerate_objectives M={m} ({2 ** m - 1} masks)": (kernels.enumerate_objectives, (sim, 0.2, 1e-8)),
    }


def best_time(fn, args, backend, repeat):
    return min(timeit.repeat(lambda: fn(*args, backend=backend), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--m", type=int, default=16, help="predictor count for the enumeration kernel")
    args = ap.parse_args(argv)

    try:
        kernels.get_backend("cython")
    except ImportError:
        print("compiled backend not built; run `pip install -e . --no-build-isolation` first")
        return 1

    print(f"default backend: {kernels.BACKEND}")
    print(f"{'kernel':48s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, (fn, fargs) in cases(args.m).items():
        a = fn(*fargs, backend="python")
        b = fn(*fargs, backend="cython")
        if not np.allclose(a, b, rtol=1e-10, atol=1e-12):
            print(f"{name}: backends disagree (max diff {np.max(np.abs(a - b)):.3g})")
            return 1
        tp = best_time(fn, fargs, "python", args.repeat)
        tc = best_time(fn, fargs, "cython", args.repeat)
        print(f"{name:48s} {tp * 1e3:8.2f}ms {tc * 1e3:8.2f}ms {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
