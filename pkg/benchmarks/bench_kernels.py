"""Time the compiled and numpy log-kernel backends on identical batches.

    python3 benchmarks/bench_kernels.py --outer 20 --inner 2000 --n 4 --repeat 5
"""

import argparse
import timeit

import numpy as np

from cmsfermions.kernels import BACKEND, log_kernel_batch
from cmsfermions.potentials import Kind, PotentialSpec


def batches(rng, outer, inner, n):
    # each outer configuration gets `inner` interlacing points in its gaps
    X = -np.sort(-rng.uniform(-5, 5, (outer, n)), axis=1)
    frac = rng.uniform(0.05, 0.95, (outer, inner, n - 1))
    XP = X[:, None, 1:] + frac * (X[:, None, :-1] - X[:, None, 1:])
    return X, XP


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outer", type=int, default=20)
    parser.add_argument("--inner", type=int, default=2000)
    parser.add_argument("--n", type=int, default=4, help="particles in the outer configuration")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(0)
    X, XP = batches(rng, args.outer, args.inner, args.n)
    print(f"default backend: {BACKEND}; {args.outer} x {args.inner} kernels, n={args.n}")
    if BACKEND != "cython":
        print("compiled core not built; only the numpy backend is timed")
    backends = ["cython", "numpy"] if BACKEND == "cython" else ["numpy"]
    for kind in (Kind.TRIG, Kind.RATIONAL, Kind.HYPERBOLIC, Kind.MORSE):
        spec = PotentialSpec(kind, lam=1.5, a=0.7, L=12.0)
        timings = {}
        for backend in backends:
            run = lambda: log_kernel_batch(spec, X, XP, backend=backend)  # noqa: E731
            timings[backend] = min(timeit.repeat(run, number=1, repeat=args.repeat))
        line = "  ".join(f"{b}={t * 1e3:8.2f} ms" for b, t in timings.items())
        if len(timings) == 2:
            ref = log_kernel_batch(spec, X, XP, backend="numpy")
            diff = np.max(np.abs(log_kernel_batch(spec, X, XP, backend="cython") - ref))
            line += f"  speedup={timings['numpy'] / timings['cython']:5.2f}x  max|diff|={diff:.1e}"
        print(f"kind {kind.value:>3}: {line}")


if __name__ == "__main__":
    main()
