"""Time the compiled and pure-Python K-Bessel kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from aqe import kernels


def cases():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.05, 40.0, 20000)
    coeffs = rng.normal(size=200)
    px = rng.uniform(-0.5, 0.5, 2000)
    py = rng.uniform(0.8, 3.0, 2000)
    return {
        "kscaled t=9.53, 20000 points": lambda b: kernels.kscaled(9.5337, x, b),
        "kscaled t=30, 20000 points": lambda b: kernels.kscaled(30.0, x, b),
        "maass_sum 200 terms, 2000 points": lambda b: kernels.maass_sum(9.5337, coeffs, px, py, True, backend=b),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["python"] + (["cython"] if kernels._compiled is not None else [])
    print(f"{'case':36s} " + " ".join(f"{b:>10s}" for b in backends) + "    speedup  max_rel_diff")
    for name, fn in cases().items():
        times = {b: min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat)) for b in backends}
        line = f"{name:36s} " + " ".join(f"{times[b]:9.4f}s" for b in backends)
        if "cython" in times:
            a, p = fn("cython"), fn("python")
            diff = float(np.max(np.abs(a - p) / np.maximum(np.abs(p), 1e-300)))
            line += f"  {times['python'] / times['cython']:8.1f}x  {diff:.2e}"
        print(line)


if __name__ == "__main__":
    main()
