"""Time the compiled and numpy kernels on the quadrature invariant workload.

Usage: python3 benchmarks/bench_kernels.py [--potentials 20] [--grid 48]
"""
import argparse
import time

import numpy as np

from invrec import kernels
from invrec.lattice import default_basis
from invrec.potential import random_generic
from invrec.quadrature import _batch_plan, point_major_tables


def run(impl, qs, n, repeat):
    cos_g, sin_g = point_major_tables(n)
    _, *plan = _batch_plan(qs[0].basis)
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [impl.fused_invariants(q.z.real.copy(), q.z.imag.copy(), cos_g, sin_g, *plan) for q in qs]
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--potentials", type=int, default=20)
    ap.add_argument("--grid", type=int, default=48)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    basis = default_basis()
    qs = [random_generic(basis, np.random.default_rng(s)) for s in range(args.potentials)]
    results = {}
    for name, impl in kernels.backends().items():
        t, out = run(impl, qs, args.grid, args.repeat)
        results[name] = out
        print(f"{name:7s} {t:8.3f} s  {1e3 * t / len(qs):8.2f} ms/potential")
    if len(results) == 2:
        diff = max(
            float(np.max(np.abs(a - b)))
            for pa, pb in zip(results["python"], results["cython"])
            for a, b in zip(pa, pb)
        )
        print(f"max backend difference {diff:.3e}")
    else:
        print("compiled extension not available")


if __name__ == "__main__":
    main()
