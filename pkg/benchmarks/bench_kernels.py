"""Time the compiled and numpy KKT Newton kernels on the reference multistart batch.

Usage: ``python3 benchmarks/bench_kernels.py [--starts N] [--repeat R]``
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from pentapod_sing import kernels
from pentapod_sing.distance import MultistartOptions, _default_box, _metric_starts, general_problem
from pentapod_sing.pentapod import extract_F
from pentapod_sing.reference import REFERENCE_ARCHITECTURE, REFERENCE_POSE


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=5000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    arch, g = REFERENCE_ARCHITECTURE, REFERENCE_POSE
    model = extract_F(arch)
    problem = general_problem(model, arch, g)
    opts = MultistartOptions(starts=args.starts, seed=args.seed)
    Z = _metric_starts(problem, g, opts, _default_box(model, arch, g))
    X0 = problem.initial_multipliers(Z)

    results = {}
    for name in kernels.available_backends():
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            X, status, _ = problem.solve_batch(X0, backend=name)
            best = min(best, time.perf_counter() - t0)
        results[name] = (best, X, status)
        conv = int((status == kernels.CONVERGED).sum())
        print(f"{name:7s} {best:8.3f} s  {args.starts / best:10.0f} starts/s  converged {conv}/{args.starts}")

    if len(results) == 2:
        (tc, Xc, sc), (tp, Xp, sp) = results["cython"], results["python"]
        both = (sc == kernels.CONVERGED) & (sp == kernels.CONVERGED)
        # Starts near basin boundaries may reach different roots under different rounding.
        same = np.abs(Xc[both] - Xp[both]).max(axis=1) < 1e-6
        print(f"speedup {tp / tc:.1f}x  status agreement {np.mean(sc == sp):.4f}  "
              f"same root on {same.mean():.4f} of jointly converged starts")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
