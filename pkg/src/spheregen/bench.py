"""Benchmark the compiled geometry core against the pure-NumPy fallback.

Run with:  python -m spheregen.bench [--n 2048] [--repeats 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from .geometry import _numpy_impl

try:
    from .geometry import _core
except ImportError:
    _core = None


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2048, help="points per cloud")
    ap.add_argument("--k", type=int, default=20)
    ap.add_argument("--pairs", type=int, default=8,
                    help="clouds per set for the pairwise Chamfer case")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    a = rng.standard_normal((args.n, 3))
    b = rng.standard_normal((args.n, 3))
    feats = rng.standard_normal((args.n, 64))
    set_a = [np.ascontiguousarray(rng.standard_normal((args.n, 3)))
             for _ in range(args.pairs)]
    set_b = [np.ascontiguousarray(rng.standard_normal((args.n, 3)))
             for _ in range(args.pairs)]

    cases = [
        (f"chamfer n={args.n}", lambda impl: impl.chamfer(a, b)),
        (f"knn n={args.n} k={args.k} c=64", lambda impl: impl.knn_indices(feats, args.k)),
        (f"pairwise_chamfer {args.pairs}x{args.pairs} n={args.n}",
         lambda impl: impl.pairwise_chamfer(set_a, set_b)),
    ]

    backends = [("numpy", _numpy_impl)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("compiled core not available; showing numpy only")

    header = f"{'case':<42}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, call in cases:
        times = [_time(lambda impl=impl: call(impl), args.repeats)
                 for _, impl in backends]
        row = f"{label:<42}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)

    # the two backends must agree on results, not just speed
    if _core is not None:
        assert abs(_core.chamfer(a, b) - _numpy_impl.chamfer(a, b)) < 1e-9
        assert np.array_equal(_core.knn_indices(feats, args.k),
                              _numpy_impl.knn_indices(feats, args.k))
        print("backend agreement checks passed")


if __name__ == "__main__":
    main()
