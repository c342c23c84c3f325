"""Benchmark the compiled training kernel against the pure-numpy fallback.

Runs the same seeded presentation loop through both kernels, checks that
the resulting weights agree, and reports wall times.

    python3 benchmarks/bench_som.py [--rows 20] [--cols 20] [--dim 36]
                                    [--n 2000] [--epochs 5]
"""

import argparse
import importlib
import time

import numpy as np

from somaction.som import create_som, grid_distances


def load_kernels():
    kernels = {"python": importlib.import_module(
        "somaction.som._kernels_py").run_training}
    try:
        kernels["compiled"] = importlib.import_module(
            "somaction.som._kernels").run_training
    except ImportError:
        print("compiled kernel not available; benchmarking the fallback only")
    return kernels


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=20)
    ap.add_argument("--cols", type=int, default=20)
    ap.add_argument("--dim", type=int, default=36)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--epochs", type=int, default=5)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    inputs = rng.normal(size=(args.n, args.dim))
    inputs /= np.linalg.norm(inputs, axis=1, keepdims=True)

    total = args.epochs * args.n
    order = np.concatenate(
        [rng.permutation(args.n) for _ in range(args.epochs)]).astype(np.int64)
    t = np.arange(total, dtype=np.float64) / total
    alphas = 0.1 * (0.01 / 0.1) ** t
    sigmas = 10.0 * (1.0 / 10.0) ** t
    gd = grid_distances(args.rows, args.cols)

    print(f"grid {args.rows}x{args.cols}, dim {args.dim}, "
          f"{total} presentations, best of {args.repeats}")
    results = {}
    for name, kernel in load_kernels().items():
        best, weights = float("inf"), None
        for _ in range(args.repeats):
            m = create_som(args.rows, args.cols, args.dim, seed=1)
            t0 = time.perf_counter()
            kernel(m.weights, inputs, order, alphas, sigmas, gd, False)
            best = min(best, time.perf_counter() - t0)
            weights = m.weights
        results[name] = (best, weights)
        print(f"  {name:>8}: {best:.3f}s  "
              f"({total / best:,.0f} presentations/s)")

    if len(results) == 2:
        dev = np.abs(results["compiled"][1] - results["python"][1]).max()
        speedup = results["python"][0] / results["compiled"][0]
        print(f"  speedup {speedup:.1f}x; max weight deviation {dev:.2e}")
        assert dev < 1e-12, "kernels disagree"


if __name__ == "__main__":
    main()
