"""Compare the compiled walk kernel against the pure-Python fallback.

Runs the same batch of intrusion trials through both backends (identical
streams, identical draws) and reports trials/second plus the speedup.
Exits non-zero if the two backends disagree on any sampled path.
"""

import argparse
import importlib
import time

import numpy as np

from latsim import rng
from latsim._kernel import python as kernel_py
from latsim.credentials import sample_assignment
from latsim.generate import generate_synthetic
from latsim.spectral import centralities


def run_batch(kernel, g, assignment, seed, trials):
    no_weights = np.empty(0)
    paths = []
    t0 = time.perf_counter()
    for t in range(trials):
        stream = rng.Stream.from_path(seed, rng.DOMAIN_TRIAL, 0, t)
        path, _ = kernel.run_trial(
            g.out_indptr,
            g.out_indices,
            assignment.levels,
            int(assignment.dc),
            assignment.start_set,
            0,
            no_weights,
            stream.state,
            -1,
        )
        paths.append(path)
    return time.perf_counter() - t0, paths


def main():
    ap = argparse.ArgumentParser(
        description="benchmark the attack-trial kernels"
    )
    ap.add_argument("--n", type=int, default=2000, help="machines")
    ap.add_argument("--density", type=float, default=0.0035)
    ap.add_argument("--clustering", type=float, default=0.05)
    ap.add_argument("--hygiene", default="h2")
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    g = generate_synthetic(
        args.n, density=args.density, clustering=args.clustering, seed=args.seed
    )
    cents = centralities(g)
    assignment = sample_assignment(
        g,
        args.hygiene,
        rng.derive(args.seed, rng.DOMAIN_ASSIGNMENT, 0),
        pagerank_scores=cents.pagerank,
    )
    print(f"graph: n={g.n} m={g.m}  hygiene={args.hygiene}  trials={args.trials}")

    t_py, paths_py = run_batch(kernel_py, g, assignment, args.seed, args.trials)
    print(f"pure python : {args.trials / t_py:9.0f} trials/s  ({t_py:.2f} s)")

    try:
        speedups = importlib.import_module("latsim._kernel._speedups")
    except ImportError:
        print("compiled    : extension not built")
        return
    t_c, paths_c = run_batch(speedups, g, assignment, args.seed, args.trials)
    print(f"compiled    : {args.trials / t_c:9.0f} trials/s  ({t_c:.2f} s)")
    print(f"speedup     : {t_py / t_c:9.1f}x")

    same = all(np.array_equal(a, b) for a, b in zip(paths_py, paths_c))
    print(f"identical paths across backends: {same}")
    if not same:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
