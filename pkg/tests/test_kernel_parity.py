"""The compiled trial kernel must be a bit-identical twin of the pure one."""

import os
import random
import subprocess
import sys

import numpy as np
import pytest

from latsim import rng
from latsim._kernel import python as kernel_py
from latsim.credentials import sample_assignment
from latsim.graph import from_edges
from latsim.spectral import centralities

from .conftest import manual_assignment, random_digraph

speedups = pytest.importorskip("latsim._kernel._speedups")


def both(g, assignment, weighted, weights, state, start=-1):
    args = (
        g.out_indptr,
        g.out_indices,
        assignment.levels,
        int(assignment.dc),
        assignment.start_set,
        weighted,
        weights,
        state,
        start,
    )
    return kernel_py.run_trial(*args), speedups.run_trial(*args)


def assert_same(py_out, c_out):
    (path_py, term_py), (path_c, term_c) = py_out, c_out
    assert term_py == term_c
    assert np.array_equal(path_py, path_c)


def test_parity_on_random_graphs_uniform():
    rnd = random.Random(42)
    for case in range(30):
        n = rnd.randint(4, 25)
        g = from_edges(n, random_digraph(rnd, n, 0.25))
        levels = [rnd.choice([1, 1, 1, 2, 3, 4]) for _ in range(n)]
        dc = rnd.randrange(n)
        levels[dc] = rnd.choice([1, 4])
        if not any(l == 1 for i, l in enumerate(levels) if i != dc):
            levels[(dc + 1) % n] = 1
        a = manual_assignment(levels, dc)
        for trial in range(40):
            state = rng.Stream.from_path(case, trial).state
            assert_same(*both(g, a, 0, np.empty(0), state))


@pytest.mark.parametrize("weight_kind", ["pagerank", "degree"])
def test_parity_weighted_draws(gs_graph, weight_kind):
    g = gs_graph
    cents = centralities(g)
    weights = (
        cents.pagerank if weight_kind == "pagerank"
        else cents.out_degree.astype(np.float64)
    )
    for seed in range(8):
        a = sample_assignment(g, "h1", seed, pagerank_scores=cents.pagerank)
        for trial in range(25):
            state = rng.Stream.from_path(seed, 5, trial).state
            assert_same(*both(g, a, 1, weights, state))


def test_parity_with_fixed_start(gs_graph):
    g = gs_graph
    cents = centralities(g)
    a = sample_assignment(g, "h2", 3, pagerank_scores=cents.pagerank)
    for trial in range(20):
        start = int(a.start_set[trial % len(a.start_set)])
        state = rng.Stream.from_path(11, trial).state
        assert_same(*both(g, a, 0, np.empty(0), state, start=start))


def test_parity_covers_every_termination():
    """Force all three outcomes through both kernels."""
    terms = set()
    # trivial success
    g = from_edges(2, [(0, 1)])
    a = manual_assignment([1, 1], dc=1)
    py_out, c_out = both(g, a, 0, np.empty(0), rng.Stream.from_path(0).state)
    assert_same(py_out, c_out)
    terms.add(py_out[1])
    # dead end: the only walkable branch runs out of successors
    g = from_edges(3, [(0, 1)])
    a = manual_assignment([1, 2, 4], dc=2)
    py_out, c_out = both(g, a, 0, np.empty(0), rng.Stream.from_path(1).state, start=0)
    assert_same(py_out, c_out)
    terms.add(py_out[1])
    # unreachable controller on a cycle: frontier survives but all are tried
    n = 12
    g = from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    levels = [1] * n
    levels[0] = 4
    a = manual_assignment(levels, dc=0)
    for seed in range(10):
        py_out, c_out = both(g, a, 0, np.empty(0), rng.Stream.from_path(2, seed).state)
        assert_same(py_out, c_out)
        terms.add(py_out[1])
    assert terms == {
        kernel_py.TERM_REACHED_DC,
        kernel_py.TERM_FRONTIER_EXHAUSTED,
        kernel_py.TERM_ALL_TRIED,
    }


def test_env_var_forces_python_backend():
    code = "from latsim._kernel import BACKEND; print(BACKEND)"
    env = dict(os.environ, LATSIM_PURE_PYTHON="1")
    forced = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert forced.stdout.strip() == "python"
    env.pop("LATSIM_PURE_PYTHON")
    free = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert free.stdout.strip() == "compiled"
