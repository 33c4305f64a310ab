import random

import numpy as np
import pytest

from latsim.credentials import CredentialAssignment
from latsim.generate import generate_synthetic
from latsim.graph import from_edges


@pytest.fixture(scope="session")
def gs_graph():
    """100-node synthetic at the small-enterprise calibration point."""
    return generate_synthetic(100, density=0.028, clustering=0.23, seed=2024)


def random_digraph(rnd: random.Random, n: int, p: float):
    """Erdos-Renyi-style directed edge set from a stdlib RNG."""
    edges = [
        (u, v)
        for u in range(n)
        for v in range(n)
        if u != v and rnd.random() < p
    ]
    if not edges:  # never hand back an empty graph
        u, v = rnd.sample(range(n), 2)
        edges = [(u, v)]
    return edges


def graph_of(n, edges):
    return from_edges(n, edges)


def manual_assignment(levels, dc, hygiene="custom", seed=0):
    """Hand-built credential distribution for graphs too small to sample."""
    levels = np.asarray(levels, dtype=np.int8)
    start_set = np.flatnonzero(levels == 1)
    return CredentialAssignment(
        levels=levels,
        dc=int(dc),
        start_set=start_set[start_set != int(dc)],
        hygiene=hygiene,
        seed=seed,
        dc_policy="manual",
    )
