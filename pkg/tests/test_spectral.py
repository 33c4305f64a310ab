import random

import numpy as np
import pytest

from latsim.errors import ConvergenceError
from latsim.graph import from_edges, undirected_view
from latsim.spectral import centralities, leading_eigenpair, pagerank

from .conftest import random_digraph
from .oracles import dense_leading_eigenpair, dense_pagerank, eigh_spectral_gap


def test_pagerank_matches_dense_solve():
    rnd = random.Random(2)
    for _ in range(25):
        n = rnd.randint(3, 20)
        g = from_edges(n, random_digraph(rnd, n, 0.25))
        r = pagerank(g)
        ref = dense_pagerank(g)
        assert np.max(np.abs(r - ref)) < 1e-6


def test_pagerank_is_a_distribution():
    rnd = random.Random(3)
    g = from_edges(12, random_digraph(rnd, 12, 0.2))
    r = pagerank(g)
    assert r.sum() == pytest.approx(1.0, abs=1e-9)
    assert (r >= 0).all()


def test_pagerank_handles_dangling_nodes():
    # node 2 has no out-edges: its mass must spread uniformly
    g = from_edges(3, [(0, 1), (0, 2), (1, 2)])
    r = pagerank(g)
    ref = dense_pagerank(g)
    assert np.max(np.abs(r - ref)) < 1e-8
    assert r.sum() == pytest.approx(1.0, abs=1e-9)


def test_pagerank_uniform_on_cycle():
    n = 5
    g = from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    r = pagerank(g)
    assert np.max(np.abs(r - 1.0 / n)) < 1e-8


def test_pagerank_convergence_error():
    rnd = random.Random(4)
    g = from_edges(30, random_digraph(rnd, 30, 0.15))
    with pytest.raises(ConvergenceError) as exc:
        pagerank(g, max_iters=2)
    assert exc.value.residual is not None and exc.value.residual > 0


def test_eigenpair_matches_dense_reference():
    rnd = random.Random(5)
    checked = 0
    while checked < 20:
        n = rnd.randint(4, 20)
        g = undirected_view(from_edges(n, random_digraph(rnd, n, 0.3)))
        if g.m == 0 or eigh_spectral_gap(g) < 1e-3:
            continue
        eig = leading_eigenpair(g)
        lam_ref, u_ref = dense_leading_eigenpair(g)
        assert eig.value == pytest.approx(lam_ref, abs=1e-6)
        if u_ref.sum() < 0:
            u_ref = -u_ref
        assert np.max(np.abs(eig.vector - np.abs(u_ref))) < 1e-5
        checked += 1


def test_eigenpair_star_graph_closed_form():
    # K_{1,4}: leading eigenvalue sqrt(4) = 2
    edges = [(0, i) for i in range(1, 5)]
    g = undirected_view(from_edges(5, edges))
    eig = leading_eigenpair(g)
    assert eig.value == pytest.approx(2.0, abs=1e-8)
    assert eig.vector[0] == pytest.approx(np.sqrt(0.5), abs=1e-6)


def test_eigenpair_bipartite_even_cycle():
    # C4 is bipartite (spectrum 2, 0, 0, -2); the shifted iteration must
    # still settle on +2 and a uniform Perron vector.
    g = undirected_view(from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    eig = leading_eigenpair(g)
    assert eig.value == pytest.approx(2.0, abs=1e-8)
    assert np.max(np.abs(eig.vector - 0.5)) < 1e-6


def test_eigenpair_nonnegative_unit_vector():
    rnd = random.Random(6)
    g = undirected_view(from_edges(15, random_digraph(rnd, 15, 0.2)))
    eig = leading_eigenpair(g)
    assert (eig.vector >= 0).all()
    assert np.linalg.norm(eig.vector) == pytest.approx(1.0, abs=1e-9)


def test_eigenpair_rejects_directed_graph():
    g = from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError, match="symmetric"):
        leading_eigenpair(g)


def test_centralities_bundle(gs_graph):
    c = centralities(gs_graph)
    assert c.pagerank.shape == (gs_graph.n,)
    assert np.array_equal(c.out_degree, gs_graph.out_degree)
    assert c.pagerank.sum() == pytest.approx(1.0, abs=1e-9)
