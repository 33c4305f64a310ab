"""Centrality and spectral routines used by attack and defense strategies.

Everything here is a power-iteration scheme over the sparse adjacency
structure; dense linear algebra is reserved for test oracles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConvergenceError
from .graph import AuthGraph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenPair:
    """Leading eigenvalue and unit eigenvector of a symmetric adjacency."""

    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class Centralities:
    """Per-node scores the attack strategies weight their draws by."""

    pagerank: np.ndarray
    out_degree: np.ndarray


def pagerank(
    g: AuthGraph,
    teleport: float = 0.15,
    tol: float = 1e-8,
    max_iters: int = 200,
) -> np.ndarray:
    """PageRank by power iteration.

    Dangling mass (nodes without successors) is redistributed uniformly
    over all nodes each step, keeping total mass at exactly 1.

    Args:
        g: directed graph.
        teleport: restart probability (damping factor is ``1 - teleport``).
        tol: L1 convergence threshold on successive iterates.
        max_iters: iteration budget.

    Returns:
        Probability vector of shape (n,) summing to 1.

    Raises:
        ConvergenceError: if the L1 residual is still above ``tol`` after
            ``max_iters`` iterations.
    """
    n = g.n
    if n == 1:
        return np.ones(1)
    damping = 1.0 - teleport
    outdeg = g.out_degree.astype(np.float64)
    dangling = outdeg == 0
    # Column-stochastic walk matrix restricted to non-dangling columns:
    # M[v, u] = 1/outdeg(u) for each edge u -> v.
    src = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.out_indptr))
    M = sp.csr_matrix(
        (1.0 / outdeg[src], (g.out_indices, src)), shape=(n, n)
    )
    r = np.full(n, 1.0 / n)
    base = teleport / n
    residual = float("inf")
    for _ in range(max_iters):
        spread = M @ r + r[dangling].sum() / n
        r_next = base + damping * spread
        assert abs(r_next.sum() - 1.0) < 1e-9, "pagerank mass leaked"
        residual = float(np.abs(r_next - r).sum())
        r = r_next
        if residual <= tol:
            return r
    raise ConvergenceError(
        f"pagerank: residual {residual:.3e} > {tol:.1e} "
        f"after {max_iters} iterations",
        residual=residual,
    )


def leading_eigenpair(
    g: AuthGraph,
    tol: float = 1e-8,
    max_iters: int = 1000,
) -> EigenPair:
    """Dominant eigenpair of a symmetric adjacency matrix.

    Power iteration on A + I (the unit shift keeps the dominant eigenvalue
    simple even on bipartite components, where plain iteration on A
    oscillates); the reported eigenvalue and residual refer to A itself.
    The returned vector is the non-negative Perron vector with unit
    2-norm.

    Raises:
        ValueError: if the graph is not symmetric or has no edges.
        ConvergenceError: if the residual stays above ``tol * value``.
    """
    if not g.is_symmetric:
        raise ValueError("leading_eigenpair expects a symmetric graph")
    if g.m == 0:
        raise ValueError("leading_eigenpair needs at least one edge")
    A = g.csr
    n = g.n
    u = np.full(n, 1.0 / np.sqrt(n))
    lam = 0.0
    residual = float("inf")
    for _ in range(max_iters):
        w = A @ u + u  # (A + I) u
        norm = np.linalg.norm(w)
        u = w / norm
        Au = A @ u
        lam = float(u @ Au)
        residual = float(np.linalg.norm(Au - lam * u))
        if residual <= tol * max(lam, 1e-300):
            u = np.maximum(u, 0.0)  # clear fp dust; Perron vector is >= 0
            u /= np.linalg.norm(u)
            return EigenPair(value=lam, vector=u)
    raise ConvergenceError(
        f"leading eigenpair: residual {residual:.3e} > "
        f"{tol:.1e} * {lam:.6f} after {max_iters} iterations",
        residual=residual,
    )


def degree_vector(g: AuthGraph) -> np.ndarray:
    """Out-degree of every node (the diagonal of A @ 1)."""
    return g.out_degree.astype(np.int64)


def centralities(g: AuthGraph, teleport: float = 0.15) -> Centralities:
    return Centralities(
        pagerank=pagerank(g, teleport=teleport),
        out_degree=degree_vector(g),
    )
