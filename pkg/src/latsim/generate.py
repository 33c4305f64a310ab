"""Calibrated synthetic authentication graphs.

The generator targets the two summary statistics that drive intrusion
dynamics: directed density (hit exactly, by construction) and average
local clustering of the undirected view (hit within a tolerance band by
rewiring).  Build order:

1. a random spanning arborescence over a shuffled node order (these
   n-1 edges are protected from rewiring, so the graph stays weakly
   connected no matter what later phases do);
2. preferential attachment of the remaining edges — endpoints drawn
   degree-proportionally, which produces the hub-heavy profile real
   authentication graphs show;
3. clustering adjustment: edge swaps that close triangles among common
   neighbors (to raise clustering) or break triangle-heavy edges (to
   lower it), tracked incrementally so each move is O(degree).

Edge count never changes after phase 2, so density stays exact.
"""

from __future__ import annotations

import logging

from .errors import ConvergenceError, GenerationError
from .graph import AuthGraph, from_edges
from .rng import DOMAIN_GENERATE, Stream, derive

logger = logging.getLogger(__name__)

# Inner tolerance the rewiring loop aims for; the contract band is ±0.1.
_TARGET_TOL = 0.035
_BAND = 0.1


class _Rewirer:
    """Directed edge set with incremental clustering bookkeeping."""

    def __init__(self, n: int):
        self.n = n
        self.edges: list[tuple[int, int]] = []
        self.eindex: dict[tuple[int, int], int] = {}
        self.adj: list[set[int]] = [set() for _ in range(n)]  # undirected
        self.tri = [0] * n  # triangles through each node
        self.deg = [0] * n  # undirected degree
        self.csum = 0.0  # sum of local clustering coefficients

    # -- clustering terms ------------------------------------------------
    def _term(self, v: int) -> float:
        k = self.deg[v]
        if k < 2:
            return 0.0
        return 2.0 * self.tri[v] / (k * (k - 1))

    def clustering(self) -> float:
        return self.csum / self.n

    def recompute(self) -> None:
        """Full recount (washes float drift; also used as a debug check)."""
        self.csum = 0.0
        for v in range(self.n):
            self.csum += self._term(v)

    # -- edge operations -------------------------------------------------
    def has_directed(self, u: int, v: int) -> bool:
        return (u, v) in self.eindex

    def add_directed(self, u: int, v: int) -> None:
        assert u != v and (u, v) not in self.eindex
        self.eindex[(u, v)] = len(self.edges)
        self.edges.append((u, v))
        if v not in self.adj[u]:
            self._link(u, v)

    def remove_directed(self, u: int, v: int) -> None:
        ix = self.eindex.pop((u, v))
        last = self.edges.pop()
        if ix < len(self.edges):
            self.edges[ix] = last
            self.eindex[last] = ix
        if (v, u) not in self.eindex:
            self._unlink(u, v)

    def _link(self, u: int, v: int) -> None:
        common = self.adj[u] & self.adj[v]
        touched = {u, v} | common
        old = {w: self._term(w) for w in touched}
        for w in common:
            self.tri[w] += 1
        self.tri[u] += len(common)
        self.tri[v] += len(common)
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.deg[u] += 1
        self.deg[v] += 1
        for w in touched:
            self.csum += self._term(w) - old[w]

    def _unlink(self, u: int, v: int) -> None:
        common = self.adj[u] & self.adj[v]  # triangles broken with u-v
        touched = {u, v} | common
        old = {w: self._term(w) for w in touched}
        for w in common:
            self.tri[w] -= 1
        self.tri[u] -= len(common)
        self.tri[v] -= len(common)
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self.deg[u] -= 1
        self.deg[v] -= 1
        for w in touched:
            self.csum += self._term(w) - old[w]

    def common_count(self, u: int, v: int) -> int:
        return len(self.adj[u] & self.adj[v])


def generate_synthetic(
    n: int,
    density: float,
    clustering: float,
    seed: int,
    max_moves: int | None = None,
) -> AuthGraph:
    """Generate a weakly connected directed graph with calibrated stats.

    Args:
        n: node count (>= 10).
        density: target directed density; the edge count is pinned to
            ``floor(density * n * (n - 1))`` exactly.
        clustering: target average local clustering of the undirected
            view, achieved within ±0.1 (the rewiring loop aims tighter).
        seed: generation stream seed.
        max_moves: rewiring budget override (mostly for tests).

    Raises:
        GenerationError: if the requested statistics are infeasible.
        ConvergenceError: if the rewiring budget runs out with clustering
            outside the tolerance band.
    """
    if n < 10:
        raise GenerationError("need at least 10 nodes")
    m = int(density * n * (n - 1))
    if m < n - 1:
        raise GenerationError(
            f"density {density} gives {m} edges; {n - 1} needed for connectivity"
        )
    if m > n * (n - 1):
        raise GenerationError("density above 1 is impossible")
    if not 0.0 <= clustering <= 1.0:
        raise GenerationError("clustering target must be in [0, 1]")

    stream = Stream(derive(seed, DOMAIN_GENERATE))
    rw = _Rewirer(n)

    # Phase 1: spanning arborescence over a shuffled order (protected).
    order = list(range(n))
    stream.shuffle(order)
    protected: set[tuple[int, int]] = set()
    # Endpoint pool for degree-proportional draws: one base entry per seen
    # node (smoothing), one more per incident edge.
    pool: list[int] = [order[0]]
    for i in range(1, n):
        child = order[i]
        parent = pool[stream.randrange(len(pool))]
        edge = (parent, child) if stream.random() < 0.5 else (child, parent)
        rw.add_directed(*edge)
        protected.add(edge)
        pool.append(child)
        pool.append(parent)
        pool.append(child)

    # Phase 2: preferential attachment for the remaining edges.
    extra = m - (n - 1)
    for _ in range(extra):
        placed = False
        for _attempt in range(200):
            a = pool[stream.randrange(len(pool))]
            b = pool[stream.randrange(len(pool))]
            if a != b and not rw.has_directed(a, b):
                rw.add_directed(a, b)
                pool.append(a)
                pool.append(b)
                placed = True
                break
        if not placed:
            # Dense regime: scan for any absent pair (ascending order).
            for u in range(n):
                for v in range(n):
                    if u != v and not rw.has_directed(u, v):
                        rw.add_directed(u, v)
                        placed = True
                        break
                if placed:
                    break
            if not placed:
                raise GenerationError("graph is complete; cannot add more edges")

    # Phase 3: clustering adjustment by edge swaps.
    if max_moves is None:
        max_moves = 60 * m + 20_000
    moves = 0
    stuck = 0
    while moves < max_moves:
        c = rw.clustering()
        if abs(c - clustering) <= _TARGET_TOL:
            break
        ok = (
            _raise_move(rw, stream, protected)
            if c < clustering
            else _lower_move(rw, stream, protected)
        )
        moves += 1
        stuck = 0 if ok else stuck + 1
        if stuck >= 400:
            break  # no applicable swaps left
        if moves % 4096 == 0:
            rw.recompute()

    rw.recompute()
    c = rw.clustering()
    if abs(c - clustering) > _BAND:
        raise ConvergenceError(
            f"clustering {c:.3f} outside ±{_BAND} of target {clustering:.3f} "
            f"after {moves} moves",
            residual=abs(c - clustering),
        )
    logger.info(
        "generated n=%d m=%d clustering=%.3f (target %.3f) in %d moves",
        n, m, c, clustering, moves,
    )
    g = from_edges(n, rw.edges)
    assert g.m == m, "edge count drifted during rewiring"
    return g


def _pick_removal(
    rw: _Rewirer,
    stream: Stream,
    protected: set[tuple[int, int]],
    prefer_light: bool,
    tries: int = 12,
) -> tuple[int, int] | None:
    """A removable directed edge; light = few triangles lost on removal."""
    best = None
    best_score = None
    for _ in range(tries):
        u, v = rw.edges[stream.randrange(len(rw.edges))]
        if (u, v) in protected:
            continue
        if rw.has_directed(v, u):
            # Reverse direction stays: removal loses no triangles at all.
            score = -1
        else:
            score = rw.common_count(u, v)
        if not prefer_light:
            score = -score
        if best_score is None or score < best_score:
            best, best_score = (u, v), score
            if prefer_light and score == -1:
                break
    return best


def _raise_move(
    rw: _Rewirer, stream: Stream, protected: set[tuple[int, int]]
) -> bool:
    """Close a triangle: link two unlinked neighbors of a common node."""
    for _ in range(30):
        v = stream.randrange(rw.n)
        if rw.deg[v] < 2:
            continue
        nbrs = sorted(rw.adj[v])
        x = nbrs[stream.randrange(len(nbrs))]
        y = nbrs[stream.randrange(len(nbrs))]
        if x == y or y in rw.adj[x]:
            continue
        removal = _pick_removal(rw, stream, protected, prefer_light=True)
        if removal is None:
            return False
        if removal in ((x, y), (y, x)):
            continue
        edge = (x, y) if stream.random() < 0.5 else (y, x)
        rw.remove_directed(*removal)
        rw.add_directed(*edge)
        return True
    return False


def _lower_move(
    rw: _Rewirer, stream: Stream, protected: set[tuple[int, int]]
) -> bool:
    """Break a triangle-heavy edge; spend the slot on a non-adjacent pair."""
    removal = _pick_removal(rw, stream, protected, prefer_light=False)
    if removal is None:
        return False
    if rw.common_count(*removal) == 0 and not rw.has_directed(
        removal[1], removal[0]
    ):
        return False  # nothing to gain: removal breaks no triangle
    for _ in range(60):
        a = stream.randrange(rw.n)
        b = stream.randrange(rw.n)
        if a == b or b in rw.adj[a] or rw.has_directed(a, b):
            continue
        rw.remove_directed(*removal)
        rw.add_directed(a, b)
        return True
    return False
