"""Directed authentication graphs: construction, stats, and edge-list IO.

Machines are nodes; an edge u -> v records that at least one authentication
event originated at u and landed at v.  Graphs are simple (no self-loops,
no parallel edges) and nodes carry dense integer ids ``0..n-1``; original
string labels, when present, are kept for round-tripping to disk.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from functools import cached_property
from io import TextIOBase
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from .errors import DataError

logger = logging.getLogger(__name__)

EDGE_LIST_HEADER = ("source", "destination")


@dataclass(frozen=True)
class GraphStats:
    """Summary statistics of an authentication graph."""

    n: int
    m: int
    density: float
    clustering: float
    mean_out_degree: float


@dataclass(frozen=True)
class AuthGraph:
    """Immutable directed graph in CSR form (both adjacency directions).

    ``out_indices[out_indptr[v]:out_indptr[v+1]]`` are the successors of
    ``v`` in ascending order; the ``in_*`` pair mirrors that for
    predecessors.
    """

    n: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    labels: tuple[str, ...] | None = None

    @property
    def m(self) -> int:
        return int(self.out_indices.shape[0])

    def successors(self, v: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def predecessors(self, v: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    @cached_property
    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    @cached_property
    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def label_of(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield (u, v) pairs in ascending (u, v) order."""
        for u in range(self.n):
            for v in self.successors(u):
                yield u, int(v)

    @cached_property
    def csr(self) -> sp.csr_matrix:
        """0/1 adjacency matrix A with A[u, v] = 1 for each edge u -> v."""
        data = np.ones(self.m, dtype=np.float64)
        return sp.csr_matrix(
            (data, self.out_indices.astype(np.int32), self.out_indptr.astype(np.int32)),
            shape=(self.n, self.n),
        )

    @cached_property
    def is_symmetric(self) -> bool:
        return (
            np.array_equal(self.out_indptr, self.in_indptr)
            and np.array_equal(self.out_indices, self.in_indices)
        )


def from_edges(
    n: int,
    edges: Iterable[tuple[int, int]],
    labels: tuple[str, ...] | None = None,
) -> AuthGraph:
    """Build an AuthGraph from integer edge pairs.

    Self-loops are dropped and duplicate edges collapsed, so any iterable
    of observed (src, dst) id pairs is acceptable.
    """
    if n < 1:
        raise ValueError("graph needs at least one node")
    if labels is not None and len(labels) != n:
        raise ValueError("labels length must equal n")
    arr = np.asarray(
        [(u, v) for u, v in edges if u != v], dtype=np.int64
    ).reshape(-1, 2)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        raise ValueError("edge endpoint out of range")
    arr = np.unique(arr, axis=0) if arr.size else arr
    src, dst = arr[:, 0], arr[:, 1]

    out_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(out_indptr, src + 1, 1)
    np.cumsum(out_indptr, out=out_indptr)
    out_indices = dst.copy()  # np.unique sorted by (src, dst): rows ordered

    order = np.lexsort((src, dst))
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(in_indptr, dst + 1, 1)
    np.cumsum(in_indptr, out=in_indptr)
    in_indices = src[order]

    return AuthGraph(n, out_indptr, out_indices, in_indptr, in_indices, labels)


def build_from_edge_list(records: Iterable[tuple[str, str]]) -> AuthGraph:
    """Intern string labels to dense ids (first-seen order) and build.

    Self-loop records are dropped (their endpoints are still interned as
    observed machines).  Raises :class:`DataError` if no edge survives.
    """
    ids: dict[str, int] = {}
    edges: list[tuple[int, int]] = []

    def intern(label: str) -> int:
        ix = ids.get(label)
        if ix is None:
            ix = len(ids)
            ids[label] = ix
        return ix

    for src, dst in records:
        u, v = intern(src), intern(dst)
        if u != v:
            edges.append((u, v))
    if not edges:
        raise DataError("empty authentication log")
    return from_edges(len(ids), edges, labels=tuple(ids))


def stats(g: AuthGraph) -> GraphStats:
    """Density, average local clustering (undirected view), mean out-degree."""
    if g.n < 2:
        raise ValueError("stats need at least two nodes")
    density = g.m / (g.n * (g.n - 1))
    return GraphStats(
        n=g.n,
        m=g.m,
        density=density,
        clustering=average_clustering(g),
        mean_out_degree=g.m / g.n,
    )


def undirected_view(g: AuthGraph) -> AuthGraph:
    """Symmetric closure: every edge present in both directions."""
    both = [(u, v) for u, v in g.edges()]
    both += [(v, u) for u, v in g.edges()]
    return from_edges(g.n, both, labels=g.labels)


def _neighbor_sets(g: AuthGraph) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(g.n)]
    for u, v in g.edges():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def average_clustering(g: AuthGraph) -> float:
    """Mean local clustering coefficient over all nodes (undirected view).

    Nodes with fewer than two neighbors contribute 0.
    """
    adj = _neighbor_sets(g)
    total = 0.0
    for v in range(g.n):
        k = len(adj[v])
        if k < 2:
            continue
        links = sum(len(adj[v] & adj[u]) for u in adj[v]) // 2
        total += 2.0 * links / (k * (k - 1))
    return total / g.n


def write_edge_list(
    g: AuthGraph, path: str | Path, comment: str | None = None
) -> None:
    """Write the canonical edge-list CSV (header ``source,destination``).

    ``comment`` lines (run provenance) are emitted first, '#'-prefixed;
    readers skip them.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            for line in comment.splitlines():
                fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_LIST_HEADER)
        for u, v in g.edges():
            writer.writerow((g.label_of(u), g.label_of(v)))


def read_edge_list(source: str | Path | TextIOBase) -> AuthGraph:
    """Load a graph from an edge-list CSV with header ``source,destination``."""
    if isinstance(source, TextIOBase):
        return _read_edge_list_stream(source, name="<stream>")
    with open(source, "r", encoding="utf-8", newline="") as fh:
        return _read_edge_list_stream(fh, name=str(source))


def _read_edge_list_stream(fh, name: str) -> AuthGraph:
    reader = csv.reader(line for line in fh if not line.startswith("#"))
    try:
        header = next(reader)
    except StopIteration:
        raise DataError(f"{name}: empty authentication log") from None
    if tuple(h.strip().lower() for h in header) != EDGE_LIST_HEADER:
        raise DataError(
            f"{name}: expected header 'source,destination', got {header!r}"
        )
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{name}: malformed row {row!r}")
        records.append((row[0], row[1]))
    try:
        return build_from_edge_list(records)
    except DataError as exc:
        raise DataError(f"{name}: {exc}") from None
