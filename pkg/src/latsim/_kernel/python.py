"""Pure-Python trial kernel: the reference the compiled kernel must match.

A "trial" is one complete intrusion attempt: starting from a low-credential
machine, repeatedly pick the next target — either a uniform jump back to
the start set (probability 0.15) or a draw over the not-yet-tried frontier
(uniform or weight-proportional) — until the domain controller falls, the
frontier empties, or every frontier machine has been tried since the last
successful hop.

The draw protocol below (which stream primitive is consumed, in which
order) is a compatibility contract: ``_speedups.pyx`` replicates it
operation for operation so both backends produce bit-identical walks from
the same stream state.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Sequence

import numpy as np

from ..rng import Stream

JUMP_PROB = 0.15

TERM_REACHED_DC = 0
TERM_FRONTIER_EXHAUSTED = 1
TERM_ALL_TRIED = 2


def draw_next(
    stream: Stream,
    avail: Sequence[int],
    start_nodes: Sequence[int],
    weights: np.ndarray | None = None,
) -> tuple[int, bool]:
    """Draw the next target machine.

    Args:
        stream: draw stream (mutated).
        avail: candidate frontier nodes in ascending id order.
        start_nodes: the jump set, ascending.
        weights: per-node weight vector (indexed by node id) for the
            weighted strategies, or None for a uniform frontier draw.
            All-zero weight mass over ``avail`` degrades to uniform.

    Returns:
        (node, was_jump).

    Raises:
        ValueError: if both ``avail`` and ``start_nodes`` are empty.
    """
    n_avail = len(avail)
    n_jump = len(start_nodes)
    if n_avail == 0 and n_jump == 0:
        raise ValueError("no move available")
    x = stream.random()
    if n_avail == 0 or (n_jump > 0 and x < JUMP_PROB):
        return int(start_nodes[stream.randrange(n_jump)]), True
    if weights is None:
        return int(avail[stream.randrange(n_avail)]), False
    total = 0.0
    for u in avail:
        total += weights[u]
    if total <= 0.0:
        return int(avail[stream.randrange(n_avail)]), False
    target = stream.random() * total
    acc = 0.0
    for u in avail:
        acc += weights[u]
        if target < acc:
            return int(u), False
    return int(avail[-1]), False


def run_trial(
    out_indptr: np.ndarray,
    out_indices: np.ndarray,
    levels: np.ndarray,
    dc: int,
    start_nodes: np.ndarray,
    weighted: int,
    weights: np.ndarray,
    state: int,
    start: int = -1,
) -> tuple[np.ndarray, int]:
    """Run one intrusion trial; see the module docstring for the protocol.

    Args:
        out_indptr/out_indices: CSR successor structure.
        levels: per-node credential class (ints 1..4).
        dc: the domain-controller node.
        start_nodes: sorted ids of the jump/start set (non-empty).
        weighted: 0 for uniform frontier draws, 1 to use ``weights``.
        weights: per-node draw weights (ignored when ``weighted`` is 0).
        state: 64-bit stream state for this trial.
        start: fixed start node, or -1 to draw one uniformly.

    Returns:
        (path, termination) — the visited machines in order, and one of
        the TERM_* codes.
    """
    stream = Stream(state)
    if start < 0:
        start = int(start_nodes[stream.randrange(len(start_nodes))])
    collected = int(levels[start])
    path = [start]
    visited = {start}
    # CSR rows are ascending, so the initial frontier is already sorted.
    frontier = [int(w) for w in out_indices[out_indptr[start]:out_indptr[start + 1]]]
    tried: set[int] = set()
    v = start  # last *accepted* node; a rejected draw of dc must not end the walk

    while v != dc and len(frontier) > 0 and len(tried) < len(frontier):
        if tried:
            avail = [u for u in frontier if u not in tried]
        else:
            avail = frontier
        cand, _ = draw_next(
            stream, avail, start_nodes, weights if weighted else None
        )
        if levels[cand] <= collected + 1 and cand not in visited:
            tried.clear()
            pos = _index(frontier, cand)
            if pos >= 0:
                frontier.pop(pos)
            for w in out_indices[out_indptr[cand]:out_indptr[cand + 1]]:
                w = int(w)
                if _index(frontier, w) < 0:
                    insort(frontier, w)
            path.append(cand)
            visited.add(cand)
            if levels[cand] > collected:
                collected = int(levels[cand])
            v = cand
        else:
            tried.add(cand)
            if _index(frontier, cand) < 0:
                insort(frontier, cand)

    if v == dc:
        term = TERM_REACHED_DC
    elif len(frontier) == 0:
        term = TERM_FRONTIER_EXHAUSTED
    else:
        term = TERM_ALL_TRIED
    return np.asarray(path, dtype=np.int64), term


def _index(sorted_list: list[int], v: int) -> int:
    """Position of v in a sorted list, or -1."""
    pos = bisect_left(sorted_list, v)
    if pos < len(sorted_list) and sorted_list[pos] == v:
        return pos
    return -1
