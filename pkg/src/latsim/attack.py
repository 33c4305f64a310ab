"""Intrusion strategies and Monte-Carlo path collection.

Three draw strategies decide where the simulated attacker hops next:

* ``rwe`` — uniform over the not-yet-tried frontier (black-box attacker);
* ``re`` — frontier draw proportional to global PageRank;
* ``de`` — frontier draw proportional to out-degree.

All three share the jump rule: with probability 0.15 the attacker
re-enters the network at a uniformly chosen low-credential start machine.
A drawn machine is compromised only if the attacker's best collected
credential class is at most one below the machine's class and the machine
is not already on the path; otherwise it is marked tried until the next
successful hop resets the attempt set.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

import numpy as np

from . import rng
from ._kernel import (
    JUMP_PROB,
    TERM_ALL_TRIED,
    TERM_FRONTIER_EXHAUSTED,
    TERM_REACHED_DC,
    draw_next,
    run_trial,
)
from .credentials import CredentialAssignment, can_access, sample_assignment
from .graph import AuthGraph
from .spectral import Centralities, centralities

logger = logging.getLogger(__name__)

TERMINATION_NAMES = {
    TERM_REACHED_DC: "reached_dc",
    TERM_FRONTIER_EXHAUSTED: "frontier_exhausted",
    TERM_ALL_TRIED: "all_tried",
}


class AttackStrategy(Enum):
    """Wire tokens for the three draw strategies."""

    RANDOM_WALK = "rwe"
    PAGERANK_WEIGHTED = "re"
    DEGREE_WEIGHTED = "de"

    @classmethod
    def parse(cls, token: str) -> "AttackStrategy":
        try:
            return cls(token.lower())
        except ValueError:
            raise ValueError(f"unknown attack strategy {token!r}") from None


@dataclass
class AttackState:
    """Mutable walk state; invariants are enforced by the update helpers."""

    current: int
    collected: int
    frontier: set[int]
    tried: set[int]
    visited: set[int]
    path: list[int]

    @classmethod
    def initial(cls, start: int, level: int, successors: Iterable[int]) -> "AttackState":
        return cls(
            current=start,
            collected=int(level),
            frontier={int(w) for w in successors},
            tried=set(),
            visited={start},
            path=[start],
        )

    def available(self) -> list[int]:
        """Frontier nodes not yet tried, in ascending id order."""
        return sorted(self.frontier - self.tried)


def _strategy_weights(
    strategy: AttackStrategy, cents: Centralities
) -> np.ndarray | None:
    if strategy is AttackStrategy.RANDOM_WALK:
        return None
    if strategy is AttackStrategy.PAGERANK_WEIGHTED:
        return cents.pagerank
    return cents.out_degree.astype(np.float64)


def step_rwe(state: AttackState, start_set: np.ndarray, stream: rng.Stream) -> int:
    """Draw the next candidate uniformly over the untried frontier."""
    cand, _ = draw_next(stream, state.available(), start_set, None)
    return cand


def step_re(
    state: AttackState,
    start_set: np.ndarray,
    pagerank_scores: np.ndarray,
    stream: rng.Stream,
) -> int:
    """Draw the next candidate proportionally to PageRank."""
    cand, _ = draw_next(stream, state.available(), start_set, pagerank_scores)
    return cand


def step_de(
    state: AttackState,
    start_set: np.ndarray,
    degrees: np.ndarray,
    stream: rng.Stream,
) -> int:
    """Draw the next candidate proportionally to out-degree."""
    cand, _ = draw_next(
        stream, state.available(), start_set, degrees.astype(np.float64)
    )
    return cand


def frontier_update(state: AttackState, v: int, successors: Iterable[int]) -> None:
    """Apply the accept transition for compromised machine ``v``.

    Removes ``v`` from the frontier, folds in its successors, appends it
    to the path, and resets the tried set.
    """
    state.tried.clear()
    state.frontier.discard(v)
    state.frontier.update(int(w) for w in successors)
    state.visited.add(v)
    state.path.append(v)
    state.current = v


def mark_tried(state: AttackState, v: int) -> None:
    """Apply the reject transition: ``v`` joins both tried and frontier."""
    state.tried.add(v)
    state.frontier.add(v)


def step_pmf(
    state: AttackState,
    start_set: np.ndarray,
    weights: np.ndarray | None = None,
) -> dict[int, float]:
    """Analytic per-node probability of the next draw.

    Mirrors :func:`latsim._kernel.draw_next`: jump mass ``0.15`` spread
    uniformly over the start set, the rest over the untried frontier
    (uniform, or proportional to ``weights`` with a uniform fallback when
    the frontier weight mass is zero).  A node in both supports
    accumulates both terms.
    """
    avail = state.available()
    n_jump = len(start_set)
    if not avail and not n_jump:
        raise ValueError("no move available")
    if not avail:
        jump_mass, frontier_mass = 1.0, 0.0
    elif not n_jump:
        jump_mass, frontier_mass = 0.0, 1.0
    else:
        jump_mass, frontier_mass = JUMP_PROB, 1.0 - JUMP_PROB
    pmf: dict[int, float] = {}
    for r in start_set:
        pmf[int(r)] = pmf.get(int(r), 0.0) + jump_mass / n_jump
    if avail:
        if weights is not None:
            total = float(sum(weights[u] for u in avail))
        else:
            total = 0.0
        for u in avail:
            if weights is None or total <= 0.0:
                w = frontier_mass / len(avail)
            else:
                w = frontier_mass * float(weights[u]) / total
            pmf[u] = pmf.get(u, 0.0) + w
    return pmf


@dataclass(frozen=True)
class AttackOutcome:
    """One finished trial."""

    path: np.ndarray
    success: bool
    termination: str


def run_attack(
    g: AuthGraph,
    assignment: CredentialAssignment,
    strategy: AttackStrategy,
    stream: rng.Stream,
    cents: Centralities | None = None,
    start: int | None = None,
) -> AttackOutcome:
    """Run a single intrusion trial.

    Args:
        g: the authentication graph.
        assignment: credential distribution (defines start set and dc).
        strategy: draw strategy.
        stream: a dedicated trial stream — hand each trial its own
            (derive it from (seed, dist_index, trial_index)).
        cents: precomputed centralities; computed on the fly if omitted
            (bulk callers should pass them).
        start: fixed start machine (must be in the start set), or None to
            draw one uniformly.

    Returns:
        AttackOutcome; ``success`` iff the path ends at the domain
        controller.
    """
    if cents is None:
        cents = centralities(g)
    weights = _strategy_weights(strategy, cents)
    if start is None:
        start_arg = -1
    else:
        if not np.any(assignment.start_set == start):
            raise ValueError("start node must be in the C1 start set")
        start_arg = int(start)
    path, term = run_trial(
        g.out_indptr,
        g.out_indices,
        assignment.levels,
        int(assignment.dc),
        assignment.start_set,
        0 if weights is None else 1,
        np.empty(0) if weights is None else weights,
        stream.state,
        start_arg,
    )
    return AttackOutcome(
        path=path,
        success=bool(path[-1] == assignment.dc),
        termination=TERMINATION_NAMES[int(term)],
    )


@dataclass(frozen=True)
class LedgerEntry:
    """One attempt in the collection ledger."""

    dist_index: int
    trial_index: int
    success: bool
    path_len: int
    termination: str


@dataclass(frozen=True)
class CorpusRecord:
    """One retained unique attack path."""

    strategy: str
    hygiene: str
    dist_seed: int
    trial: int
    path: tuple[int, ...]
    success: bool


@dataclass
class PathCollection:
    """Result of a collection campaign for one (hygiene, strategy) pair."""

    strategy: str
    hygiene: str
    seed: int
    paths: list[CorpusRecord] = field(default_factory=list)
    ledger: list[LedgerEntry] = field(default_factory=list)
    attempts: int = 0
    successes: int = 0
    failures: int = 0
    fail_cap_hit: bool = False

    @property
    def unique_paths(self) -> int:
        return len(self.paths)


def collect_paths(
    g: AuthGraph,
    hygiene: str,
    strategy: AttackStrategy,
    seed: int,
    n_paths: int = 200,
    n_dists: int = 50,
    fail_cap: int = 10_000,
    fail_cap_scope: str = "config",
    dc_policy: str = "force_c4",
    cents: Centralities | None = None,
) -> PathCollection:
    """Collect unique attack paths across fresh credential distributions.

    The path budget is spread over ``n_dists`` assignments
    (``ceil(n_paths / n_dists)`` successful trials each); every attempt is
    ledgered; paths are deduplicated by exact node sequence afterwards.
    Collection stops early once ``fail_cap`` failures accumulate — per
    whole configuration by default, per assignment with
    ``fail_cap_scope="distribution"``.

    Returns:
        PathCollection (possibly fewer than ``n_paths`` unique paths).
    """
    if fail_cap_scope not in ("config", "distribution"):
        raise ValueError(f"unknown fail_cap_scope {fail_cap_scope!r}")
    if cents is None:
        cents = centralities(g)
    quota = math.ceil(n_paths / n_dists)
    strat_ix = list(AttackStrategy).index(strategy)
    out = PathCollection(strategy=strategy.value, hygiene=hygiene, seed=seed)
    seen: set[tuple[int, ...]] = set()
    failures_in_scope = 0

    for dist_index in range(n_dists):
        if fail_cap_scope == "distribution":
            failures_in_scope = 0
        assign_seed = rng.derive(seed, rng.DOMAIN_ASSIGNMENT, dist_index)
        assignment = sample_assignment(
            g,
            hygiene,
            assign_seed,
            dc_policy=dc_policy,
            pagerank_scores=cents.pagerank,
        )
        got = 0
        trial_index = 0
        while got < quota:
            if failures_in_scope >= fail_cap:
                out.fail_cap_hit = True
                break
            stream = rng.Stream.from_path(
                seed, rng.DOMAIN_TRIAL, dist_index, trial_index, strat_ix
            )
            outcome = run_attack(g, assignment, strategy, stream, cents=cents)
            out.attempts += 1
            out.ledger.append(
                LedgerEntry(
                    dist_index=dist_index,
                    trial_index=trial_index,
                    success=outcome.success,
                    path_len=int(outcome.path.shape[0]),
                    termination=outcome.termination,
                )
            )
            if outcome.success:
                out.successes += 1
                got += 1
                key = tuple(int(x) for x in outcome.path)
                if key not in seen:
                    seen.add(key)
                    out.paths.append(
                        CorpusRecord(
                            strategy=strategy.value,
                            hygiene=hygiene,
                            dist_seed=assign_seed,
                            trial=trial_index,
                            path=key,
                            success=True,
                        )
                    )
            else:
                out.failures += 1
                failures_in_scope += 1
            trial_index += 1
        if out.fail_cap_hit and fail_cap_scope == "config":
            break

    out.ledger.sort(key=lambda e: (e.dist_index, e.trial_index))
    logger.info(
        "collected %d unique paths (%s/%s): %d attempts, %d successes, %d failures%s",
        out.unique_paths,
        strategy.value,
        hygiene,
        out.attempts,
        out.successes,
        out.failures,
        " [fail cap hit]" if out.fail_cap_hit else "",
    )
    return out


def write_corpus(
    collections: Iterable[PathCollection],
    path: str | Path,
    meta: dict | None = None,
) -> None:
    """Write path collections as JSONL (one meta record, then one per path)."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {"record": "meta"}
        if meta:
            header.update(meta)
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for coll in collections:
            for rec in coll.paths:
                fh.write(
                    json.dumps(
                        {
                            "strategy": rec.strategy,
                            "hygiene": rec.hygiene,
                            "dist_seed": rec.dist_seed,
                            "trial": rec.trial,
                            "path": list(rec.path),
                            "success": rec.success,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )


def read_corpus(path: str | Path) -> tuple[dict, list[CorpusRecord]]:
    """Read a JSONL path corpus; returns (meta, records)."""
    meta: dict = {}
    records: list[CorpusRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("record") == "meta":
                meta = obj
                continue
            records.append(
                CorpusRecord(
                    strategy=obj["strategy"],
                    hygiene=obj["hygiene"],
                    dist_seed=int(obj["dist_seed"]),
                    trial=int(obj["trial"]),
                    path=tuple(int(x) for x in obj["path"]),
                    success=bool(obj["success"]),
                )
            )
    return meta, records


__all__ = [
    "AttackStrategy",
    "AttackState",
    "AttackOutcome",
    "PathCollection",
    "CorpusRecord",
    "LedgerEntry",
    "collect_paths",
    "run_attack",
    "step_rwe",
    "step_re",
    "step_de",
    "step_pmf",
    "frontier_update",
    "mark_tried",
    "can_access",
]
