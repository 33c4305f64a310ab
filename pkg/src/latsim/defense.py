"""Machine-monitoring defenses and their evaluation against attack paths.

A defender places monitors on ``k`` machines per interval and scores a
hit for every monitored machine the attacker actually crosses in the next
interval.  Two static baselines rank machines once (PageRank, degree); the
spectral cover greedily maximizes eigenvalue drop (NetShield-style); the
two anomaly-driven strategies re-rank every interval from the alert state:
one walks a random edge out of an alerting machine, the other weights
eigencentrality by neighboring alerts.

The domain controller is never eligible for monitoring: it is assumed
instrumented already, and including it would trivially intercept every
successful path at its last hop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import rng
from .credentials import identify_domain_controller
from .graph import AuthGraph, undirected_view
from .spectral import EigenPair, degree_vector, leading_eigenpair, pagerank

logger = logging.getLogger(__name__)


class DefenseStrategy(Enum):
    """Wire tokens for the five monitor-placement strategies."""

    PAGERANK_TOP = "rd"
    DEGREE_TOP = "dd"
    EIGEN_COVER = "ns"
    ANOMALY_RANDOM = "rand"
    ANOMALY_EIGEN = "as"

    @classmethod
    def parse(cls, token: str) -> "DefenseStrategy":
        try:
            return cls(token.lower())
        except ValueError:
            raise ValueError(f"unknown defense strategy {token!r}") from None


DYNAMIC_STRATEGIES = (DefenseStrategy.ANOMALY_RANDOM, DefenseStrategy.ANOMALY_EIGEN)
UNDIRECTED_STRATEGIES = (DefenseStrategy.EIGEN_COVER, DefenseStrategy.ANOMALY_EIGEN)


@dataclass(frozen=True)
class MonitorSet:
    """k monitored machines, in pick order."""

    nodes: tuple[int, ...]
    strategy: str
    k: int


@dataclass
class AnomalyState:
    """Per-node alert intensity in [0, 1]."""

    a: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "AnomalyState":
        return cls(a=np.zeros(n))


def segment_path(path: Sequence[int], i_s: int) -> list[list[int]]:
    """Split a path into consecutive chunks of length ``i_s`` (last may be short)."""
    if i_s < 1:
        raise ValueError("interval length must be >= 1")
    return [list(path[i:i + i_s]) for i in range(0, len(path), i_s)]


def apply_alerts(state: AnomalyState, nodes: Sequence[int]) -> None:
    """Set alert intensity to 1 for machines the attacker just crossed."""
    for v in nodes:
        state.a[v] = 1.0


def decay(state: AnomalyState, factor: float = 0.5) -> None:
    """Age all alerts by one interval."""
    state.a *= factor


def _top_k(scores: np.ndarray, k: int, dc: int) -> tuple[int, ...]:
    """Greedy top-k with the dc masked out; ties go to the lowest id."""
    s = scores.astype(np.float64).copy()
    s[dc] = -np.inf
    picks = []
    for _ in range(min(k, s.shape[0] - 1)):
        j = int(np.argmax(s))  # first occurrence = lowest id on ties
        picks.append(j)
        s[j] = -np.inf
    return tuple(picks)


def pagerank_defense(
    g: AuthGraph, k: int, dc: int, scores: np.ndarray | None = None
) -> MonitorSet:
    """Monitor the k highest-PageRank machines (excluding the dc)."""
    if scores is None:
        scores = pagerank(g)
    return MonitorSet(_top_k(scores, k, dc), DefenseStrategy.PAGERANK_TOP.value, k)


def degree_defense(g: AuthGraph, k: int, dc: int) -> MonitorSet:
    """Monitor the k highest out-degree machines (excluding the dc)."""
    scores = degree_vector(g).astype(np.float64)
    return MonitorSet(_top_k(scores, k, dc), DefenseStrategy.DEGREE_TOP.value, k)


def eigen_cover_defense(
    g_und: AuthGraph, k: int, dc: int, eig: EigenPair | None = None
) -> MonitorSet:
    """Greedy spectral cover (NetShield-style) on the undirected view.

    Each pick maximizes the marginal shield value
    ``2 * lambda * u[j]**2 - 2 * u[j] * sum_{s in S} A[j, s] * u[s]``.
    """
    if eig is None:
        eig = leading_eigenpair(g_und)
    lam, u = eig.value, eig.vector
    A = g_und.csr
    base = 2.0 * lam * u * u
    b = np.zeros(g_und.n)  # A[:, S] @ u[S], accumulated over picks
    picks: list[int] = []
    masked = np.zeros(g_und.n, dtype=bool)
    masked[dc] = True
    for _ in range(min(k, g_und.n - 1)):
        marginal = base - 2.0 * u * b
        marginal[masked] = -np.inf
        j = int(np.argmax(marginal))
        picks.append(j)
        masked[j] = True
        row = A.getrow(j)  # == column j: the view is symmetric
        b[row.indices] += row.data * u[j]
    return MonitorSet(tuple(picks), DefenseStrategy.EIGEN_COVER.value, k)


def anomaly_random_defense(
    g: AuthGraph,
    k: int,
    dc: int,
    state: AnomalyState,
    stream: rng.Stream,
    resample_factor: int = 50,
) -> MonitorSet:
    """Monitor random out-neighbors of alert-weighted machines.

    Draws an alerting machine proportionally to its alert intensity, then
    one of its successors uniformly; rejects duplicates, the dc, and
    dead-end draws.  After ``resample_factor * k`` draws (or when no alert
    mass exists) the remaining slots are filled uniformly from the
    unselected machines.
    """
    n = state.a.shape[0]
    picks: list[int] = []
    chosen = np.zeros(n, dtype=bool)
    chosen[dc] = True
    k_eff = min(k, n - 1)
    total_alert = float(state.a.sum())
    if total_alert > 0.0:
        draws = 0
        while len(picks) < k_eff and draws < resample_factor * k:
            draws += 1
            v_a = stream.weighted_index(state.a)
            succ = g.successors(v_a)
            if succ.shape[0] == 0:
                continue
            v = int(succ[stream.randrange(succ.shape[0])])
            if not chosen[v]:
                picks.append(v)
                chosen[v] = True
    if len(picks) < k_eff:
        pool = [v for v in range(n) if not chosen[v]]
        need = k_eff - len(picks)
        for ix in stream.sample(len(pool), need):
            picks.append(pool[ix])
    return MonitorSet(tuple(picks), DefenseStrategy.ANOMALY_RANDOM.value, k)


def anomaly_scores(g_und: AuthGraph, state: AnomalyState, u: np.ndarray) -> np.ndarray:
    """Eigencentrality weighted by neighboring alerts: u * (A @ (a * u))."""
    return u * (g_und.csr @ (state.a * u))


def anomaly_eigen_defense(
    g_und: AuthGraph,
    k: int,
    dc: int,
    state: AnomalyState,
    eig: EigenPair | None = None,
) -> MonitorSet:
    """Monitor the top-k anomaly-weighted eigencentrality machines."""
    if eig is None:
        eig = leading_eigenpair(g_und)
    scores = anomaly_scores(g_und, state, eig.vector)
    return MonitorSet(
        _top_k(scores, k, dc), DefenseStrategy.ANOMALY_EIGEN.value, k
    )


# A selector receives (interval_index, anomaly state, per-path stream) and
# returns a MonitorSet; evaluate_defense accepts one in place of a strategy
# enum so tests can plug in oracles (e.g. a clairvoyant upper bound).
Selector = Callable[[int, AnomalyState, rng.Stream], MonitorSet]


@dataclass
class DefenseEvalResult:
    """Interception statistics of one defense over a path corpus."""

    strategy: str
    k: int
    i_s: int
    seed: int
    hits: list[int] = field(default_factory=list)
    normalized: list[float] = field(default_factory=list)
    per_path_mean_hits: list[float] = field(default_factory=list)
    n_paths_evaluated: int = 0
    n_paths_skipped: int = 0

    @property
    def mean_hits(self) -> float:
        return float(np.mean(self.hits)) if self.hits else float("nan")

    @property
    def mean_normalized(self) -> float:
        return float(np.mean(self.normalized)) if self.normalized else float("nan")


def evaluate_defense(
    paths: Sequence[Sequence[int]],
    g: AuthGraph,
    strategy: DefenseStrategy | Selector,
    i_s: int,
    seed: int,
    k: int = 8,
    dc: int | None = None,
    decay_factor: float = 0.5,
    g_und: AuthGraph | None = None,
) -> DefenseEvalResult:
    """Replay attack paths against a monitoring strategy.

    Each path is split into intervals of ``i_s`` machines.  Per interval:
    alerts fire for the machines just crossed, the strategy places its
    ``k`` monitors, hits against the *next* interval are counted, and the
    alert state decays.  Paths shorter than two intervals are skipped
    (counted in ``n_paths_skipped``).  Alert state resets between paths.

    Returns:
        DefenseEvalResult with raw per-interval hits and hits normalized
        by ``min(k, next interval length)``.
    """
    if dc is None:
        dc = identify_domain_controller(g)
    name = strategy.value if isinstance(strategy, DefenseStrategy) else "custom"
    result = DefenseEvalResult(strategy=name, k=k, i_s=i_s, seed=seed)

    static_set: MonitorSet | None = None
    eig: EigenPair | None = None
    if isinstance(strategy, DefenseStrategy):
        if strategy in UNDIRECTED_STRATEGIES and g_und is None:
            g_und = undirected_view(g)
        if strategy is DefenseStrategy.PAGERANK_TOP:
            static_set = pagerank_defense(g, k, dc)
        elif strategy is DefenseStrategy.DEGREE_TOP:
            static_set = degree_defense(g, k, dc)
        elif strategy is DefenseStrategy.EIGEN_COVER:
            static_set = eigen_cover_defense(g_und, k, dc)
        elif strategy is DefenseStrategy.ANOMALY_EIGEN:
            eig = leading_eigenpair(g_und)

    for path_index, path in enumerate(paths):
        chunks = segment_path(path, i_s)
        if len(chunks) < 2:
            result.n_paths_skipped += 1
            continue
        state = AnomalyState.zeros(g.n)
        stream = rng.Stream.from_path(seed, rng.DOMAIN_DEFENSE, path_index)
        path_hits: list[int] = []
        for i in range(len(chunks) - 1):
            apply_alerts(state, chunks[i])
            if static_set is not None:
                monitors = static_set
            elif isinstance(strategy, DefenseStrategy):
                if strategy is DefenseStrategy.ANOMALY_RANDOM:
                    monitors = anomaly_random_defense(g, k, dc, state, stream)
                else:
                    monitors = anomaly_eigen_defense(g_und, k, dc, state, eig=eig)
            else:
                monitors = strategy(i, state, stream)
            assert dc not in monitors.nodes, "domain controller must not be monitored"
            nxt = set(chunks[i + 1])
            h = len(nxt.intersection(monitors.nodes))
            path_hits.append(h)
            result.hits.append(h)
            result.normalized.append(h / min(k, len(nxt)))
            decay(state, decay_factor)
        result.per_path_mean_hits.append(float(np.mean(path_hits)))
        result.n_paths_evaluated += 1
    return result
