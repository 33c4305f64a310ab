"""Monte-Carlo network vulnerability estimation.

The vulnerability of a graph under a hygiene profile is the probability
that an intrusion starting on a random low-credential machine under a
random credential distribution reaches the domain controller.  Estimates
are Monte-Carlo means over ``n_dists`` fresh distributions with up to
``n_starts`` distinct start machines each, reported with Wilson 95%
intervals; the overall score averages the three standard profiles with
equal weight.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import rng
from .attack import AttackOutcome, AttackStrategy, run_attack
from .credentials import CredentialAssignment, sample_assignment
from .graph import AuthGraph
from .spectral import Centralities, centralities

logger = logging.getLogger(__name__)

HYGIENE_WEIGHTS = {"h1": 1.0 / 3.0, "h2": 1.0 / 3.0, "h3": 1.0 / 3.0}

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("wilson_interval needs at least one trial")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
        / denom
    )
    # the algebra gives exactly 0/1 at the boundary counts; keep it that
    # way through float rounding
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def trial(
    g: AuthGraph,
    assignment: CredentialAssignment,
    start: int,
    strategy: AttackStrategy,
    stream: rng.Stream,
    cents: Centralities | None = None,
) -> AttackOutcome:
    """One intrusion trial from a fixed start machine."""
    return run_attack(g, assignment, strategy, stream, cents=cents, start=start)


@dataclass(frozen=True)
class HygieneVulnerability:
    """Estimate for one (graph, hygiene, strategy) configuration."""

    hygiene: str
    strategy: str
    trials: int
    successes: int
    estimate: float
    ci_low: float
    ci_high: float
    mean_path_len: float  # over successful trials; NaN when none succeeded
    n_dists: int
    n_starts: int
    seed: int


def vulnerability_h(
    g: AuthGraph,
    hygiene: str,
    strategy: AttackStrategy,
    seed: int,
    n_dists: int = 50,
    n_starts: int = 40,
    dc_policy: str = "force_c4",
    cents: Centralities | None = None,
) -> HygieneVulnerability:
    """Estimate the success probability under one hygiene profile.

    For each of ``n_dists`` credential distributions,
    ``min(n_starts, |start set|)`` start machines are drawn uniformly
    without replacement and one trial runs from each.
    """
    if cents is None:
        cents = centralities(g)
    strat_ix = list(AttackStrategy).index(strategy)
    trials_run = 0
    successes = 0
    success_lengths: list[int] = []
    for dist_index in range(n_dists):
        assign_seed = rng.derive(seed, rng.DOMAIN_ASSIGNMENT, dist_index)
        assignment = sample_assignment(
            g,
            hygiene,
            assign_seed,
            dc_policy=dc_policy,
            pagerank_scores=cents.pagerank,
        )
        R = assignment.start_set
        k = min(n_starts, R.shape[0])
        picker = rng.Stream.from_path(seed, rng.DOMAIN_START_SAMPLE, dist_index)
        starts = [int(R[ix]) for ix in picker.sample(R.shape[0], k)]
        for j, v in enumerate(starts):
            stream = rng.Stream.from_path(
                seed, rng.DOMAIN_TRIAL, dist_index, j, strat_ix
            )
            outcome = trial(g, assignment, v, strategy, stream, cents=cents)
            trials_run += 1
            if outcome.success:
                successes += 1
                success_lengths.append(int(outcome.path.shape[0]))
    lo, hi = wilson_interval(successes, trials_run)
    return HygieneVulnerability(
        hygiene=hygiene,
        strategy=strategy.value,
        trials=trials_run,
        successes=successes,
        estimate=successes / trials_run,
        ci_low=lo,
        ci_high=hi,
        mean_path_len=(
            float(np.mean(success_lengths)) if success_lengths else float("nan")
        ),
        n_dists=n_dists,
        n_starts=n_starts,
        seed=seed,
    )


def vulnerability_total(per_hygiene: Mapping[str, float]) -> float:
    """Equal-weight combination of the three standard hygiene estimates.

    Raises:
        ValueError: if any of h1/h2/h3 is missing.
    """
    missing = [h for h in HYGIENE_WEIGHTS if h not in per_hygiene]
    if missing:
        raise ValueError(f"missing hygiene estimates: {', '.join(missing)}")
    return sum(w * per_hygiene[h] for h, w in HYGIENE_WEIGHTS.items())
