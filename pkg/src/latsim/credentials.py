"""Credential levels, hygiene sampling, and the domain controller.

Every machine stores exactly one credential class, ``C1`` (plain user)
through ``C4`` (domain administrator).  A hygiene profile says how many
machines hold each of the elevated classes; the remainder stay at C1.
An attacker holding class ``c`` can compromise machines storing at most
``c + 1`` — the one-step escalation rule that makes credential placement
matter.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping

import numpy as np

from . import rng
from .errors import DataError
from .graph import AuthGraph
from .spectral import pagerank

logger = logging.getLogger(__name__)

HYGIENE_NAMES = ("h1", "h2", "h3")
DC_POLICIES = ("force_c4", "sampled")


class CredentialLevel(IntEnum):
    C1 = 1
    C2 = 2
    C3 = 3
    C4 = 4


# Divisors: a profile places floor(n / divisor) machines at each class.
# Profiles are ordered strictest-last: h3 leaves the fewest elevated
# credentials lying around.
_HYGIENE_DIVISORS: dict[str, dict[CredentialLevel, int]] = {
    "h1": {CredentialLevel.C2: 2, CredentialLevel.C3: 5, CredentialLevel.C4: 20},
    "h2": {CredentialLevel.C2: 4, CredentialLevel.C3: 10, CredentialLevel.C4: 50},
    "h3": {CredentialLevel.C2: 8, CredentialLevel.C3: 20, CredentialLevel.C4: 80},
}


def hygiene_counts(level: str, n: int) -> dict[CredentialLevel, int]:
    """Number of machines per elevated credential class for a profile.

    Raises:
        DataError: for n < 80, where the strictest profile would place
            zero domain-admin credentials.
        ValueError: for an unknown profile name.
    """
    key = level.lower()
    if key not in _HYGIENE_DIVISORS:
        raise ValueError(f"unknown hygiene level {level!r}")
    if n < 80:
        raise DataError("graph too small for hygiene model")
    return {lvl: n // div for lvl, div in _HYGIENE_DIVISORS[key].items()}


@dataclass(frozen=True)
class CredentialAssignment:
    """One sampled credential distribution over a graph's machines."""

    levels: np.ndarray  # int8, values 1..4, shape (n,)
    dc: int
    start_set: np.ndarray  # sorted ids of C1 machines, controller excluded
    hygiene: str
    seed: int
    dc_policy: str

    @property
    def n(self) -> int:
        return int(self.levels.shape[0])

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "hygiene": self.hygiene,
            "dc": self.dc,
            "dc_policy": self.dc_policy,
            "levels": [int(x) for x in self.levels],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CredentialAssignment":
        levels = np.asarray(d["levels"], dtype=np.int8)
        dc = int(d["dc"])
        start_set = np.flatnonzero(levels == CredentialLevel.C1)
        return cls(
            levels=levels,
            dc=dc,
            start_set=start_set[start_set != dc],
            hygiene=str(d["hygiene"]),
            seed=int(d["seed"]),
            dc_policy=str(d.get("dc_policy", "force_c4")),
        )


def identify_domain_controller(
    g: AuthGraph, scores: np.ndarray | None = None, teleport: float = 0.15
) -> int:
    """The PageRank argmax; ties broken toward the lowest node id."""
    if scores is None:
        scores = pagerank(g, teleport=teleport)
    return int(np.argmax(scores))


def can_access(collected: int, target: int) -> bool:
    """May an attacker holding class ``collected`` take a ``target`` machine?"""
    return target <= collected + 1


def sample_assignment(
    g: AuthGraph,
    hygiene: str | Mapping[CredentialLevel, int],
    seed: int,
    dc_policy: str = "force_c4",
    pagerank_scores: np.ndarray | None = None,
) -> CredentialAssignment:
    """Draw one credential distribution.

    Every machine starts at C1; for each elevated class in increasing
    order a fresh uniform sample (without replacement within the class)
    is upgraded, so a machine drawn by several classes keeps the highest.
    The domain controller is the PageRank argmax; under the default
    ``force_c4`` policy it is pinned to C4 afterwards.

    Args:
        g: the authentication graph.
        hygiene: a profile name ("h1"/"h2"/"h3") or an explicit
            class -> count mapping (counts may be zero; used by tests).
        seed: stream seed for this assignment.
        dc_policy: "force_c4" or "sampled".
        pagerank_scores: optional precomputed PageRank vector, so bulk
            callers don't recompute it per assignment.

    Raises:
        DataError: if sampling leaves no C1 machine to start from.
    """
    if dc_policy not in DC_POLICIES:
        raise ValueError(f"unknown dc_policy {dc_policy!r}")
    if isinstance(hygiene, str):
        counts = hygiene_counts(hygiene, g.n)
        label = hygiene.lower()
    else:
        counts = {CredentialLevel(k): int(v) for k, v in hygiene.items()}
        label = "custom"

    stream = rng.Stream.from_path(seed, rng.DOMAIN_ASSIGNMENT)
    levels = np.full(g.n, CredentialLevel.C1, dtype=np.int8)
    for lvl in (CredentialLevel.C2, CredentialLevel.C3, CredentialLevel.C4):
        k = counts.get(lvl, 0)
        if k > g.n:
            raise DataError(f"hygiene count {k} exceeds machine count {g.n}")
        if k:
            levels[stream.sample(g.n, k)] = lvl

    dc = identify_domain_controller(g, scores=pagerank_scores)
    if dc_policy == "force_c4":
        levels[dc] = CredentialLevel.C4

    # the controller is the target, never a foothold, even when its own
    # sampled credential stays C1
    start_set = np.flatnonzero(levels == CredentialLevel.C1)
    start_set = start_set[start_set != dc]
    if start_set.size == 0:
        raise DataError("credential sampling left no C1 start machines")
    return CredentialAssignment(
        levels=levels,
        dc=dc,
        start_set=start_set,
        hygiene=label,
        seed=seed,
        dc_policy=dc_policy,
    )
