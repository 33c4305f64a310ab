"""latsim: lateral-movement simulation on authentication graphs.

Builds directed authentication graphs from logs or a calibrated synthetic
generator, sweeps Monte-Carlo intrusion campaigns under configurable
credential-hygiene profiles, scores how exposed a network is, and
evaluates machine-monitoring defenses against the recorded attack paths.
"""

__version__ = "0.1.0"

from .graph import AuthGraph, GraphStats, build_from_edge_list, stats, undirected_view

__all__ = [
    "AuthGraph",
    "GraphStats",
    "build_from_edge_list",
    "stats",
    "undirected_view",
    "__version__",
]
