"""Run configuration: TOML file defaults, overridden by CLI flags.

Precedence is built-in default < config file < explicit command-line flag.
Every command embeds its resolved configuration in its output so a run can
be reproduced from the artifact alone.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .errors import DataError

HYGIENE_LABELS = ("h1", "h2", "h3")


@dataclass
class RunConfig:
    """All tunables shared by the simulation commands.

    ``seed`` has no default on purpose: stochastic commands must be given
    one (CLI enforces this), so no artifact is produced whose provenance
    is ambient interpreter state.
    """

    seed: int | None = None
    hygienes: tuple[str, ...] = ("h2",)
    attacks: tuple[str, ...] = ("rwe",)
    defenses: tuple[str, ...] = ("as",)
    n_paths: int = 200
    n_dists: int = 50
    n_starts: int = 40
    fail_cap: int = 10_000
    fail_cap_scope: str = "config"
    k: int = 8
    interval: int = 8
    decay: float = 0.5
    dc_policy: str = "force_c4"
    teleport: float = 0.15
    window_days: int = 30
    include_failures: bool = False
    # synthetic generation
    n: int = 100
    density: float = 0.028
    clustering: float = 0.23

    def resolved(self) -> dict[str, Any]:
        """Plain dict of every option, for embedding in outputs."""
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_toml(path: str | Path) -> dict[str, Any]:
    """Read a flat TOML config file; unknown keys are rejected."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise DataError(f"bad config file {path}: {exc}") from exc
    unknown = set(data) - set(_FIELD_TYPES)
    if unknown:
        raise DataError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def build_config(
    file_values: Mapping[str, Any] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Merge defaults, config-file values, and CLI overrides (None = unset)."""
    cfg = RunConfig()
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if value is None or not hasattr(cfg, key):
                continue
            if isinstance(value, list):
                value = tuple(value)
            setattr(cfg, key, value)
    return cfg
