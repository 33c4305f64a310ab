"""Trial-kernel backend selection.

Prefers the compiled extension when it imported cleanly; falls back to
the pure-Python reference otherwise.  Set ``LATSIM_PURE_PYTHON=1`` to
force the fallback (used by the parity tests and the benchmark).
Both backends implement the same draw protocol and produce bit-identical
walks from the same stream state.
"""

import logging
import os

from .python import (  # noqa: F401  (re-exported constants)
    JUMP_PROB,
    TERM_ALL_TRIED,
    TERM_FRONTIER_EXHAUSTED,
    TERM_REACHED_DC,
    draw_next,
)
from .python import run_trial as _run_trial_py

logger = logging.getLogger(__name__)

BACKEND = "python"
run_trial = _run_trial_py

if not os.environ.get("LATSIM_PURE_PYTHON"):
    try:
        from ._speedups import run_trial as _run_trial_c

        run_trial = _run_trial_c
        BACKEND = "compiled"
    except ImportError:
        logger.debug("compiled trial kernel unavailable; using pure Python")
