"""Temporal self-convergence against a fine-step reference run."""

import logging
from typing import Mapping

import numpy as np

from services.kbk.core.kbk_dynamics import State

logger = logging.getLogger(__name__)


def error_norm(a: State, b: State) -> float:
    """max(|eta_a - eta_b|, |v_a - v_b|) over the grid."""
    if a.grid.key != b.grid.key:
        raise ValueError(f"States live on different grids: {a.grid.key} vs {b.grid.key}")
    return float(max(np.max(np.abs(a.eta - b.eta)), np.max(np.abs(a.v - b.v))))


def self_convergence_slope(finals: Mapping[int, State], reference_Nt: int | None = None) -> float:
    """Least-squares slope of log(error) against log(h) over the non-reference runs.

    h is proportional to 1/Nt for a fixed final time, so the slope is the
    observed order of the scheme.
    """
    if reference_Nt is None:
        if not finals:
            raise ValueError("No runs to compare")
        reference_Nt = max(finals)
    if reference_Nt not in finals:
        raise ValueError(f"Reference Nt={reference_Nt} is not among the runs")
    reference = finals[reference_Nt]
    steps = sorted(Nt for Nt in finals if Nt != reference_Nt)
    if len(steps) < 2:
        raise ValueError("Need at least two runs besides the reference")

    errors = np.array([error_norm(finals[Nt], reference) for Nt in steps])
    if np.any(errors <= 0.0):
        raise ValueError("A run coincides with the reference; cannot fit an order")
    log_h = -np.log(np.asarray(steps, dtype=float))
    slope = float(np.polyfit(log_h, np.log(errors), 1)[0])
    logger.info("Self-convergence over Nt=%s vs %d: errors=%s slope=%.3f",
                steps, reference_Nt, errors.tolist(), slope)
    return slope
