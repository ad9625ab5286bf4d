"""Dispersive shock wave front detection on eta snapshots."""

import logging
from typing import NamedTuple

import numpy as np
from scipy.signal import find_peaks

from services.kbk.core.kbk_dynamics import State
from services.kbk.core.spectral_grid import derivative

logger = logging.getLogger(__name__)

EDGE_FRACTION = 1e-3
PEAK_PROMINENCE = 1e-2
MIN_FRONT_OSCILLATIONS = 5


class FrontCounts(NamedTuple):
    left: int
    right: int

    def both_oscillating(self, minimum: int = MIN_FRONT_OSCILLATIONS) -> bool:
        return self.left >= minimum and self.right >= minimum


def _windows(state: State) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks of the left [x_edge_left, 0) and right (0, x_edge_right] windows."""
    x = state.grid.nodes
    amplitude = np.abs(state.eta)
    peak = amplitude.max()
    if peak == 0.0:
        raise ValueError("eta vanishes identically; no fronts to detect")
    active = np.flatnonzero(amplitude > EDGE_FRACTION * peak)
    x_left, x_right = x[active[0]], x[active[-1]]
    return (x >= x_left) & (x < 0.0), (x > 0.0) & (x <= x_right)


def _sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values)
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def front_oscillation_counts(state: State, threshold: float = 1e-2) -> FrontCounts:
    """Sign changes of eta_x inside each front window, ignoring near-flat samples."""
    if not 0.0 <= threshold < 1.0:
        raise ValueError(f"threshold must lie in [0, 1), got {threshold}")
    eta_x = derivative(state.grid, state.eta, 1)
    floor = threshold * np.abs(eta_x).max()
    left, right = _windows(state)
    counts = []
    for window in (left, right):
        slopes = eta_x[window]
        counts.append(_sign_changes(slopes[np.abs(slopes) >= floor]))
    result = FrontCounts(left=counts[0], right=counts[1])
    logger.info("Front oscillations: left=%d right=%d", result.left, result.right)
    return result


def oscillation_wavelength(state: State) -> float:
    """Median spacing of eta maxima in the right front window."""
    _, right = _windows(state)
    x = state.grid.nodes[right]
    eta = state.eta[right]
    peaks, _ = find_peaks(eta, prominence=PEAK_PROMINENCE * np.abs(state.eta).max())
    if peaks.size < 2:
        raise ValueError(f"Need at least two maxima in the right front, found {peaks.size}")
    wavelength = float(np.median(np.diff(x[peaks])))
    logger.debug("Oscillation wavelength %.4e from %d maxima", wavelength, peaks.size)
    return wavelength
