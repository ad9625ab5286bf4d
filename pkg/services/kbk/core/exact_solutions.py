"""Closed-form solutions and initial data for the KBK experiments."""

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from services.kbk.core.kbk_dynamics import State
from services.kbk.core.spectral_grid import Grid, derivative, periodic_distance

logger = logging.getLogger(__name__)

TAIL_TOLERANCE = 1e-14

BumpKind = Literal["v-bump", "eta-bump"]


class SolitonParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    C: float
    x0: float = 0.0
    eps: float = Field(default=1.0, gt=0.0)

    @field_validator("C")
    @classmethod
    def _subsonic(cls, value: float) -> float:
        if not abs(value) < 1.0:
            raise ValueError(f"Soliton velocity must satisfy |C| < 1, got {value}")
        return value


class BadSolitonParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: float

    @field_validator("k")
    @classmethod
    def _supersonic(cls, value: float) -> float:
        if not value > 1.0:
            raise ValueError(f"Solitary wave speed must satisfy k > 1, got {value}")
        return value


def soliton_profile(C: float, xi: np.ndarray, eps: float = 1.0) -> np.ndarray:
    """v_{C,eps}(xi) = 2(1-C^2) / (eps [cosh(sqrt(1-C^2) xi / sqrt(eps)) - C])."""
    if not abs(C) < 1.0:
        raise ValueError(f"Soliton velocity must satisfy |C| < 1, got {C}")
    kappa = np.sqrt(1.0 - C * C)
    return 2.0 * kappa**2 / (eps * (np.cosh(kappa * np.asarray(xi) / np.sqrt(eps)) - C))


def soliton_peak(C: float, eps: float = 1.0) -> float:
    """Maximum of v, 2(1+C)/eps."""
    return 2.0 * (1.0 + C) / eps


def _report_depth(name: str, eta: np.ndarray) -> None:
    min_depth = float(np.min(1.0 + eta))
    logger.debug("%s: min(1+eta) = %.6g", name, min_depth)
    if min_depth <= 0.0:
        logger.warning("%s violates the non-cavitation condition: min(1+eta) = %.6g", name, min_depth)


def _boundary_gap(grid: Grid, centre: float) -> float:
    """Distance from a peak at ``centre`` to the nearest torus boundary."""
    return float(np.pi * grid.L - abs(periodic_distance(grid, centre, 0.0)))


def _check_tail(name: str, boundary_value: float) -> None:
    if abs(boundary_value) > TAIL_TOLERANCE:
        logger.warning(
            "%s is not negligible at the torus boundary (|v| = %.2e > %.0e); enlarge L",
            name, abs(boundary_value), TAIL_TOLERANCE,
        )


def good_soliton(p: SolitonParams, t: float, grid: Grid, allow_unvalidated: bool = False) -> State:
    """Soliton of the good system centred at x0 + C t, wrapped onto the torus.

    For eps != 1 the eta companion C v - (eps/2) v^2 is not certified and
    requires ``allow_unvalidated=True``.
    """
    if p.eps != 1.0 and not allow_unvalidated:
        raise ValueError("eps != 1 soliton eta is unvalidated; pass allow_unvalidated=True")
    xi = periodic_distance(grid, grid.nodes, p.x0 + p.C * t)
    v = soliton_profile(p.C, xi, p.eps)
    eta = p.C * v - 0.5 * p.eps * v * v
    if p.eps != 1.0:
        logger.warning("Using the unvalidated eps=%s soliton eta companion", p.eps)
    gap = _boundary_gap(grid, p.x0 + p.C * t)
    _check_tail("soliton", float(soliton_profile(p.C, gap, p.eps)))
    _report_depth("soliton", eta)
    return State(grid, eta, v)


def rescaled_soliton(C: float, x0: float, eps: float, t: float, grid: Grid) -> State:
    """Exact soliton of the rescaled system: the eps = 1 soliton in x/eps, t/eps."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    xi = periodic_distance(grid, grid.nodes, x0 + C * t) / eps
    v = soliton_profile(C, xi)
    eta = C * v - 0.5 * v * v
    gap = _boundary_gap(grid, x0 + C * t)
    _check_tail("rescaled soliton", float(soliton_profile(C, gap / eps)))
    return State(grid, eta, v)


def perturbed_soliton(p: SolitonParams, lam: float, mu: float, grid: Grid) -> State:
    """Initial data (lam * v_C, mu * eta_C)."""
    base = good_soliton(p, 0.0, grid)
    eta = mu * base.eta
    _report_depth("perturbed soliton", eta)
    return State(grid, eta, lam * base.v)


def stationary_solution(eps: float, grid: Grid) -> State:
    """v = 2 / (eps cosh(x / sqrt(eps))), eta = -(eps/2) v^2."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    v = 2.0 / (eps * np.cosh(grid.nodes / np.sqrt(eps)))
    eta = -0.5 * eps * v * v
    _report_depth("stationary solution", eta)
    return State(grid, eta, v)


def bad_soliton(p: BadSolitonParams, t: float, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solitary wave (eta, v) of the ill-posed system, xi = x - k t. Evaluation only."""
    k = p.k
    xi = np.asarray(x, dtype=float) - k * t
    ch = np.cosh(np.sqrt(3.0 * (k * k - 1.0)) * xi)
    v = 2.0 * (k * k - 1.0) / (ch + k)
    eta = 2.0 * (k * k - 1.0) * (k * ch + 1.0) / (ch + k) ** 2
    return eta, v


def gaussian_data(kind: BumpKind, A: float, grid: Grid) -> State:
    """(0, A exp(-x^2)) for a v-bump, (A exp(-x^2), 0) for an eta-bump."""
    bump = A * np.exp(-grid.nodes**2)
    zero = np.zeros(grid.N)
    if kind == "v-bump":
        state = State(grid, zero, bump)
    elif kind == "eta-bump":
        state = State(grid, bump, zero)
    else:
        raise ValueError(f"Unknown Gaussian kind: {kind!r}")
    _report_depth(f"gaussian {kind}", state.eta)
    return state


def traveling_wave_residual(v_profile: np.ndarray, c: float, eps: float, grid: Grid) -> float:
    """Sup-norm of -eps phi'' + (1-c^2) phi + (3/2) c eps phi^2 - (eps^2/2) phi^3."""
    phi = np.asarray(v_profile, dtype=float)
    phi_xx = derivative(grid, phi, 2)
    residual = -eps * phi_xx + (1.0 - c * c) * phi + 1.5 * c * eps * phi**2 - 0.5 * eps**2 * phi**3
    return float(np.max(np.abs(residual)))
