"""Good KBK system in Fourier space and its diagonalized form.

    eta_t = -ik(1 + eps^2 k^2) v_hat - ik (eta v)_hat
    v_t   = -ik eta_hat - (ik/2) (v^2)_hat

eps = 1 is the unscaled system; eps < 1 is the small-dispersion rescaling.
With s(k) = sqrt(1 + eps^2 k^2) the variables u_pm = v_hat +- eta_hat / s
decouple the linear part: (u_pm)_t = Lambda_pm u_pm + N_pm(u) with
Lambda_pm = -+ i k s.
"""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from services.kbk.core.spectral_grid import Grid, dealias_mask, forward, inverse

logger = logging.getLogger(__name__)

Branch = Literal["plus", "minus"]


class ModelParams(BaseModel):
    """Dispersion scale and optional 2/3-rule fraction (1.0 = off)."""
    model_config = ConfigDict(frozen=True)

    eps: float = Field(default=1.0, gt=0.0)
    dealias_fraction: float = Field(default=1.0, gt=0.0, le=1.0)


@dataclass(frozen=True, eq=False)
class State:
    grid: Grid
    eta: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        for name in ("eta", "v"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != (self.grid.N,):
                raise ValueError(f"{name} has shape {a.shape}, expected ({self.grid.N},)")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite values")
            object.__setattr__(self, name, a)

    @property
    def depth(self) -> np.ndarray:
        """Total depth 1 + eta (non-cavitation quantity)."""
        return 1.0 + self.eta


@dataclass(frozen=True, eq=False)
class DiagonalState:
    u_plus: np.ndarray
    u_minus: np.ndarray

    def stack(self) -> np.ndarray:
        return np.stack([self.u_plus, self.u_minus])

    @classmethod
    def from_stack(cls, u: np.ndarray) -> "DiagonalState":
        return cls(u_plus=u[0], u_minus=u[1])


class KBKModel:
    """Symbols of the good KBK system precomputed for one (grid, params)."""

    def __init__(self, grid: Grid, params: ModelParams | None = None):
        self.grid = grid
        self.params = params or ModelParams()
        k = grid.wavenumbers
        self.ik = 1j * grid.odd_wavenumbers
        self.s = np.sqrt(1.0 + (self.params.eps * k) ** 2)
        # Lambda_pm = -+ i k s; rows are (plus, minus)
        self.lam = np.stack([-self.ik * self.s, self.ik * self.s])
        self.dealias = self.params.dealias_fraction < 1.0
        self.mask = dealias_mask(grid, self.params.dealias_fraction)
        logger.debug(
            "KBK model: L=%s, N=%d, eps=%s, max|Lambda|=%.3e, dealias=%s",
            grid.L, grid.N, self.params.eps, np.abs(self.lam).max(), self.dealias,
        )

    def linear_symbol(self, branch: Branch) -> np.ndarray:
        if branch == "plus":
            return self.lam[0]
        if branch == "minus":
            return self.lam[1]
        raise ValueError(f"Unknown branch: {branch!r}")

    def spectra_to_diagonal(self, eta_hat: np.ndarray, v_hat: np.ndarray) -> np.ndarray:
        return np.stack([v_hat + eta_hat / self.s, v_hat - eta_hat / self.s])

    def diagonal_to_spectra(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v_hat = 0.5 * (u[0] + u[1])
        eta_hat = 0.5 * self.s * (u[0] - u[1])
        return eta_hat, v_hat

    def to_diagonal(self, state: State) -> DiagonalState:
        self._check_grid(state.grid)
        u = self.spectra_to_diagonal(forward(self.grid, state.eta), forward(self.grid, state.v))
        return DiagonalState.from_stack(u)

    def from_diagonal(self, diag: DiagonalState) -> State:
        eta_hat, v_hat = self.diagonal_to_spectra(diag.stack())
        return State(self.grid, inverse(self.grid, eta_hat), inverse(self.grid, v_hat))

    def _products(self, eta: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        v2_hat = forward(self.grid, v * v)
        ev_hat = forward(self.grid, eta * v)
        if self.dealias:
            v2_hat = v2_hat * self.mask
            ev_hat = ev_hat * self.mask
        return v2_hat, ev_hat

    def nonlinear(self, u: np.ndarray) -> np.ndarray:
        """N_pm(u) = -ik (v^2/2 +- (eta v)/s) on a stacked (2, N) array."""
        eta_hat, v_hat = self.diagonal_to_spectra(u)
        eta = inverse(self.grid, eta_hat)
        v = inverse(self.grid, v_hat)
        v2_hat, ev_hat = self._products(eta, v)
        half_v2 = 0.5 * v2_hat
        ev_s = ev_hat / self.s
        return np.stack([-self.ik * (half_v2 + ev_s), -self.ik * (half_v2 - ev_s)])

    def rhs(self, u: np.ndarray) -> np.ndarray:
        """Full diagonal right-hand side Lambda u + N(u)."""
        return self.lam * u + self.nonlinear(u)

    def rhs_physical(self, state: State) -> tuple[np.ndarray, np.ndarray]:
        """(eta_t, v_t) evaluated directly from the (eta, v) Fourier form."""
        self._check_grid(state.grid)
        eta_hat = forward(self.grid, state.eta)
        v_hat = forward(self.grid, state.v)
        v2_hat, ev_hat = self._products(state.eta, state.v)
        eta_t_hat = -self.ik * self.s**2 * v_hat - self.ik * ev_hat
        v_t_hat = -self.ik * eta_hat - 0.5 * self.ik * v2_hat
        return inverse(self.grid, eta_t_hat), inverse(self.grid, v_t_hat)

    def _check_grid(self, grid: Grid) -> None:
        if grid.key != self.grid.key:
            raise ValueError(f"State grid {grid.key} does not match model grid {self.grid.key}")


def linear_symbol(grid: Grid, params: ModelParams, branch: Branch) -> np.ndarray:
    """Lambda_pm(k) = -+ i k sqrt(1 + eps^2 k^2)."""
    return KBKModel(grid, params).linear_symbol(branch)


def to_diagonal(state: State, params: ModelParams) -> DiagonalState:
    return KBKModel(state.grid, params).to_diagonal(state)


def from_diagonal(diag: DiagonalState, params: ModelParams, grid: Grid) -> State:
    return KBKModel(grid, params).from_diagonal(diag)


def nonlinear_term(diag: DiagonalState, params: ModelParams, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    n = KBKModel(grid, params).nonlinear(diag.stack())
    return n[0], n[1]


def rhs_physical(state: State, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    return KBKModel(state.grid, params).rhs_physical(state)


def rhs_diagonal_physical(state: State, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(eta_t, v_t) through the diagonal path, for cross-validation."""
    model = KBKModel(state.grid, params)
    u = model.to_diagonal(state).stack()
    eta_t_hat, v_t_hat = model.diagonal_to_spectra(model.rhs(u))
    return inverse(state.grid, eta_t_hat), inverse(state.grid, v_t_hat)
