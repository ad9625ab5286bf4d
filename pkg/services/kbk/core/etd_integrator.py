"""Exponential time differencing RK4 (Cox-Matthews) for u_t = Lambda u + N(u).

Lambda is diagonal. The phi-function weights lose digits near z = Lambda h = 0,
so for |z| < CONTOUR_SWITCH each weight is the mean of its closed form over
CONTOUR_POINTS points on a circle of radius CONTOUR_RADIUS centred at z.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Iterable

import numpy as np

from services.kbk.core.kbk_dynamics import DiagonalState, KBKModel, ModelParams, State

logger = logging.getLogger(__name__)

CONTOUR_POINTS = 32
CONTOUR_RADIUS = 1.0
CONTOUR_SWITCH = 0.5

Nonlinearity = Callable[[np.ndarray], np.ndarray]
Callback = Callable[[int, float, State], Any]


class BlowUpError(RuntimeError):
    """Non-finite values appeared during an evolution."""

    def __init__(self, step: int, t: float, last_diagnostics: Any = None):
        self.step = step
        self.t = t
        self.last_diagnostics = last_diagnostics
        super().__init__(
            f"Non-finite values at step {step} (t={t:.6g}); "
            "the run is under-resolved or unstable"
        )


@dataclass(frozen=True, eq=False)
class ETDTables:
    h: float
    E_full: np.ndarray
    E_half: np.ndarray
    Q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray


def _weights(z: np.ndarray) -> tuple[np.ndarray, ...]:
    """Closed forms of (e^{z/2}-1)/z and the three Cox-Matthews combinations over z^3."""
    ez = np.exp(z)
    z2 = z * z
    z3 = z2 * z
    q = (np.exp(z / 2.0) - 1.0) / z
    a = (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3
    b = 2.0 * (2.0 + z + ez * (-2.0 + z)) / z3
    c = (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3
    return q, a, b, c


def phi_tables(lam: np.ndarray, h: float) -> ETDTables:
    """Precompute exponentials and ETDRK4 weights for step h, elementwise in lam."""
    if not h > 0:
        raise ValueError(f"Time step must be positive, got {h}")
    z = np.asarray(lam, dtype=complex) * h
    small = np.abs(z) < CONTOUR_SWITCH

    q = np.empty_like(z)
    a = np.empty_like(z)
    b = np.empty_like(z)
    c = np.empty_like(z)

    large = ~small
    if np.any(large):
        q[large], a[large], b[large], c[large] = _weights(z[large])
    if np.any(small):
        roots = CONTOUR_RADIUS * np.exp(
            2j * np.pi * (np.arange(1, CONTOUR_POINTS + 1) - 0.5) / CONTOUR_POINTS
        )
        zc = z[small][:, np.newaxis] + roots[np.newaxis, :]
        qc, ac, bc, cc = _weights(zc)
        q[small] = qc.mean(axis=-1)
        a[small] = ac.mean(axis=-1)
        b[small] = bc.mean(axis=-1)
        c[small] = cc.mean(axis=-1)

    return ETDTables(
        h=float(h),
        E_full=np.exp(z),
        E_half=np.exp(z / 2.0),
        Q=h * q,
        f1=h * a,
        f2=h * b,
        f3=h * c,
    )


def step(u: np.ndarray, tables: ETDTables, nonlinear: Nonlinearity) -> np.ndarray:
    """One ETDRK4 step."""
    n_u = nonlinear(u)
    a = tables.E_half * u + tables.Q * n_u
    n_a = nonlinear(a)
    b = tables.E_half * u + tables.Q * n_a
    n_b = nonlinear(b)
    c = tables.E_half * a + tables.Q * (2.0 * n_b - n_u)
    n_c = nonlinear(c)
    return tables.E_full * u + tables.f1 * n_u + tables.f2 * (n_a + n_b) + tables.f3 * n_c


def evolve(
    state: State,
    params: ModelParams,
    T: float,
    Nt: int,
    callback: Callback | None = None,
    callback_every: int = 0,
    callback_steps: Iterable[int] = (),
) -> State:
    """Advance ``state`` to time T with Nt equal ETDRK4 steps.

    The callback sees ``(step, t, state)`` at step 0, every ``callback_every``
    steps, at each listed step and at the final step. Its last non-None return
    value is attached to a ``BlowUpError`` if the run produces non-finite values.
    """
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    if isinstance(Nt, bool) or int(Nt) != Nt or Nt < 1:
        raise ValueError(f"Nt must be a positive integer, got {Nt}")
    if callback_every < 0:
        raise ValueError(f"callback_every must be >= 0, got {callback_every}")
    Nt = int(Nt)
    h = T / Nt
    model = KBKModel(state.grid, params)
    tables = phi_tables(model.lam, h)
    extra = {int(s) for s in callback_steps}
    logger.debug("evolve: T=%s, Nt=%d, h=%.3e, N=%d", T, Nt, h, state.grid.N)

    last_diagnostics: Any = None

    def observe(n: int, u_now: np.ndarray) -> None:
        nonlocal last_diagnostics
        if callback is None:
            return
        current = model.from_diagonal(DiagonalState.from_stack(u_now))
        result = callback(n, T if n == Nt else n * h, current)
        if result is not None:
            last_diagnostics = result

    u = model.to_diagonal(state).stack()
    observe(0, u)
    for n in range(1, Nt + 1):
        u = step(u, tables, model.nonlinear)
        if not np.all(np.isfinite(u)):
            logger.error("Blow-up at step %d of %d (t=%.6g)", n, Nt, n * h)
            raise BlowUpError(n, n * h, last_diagnostics)
        if n == Nt or n in extra or (callback_every and n % callback_every == 0):
            observe(n, u)

    return model.from_diagonal(DiagonalState.from_stack(u))
