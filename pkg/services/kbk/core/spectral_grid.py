"""Periodic Fourier grid on the torus x in L*[-pi, pi).

Transform convention: ``forward`` is the unnormalized DFT (scipy.fft.fft), so
mode m of ``forward(exp(i m x / L))`` has modulus N; ``inverse`` divides by N
and returns the real part. Every other module goes through these two
operations.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft

logger = logging.getLogger(__name__)

MIN_NODES = 8


@dataclass(frozen=True, eq=False)
class Grid:
    """Immutable periodic grid; arrays are read-only views."""
    L: float
    N: int
    nodes: np.ndarray
    wavenumbers: np.ndarray
    odd_wavenumbers: np.ndarray
    quad_weight: float
    mode_numbers: np.ndarray = field(repr=False)

    @property
    def key(self) -> tuple[float, int]:
        return (self.L, self.N)

    @property
    def period(self) -> float:
        return 2.0 * np.pi * self.L

    @property
    def x_start(self) -> float:
        return -np.pi * self.L

    @property
    def nyquist_index(self) -> int:
        return self.N // 2


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_grid(L: float, N: int) -> Grid:
    """Build the grid of N equispaced nodes on period 2*pi*L, node 0 at -pi*L."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise ValueError(f"N must be an integer, got {N!r}")
    N = int(N)
    if not _is_power_of_two(N) or N < MIN_NODES:
        raise ValueError(f"N must be a power of two >= {MIN_NODES}, got {N}")
    if not np.isfinite(L) or L <= 0:
        raise ValueError(f"L must be positive, got {L}")
    L = float(L)

    j = np.arange(N)
    nodes = L * (-np.pi + 2.0 * np.pi * j / N)
    # transform-native order: 0, 1, ..., N/2-1, -N/2, ..., -1
    m = np.rint(sp_fft.fftfreq(N, d=1.0 / N)).astype(np.int64)
    k = m / L
    k_odd = k.copy()
    k_odd[N // 2] = 0.0

    logger.debug("Grid built: L=%s, N=%d, dx=%.3e", L, N, 2.0 * np.pi * L / N)
    return Grid(
        L=L,
        N=N,
        nodes=_readonly(nodes),
        wavenumbers=_readonly(k),
        odd_wavenumbers=_readonly(k_odd),
        quad_weight=2.0 * np.pi * L / N,
        mode_numbers=_readonly(m),
    )


def _check_length(grid: Grid, a: np.ndarray, what: str) -> None:
    if np.ndim(a) != 1 or np.shape(a)[0] != grid.N:
        raise ValueError(f"{what} length {np.shape(a)} does not match grid N={grid.N}")


def forward(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Unnormalized DFT of a real field."""
    values = np.asarray(values)
    _check_length(grid, values, "field")
    return sp_fft.fft(values)


def inverse(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    """Inverse DFT, real part."""
    spectrum = np.asarray(spectrum)
    _check_length(grid, spectrum, "spectrum")
    return sp_fft.ifft(spectrum).real


def spectral_derivative(grid: Grid, spectrum: np.ndarray, order: int) -> np.ndarray:
    """Multiply mode m by (i k_m)**order; the Nyquist mode is zeroed for odd orders."""
    if order not in (1, 2, 3, 4):
        raise ValueError(f"Unsupported derivative order: {order}")
    spectrum = np.asarray(spectrum)
    _check_length(grid, spectrum, "spectrum")
    k = grid.odd_wavenumbers if order % 2 else grid.wavenumbers
    return (1j * k) ** order * spectrum


def derivative(grid: Grid, values: np.ndarray, order: int = 1) -> np.ndarray:
    """Physical-space spectral derivative of a real field."""
    return inverse(grid, spectral_derivative(grid, forward(grid, values), order))


def complex_derivative(grid: Grid, values: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative of a complex field, real and imaginary parts separately."""
    values = np.asarray(values)
    return derivative(grid, values.real, order) + 1j * derivative(grid, values.imag, order)


def integrate(grid: Grid, values: np.ndarray) -> float:
    """Periodic trapezoid rule: quad_weight * sum(values)."""
    values = np.asarray(values)
    _check_length(grid, values, "field")
    return grid.quad_weight * values.sum()


def parseval_sum(grid: Grid, spectrum: np.ndarray) -> float:
    """(2 pi L / N^2) * sum |f_hat|^2, equal to integrate(f**2)."""
    spectrum = np.asarray(spectrum)
    _check_length(grid, spectrum, "spectrum")
    return float(grid.period / grid.N**2 * np.sum(np.abs(spectrum) ** 2))


def dealias_mask(grid: Grid, fraction: float = 1.0) -> np.ndarray:
    """True exactly for |m| <= fraction * N / 2."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"dealias fraction must lie in (0, 1], got {fraction}")
    # tolerance keeps |m| == fraction*N/2 inside despite rounding of 2/3
    return np.abs(grid.mode_numbers) <= fraction * grid.N / 2 + 1e-9


def reflect(grid: Grid, values: np.ndarray) -> np.ndarray:
    """values(-x): node j maps to node (N - j) mod N."""
    values = np.asarray(values)
    _check_length(grid, values, "field")
    return np.roll(values[::-1], 1)


def even_part(grid: Grid, values: np.ndarray) -> np.ndarray:
    return 0.5 * (values + reflect(grid, values))


def odd_part(grid: Grid, values: np.ndarray) -> np.ndarray:
    return 0.5 * (values - reflect(grid, values))


def evaluate_at(grid: Grid, spectrum: np.ndarray, x: float) -> tuple[float, float, float]:
    """Trigonometric interpolant and its first two derivatives at a point x."""
    spectrum = np.asarray(spectrum)
    _check_length(grid, spectrum, "spectrum")
    phase = np.exp(1j * grid.wavenumbers * (x - grid.x_start)) / grid.N
    value = np.sum(spectrum * phase).real
    first = np.sum(1j * grid.odd_wavenumbers * spectrum * phase).real
    second = np.sum(-(grid.wavenumbers**2) * spectrum * phase).real
    return float(value), float(first), float(second)


def periodic_distance(grid: Grid, x: np.ndarray, x0: float) -> np.ndarray:
    """Signed distance x - x0 wrapped into [-pi L, pi L)."""
    return np.mod(np.asarray(x) - x0 + np.pi * grid.L, grid.period) - np.pi * grid.L
