"""
Quadrature Representation Module
Position/momentum marginals via Hermite functions and Wigner functions on grids
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from cv_models.exceptions import GridError, NormalizationError
from cv_models.fock.states import FockDensity, FockVector, State, to_density, trim

MIN_GRID_POINTS = 64
MARGINAL_NORM_TOL = 1e-4
WIGNER_NORM_TOL = 1e-5
CLAMP_TOL = 1e-10
MAX_QUADRATURE_NODES = 4096


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D sampling grid including both endpoints"""

    lo: float
    hi: float
    npts: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise GridError(f"Grid needs lo < hi (got {self.lo}, {self.hi})")
        if self.npts < MIN_GRID_POINTS:
            raise GridError(f"Grid needs at least {MIN_GRID_POINTS} points (got {self.npts})")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.npts - 1)

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.npts)

    def refined(self, factor: int = 2) -> "Grid1D":
        """Same extent, spacing divided by factor"""
        return Grid1D(self.lo, self.hi, factor * (self.npts - 1) + 1)


@dataclass(frozen=True)
class Density1D:
    """Sampled probability density; round-off negatives are clamped to zero"""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.npts,):
            raise GridError(f"Expected {self.grid.npts} samples, got shape {values.shape}")
        if values.min() < -CLAMP_TOL:
            raise NormalizationError(f"Density has negative samples (min {values.min():.3e})")
        values = np.clip(values, 0.0, None)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(trapezoid(self.values, dx=self.grid.spacing))

    def mean(self) -> float:
        return float(trapezoid(self.grid.points * self.values, dx=self.grid.spacing))

    def variance(self) -> float:
        centered = self.grid.points - self.mean()
        return float(trapezoid(centered ** 2 * self.values, dx=self.grid.spacing))


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function sampled on xgrid x pgrid; values[i, j] = W(x_i, p_j)"""

    xgrid: Grid1D
    pgrid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.xgrid.npts, self.pgrid.npts):
            raise GridError(f"Expected shape {(self.xgrid.npts, self.pgrid.npts)}, got {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        inner = trapezoid(self.values, dx=self.pgrid.spacing, axis=1)
        return float(trapezoid(inner, dx=self.xgrid.spacing))

    def x_marginal(self) -> np.ndarray:
        return trapezoid(self.values, dx=self.pgrid.spacing, axis=1)

    def p_marginal(self) -> np.ndarray:
        return trapezoid(self.values, dx=self.xgrid.spacing, axis=0)


def default_extent(nmax: int, hbar: float = 1.0) -> float:
    """Half-width covering the turning point of |nmax> plus Gaussian tails"""
    return float(np.sqrt(2.0 * hbar * (nmax + 1)) + 5.0 * np.sqrt(hbar))


def default_grid(nmax: int, hbar: float = 1.0, npts: int = 2048, extent_scale: float = 1.0) -> Grid1D:
    extent = extent_scale * default_extent(nmax, hbar)
    return Grid1D(-extent, extent, npts)


def _check_grid(grid: Grid1D, nmax: int, hbar: float) -> None:
    turning = np.sqrt(hbar * (2 * nmax + 1))
    required = turning + 3.0 * np.sqrt(hbar)
    if grid.lo > -required or grid.hi < required:
        raise GridError(
            f"Grid [{grid.lo:.3f}, {grid.hi:.3f}] does not cover +-{required:.3f} needed for nmax={nmax}",
            recommended_extent=default_extent(nmax, hbar),
        )
    # resolve the fastest local oscillation of the top Hermite function
    max_spacing = np.pi * np.sqrt(hbar) / (2.0 * np.sqrt(2 * nmax + 1))
    if grid.spacing > max_spacing:
        raise GridError(
            f"Grid spacing {grid.spacing:.4f} too coarse for nmax={nmax} (max {max_spacing:.4f})",
            recommended_extent=default_extent(nmax, hbar),
        )


def hermite_functions(points: np.ndarray, nmax: int, hbar: float = 1.0) -> np.ndarray:
    """
    Normalized oscillator eigenfunctions phi_0..phi_nmax at arbitrary points

    Uses the three-term recurrence on the normalized functions themselves, which
    stays finite far beyond the range where raw Hermite polynomials overflow.

    Args:
        points: Evaluation points (any shape)
        nmax: Highest level
        hbar: Action unit

    Returns:
        array: shape (nmax + 1, *points.shape)
    """
    points = np.asarray(points, dtype=float)
    u = points / np.sqrt(hbar)
    basis = np.empty((nmax + 1,) + points.shape)
    basis[0] = (np.pi * hbar) ** -0.25 * np.exp(-0.5 * u ** 2)
    if nmax >= 1:
        basis[1] = np.sqrt(2.0) * u * basis[0]
    for n in range(1, nmax):
        basis[n + 1] = np.sqrt(2.0 / (n + 1)) * u * basis[n] - np.sqrt(n / (n + 1)) * basis[n - 1]
    return basis


@lru_cache(maxsize=32)
def hermite_basis(grid: Grid1D, nmax: int, hbar: float = 1.0) -> np.ndarray:
    """
    Hermite functions sampled on a grid, cached per (grid, nmax, hbar)

    Args:
        grid: Sampling grid (must cover the turning point of |nmax> plus margin)
        nmax: Highest level
        hbar: Action unit

    Returns:
        array: read-only, row n holds phi_n on grid.points
    """
    _check_grid(grid, nmax, hbar)
    basis = hermite_functions(grid.points, nmax, hbar)
    basis.setflags(write=False)
    return basis


def _momentum_phases(dim: int) -> np.ndarray:
    return (-1j) ** np.arange(dim)


def _marginal(rho: FockDensity, grid: Grid1D, phases: np.ndarray) -> Density1D:
    basis = hermite_basis(grid, rho.nmax, rho.hbar)
    rotated = phases[:, None] * rho.matrix * phases.conj()[None, :]
    values = np.einsum("mi,mn,ni->i", basis, rotated, basis, optimize=True).real
    density = Density1D(grid, values)
    integral = density.integral()
    if abs(integral - 1.0) > MARGINAL_NORM_TOL:
        raise GridError(
            f"Marginal integrates to {integral:.6f} on [{grid.lo:.2f}, {grid.hi:.2f}]",
            recommended_extent=default_extent(rho.nmax, rho.hbar),
        )
    return density


def marginal_x(state: State, grid: Grid1D) -> Density1D:
    """
    Position marginal W_x(x) = sum_mn rho_mn phi_m(x) phi_n(x)

    Args:
        state: Pure or mixed state
        grid: Position grid

    Returns:
        Density1D: Normalized position density
    """
    rho = to_density(trim(state))
    return _marginal(rho, grid, np.ones(rho.dim, dtype=complex))


def marginal_p(state: State, grid: Grid1D) -> Density1D:
    """
    Momentum marginal using <p|n> = (-i)^n phi_n(p)

    Args:
        state: Pure or mixed state
        grid: Momentum grid

    Returns:
        Density1D: Normalized momentum density
    """
    rho = to_density(trim(state))
    return _marginal(rho, grid, _momentum_phases(rho.dim))


@lru_cache(maxsize=64)
def _gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _node_count(length: float, p_max: float, k_max: float, hbar: float, floor: int) -> int:
    # total phase of e^{-ipy/hbar} times the Hermite products across the interval
    phase = length * (p_max / hbar + k_max)
    return int(min(MAX_QUADRATURE_NODES, max(floor, np.ceil(0.75 * phase) + 32)))


def wigner(state: State, xgrid: Grid1D, pgrid: Grid1D, order: int = 512) -> WignerGrid:
    """
    Wigner function from its defining y-integral

    W(x,p) = 1/(2 pi hbar) int e^{-ipy/hbar} <x+y/2|rho|x-y/2> dy, evaluated with
    Gauss-Legendre nodes over the support |x +- y/2| <= extent of the state.

    Args:
        state: Pure or mixed state
        xgrid: Position grid
        pgrid: Momentum grid
        order: Minimum number of Gauss-Legendre nodes per x

    Returns:
        WignerGrid: Sampled Wigner function
    """
    rho = to_density(trim(state))
    hbar = rho.hbar
    nmax = rho.nmax
    support = default_extent(nmax, hbar)
    p_points = pgrid.points
    p_max = float(np.max(np.abs(p_points)))
    k_max = np.sqrt(2 * nmax + 1) / np.sqrt(hbar)
    matrix = rho.matrix

    values = np.zeros((xgrid.npts, pgrid.npts))
    for i, x in enumerate(xgrid.points):
        half = 2.0 * (support - abs(x))
        if half <= 0:
            continue
        nodes, weights = _gauss_legendre(_node_count(2 * half, p_max, k_max, hbar, order))
        y = half * nodes
        phi_plus = hermite_functions(x + 0.5 * y, nmax, hbar)
        phi_minus = hermite_functions(x - 0.5 * y, nmax, hbar)
        kernel = np.einsum("mk,mn,nk->k", phi_plus, matrix, phi_minus, optimize=True)
        phase = np.exp(-1j * np.outer(p_points, y) / hbar)
        values[i] = (phase @ (half * weights * kernel)).real / (2.0 * np.pi * hbar)

    grid = WignerGrid(xgrid, pgrid, values)
    integral = grid.integral()
    if abs(integral - 1.0) > WIGNER_NORM_TOL:
        raise GridError(
            f"Wigner function integrates to {integral:.7f}",
            recommended_extent=support,
        )
    logger.debug(f"Wigner grid {xgrid.npts}x{pgrid.npts} for nmax={nmax}, min {values.min():.3e}")
    return grid


def min_wigner(w: WignerGrid) -> float:
    return float(np.min(w.values))


def negative_mass(w: WignerGrid) -> float:
    """Integrated magnitude of the negative part of W"""
    negative = np.clip(-w.values, 0.0, None)
    inner = trapezoid(negative, dx=w.pgrid.spacing, axis=1)
    return float(trapezoid(inner, dx=w.xgrid.spacing))


def truncation_wigner_bound(state: State) -> float:
    """
    Largest |W| change caused by the weight a state lost to truncation

    |W_rho - W_sigma| <= ||rho - sigma||_1 / (pi hbar), and a discarded tail t moves a
    normalized state by at most 2 sqrt(2 t) in trace norm.
    """
    return float(2.0 * np.sqrt(2.0 * max(state.tail_weight, 0.0)) / (np.pi * state.hbar))


def squeezed_wavefunction(x: np.ndarray, s: float, hbar: float = 1.0) -> np.ndarray:
    """
    Closed-form position wavefunction of a squeezed vacuum with s = e^r whose
    axis is rotated by pi/4 from the x axis

    Its symmetrized cross moment is +(hbar/2) sinh 2r, i.e. it matches
    squeezed_vacuum with phi = 3 pi / 2 in this package's convention.
    """
    u = np.asarray(x, dtype=float) / np.sqrt(hbar)
    amplitude = (2.0 * s ** 2 / (np.pi * (s ** 4 + 1.0))) ** 0.25 * hbar ** -0.25
    exponent = 1j * (s ** 2 + 1j) * u ** 2 / (2.0 * (s ** 2 - 1j))
    return amplitude * np.exp(exponent)


def project_wavefunction(values: np.ndarray, grid: Grid1D, nmax: int, hbar: float = 1.0) -> FockVector:
    """
    Project a sampled position wavefunction onto |0>..|nmax>

    Args:
        values: psi(x) on grid.points
        grid: Position grid
        nmax: Highest Fock level kept
        hbar: Action unit

    Returns:
        FockVector: Normalized projection; tail_weight holds the weight outside the span
    """
    values = np.asarray(values, dtype=complex)
    basis = hermite_basis(grid, nmax, hbar)
    coefficients = trapezoid(basis * values[None, :], dx=grid.spacing, axis=1)
    total = float(trapezoid(np.abs(values) ** 2, dx=grid.spacing))
    kept = float(np.sum(np.abs(coefficients) ** 2))
    return FockVector(coefficients / np.sqrt(kept), hbar, tail_weight=max(total - kept, 0.0))
