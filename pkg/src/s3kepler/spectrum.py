"""Energy levels of the Kepler problem on S^3.

Closed form: ``h_n = (n - 1)(n + 1) - alpha^2 / n^2`` with degeneracy ``n^2``.

The independent check is a radial eigenvalue problem in the polar angle.
With ``|x| = lam tan(chi/2)`` the potential ``(alpha/lam)(x^2 - lam^2)/|x|``
becomes ``-2 alpha cot(chi)`` and, for ``psi = u / sin(chi)`` in the angular
momentum sector ``l``,

    -u'' + [l(l+1)/sin^2(chi) - 1 - 2 alpha cot(chi)] u = h u,  u(0) = u(pi) = 0.

It is discretised with second-order central differences on a uniform grid.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .geometry import DEFAULT_PARAMS, SystemParams
from .numerics import TridiagonalSpec, tridiag_eigen_lowest

MIN_GRID = 100


def level_energy(n: int, alpha: float) -> float:
    """Rescaled energy of the level with principal quantum number ``n``."""
    return (n - 1) * (n + 1) - alpha**2 / n**2


@dataclass(frozen=True)
class Level:
    n: int
    k: Fraction
    h: float
    degeneracy: int
    H: float


def closed_form_levels(alpha: float, n_max: int, params: SystemParams = DEFAULT_PARAMS) -> list[Level]:
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    levels = []
    for n in range(1, n_max + 1):
        h = level_energy(n, alpha)
        levels.append(Level(n=n, k=Fraction(n - 1, 2), h=h, degeneracy=n * n,
                            H=2.0 * params.lam**2 / params.m * h))
    return levels


@dataclass(frozen=True)
class RadialGrid:
    """``N`` interior nodes ``chi_j = j pi / (N + 1)``."""

    N: int

    def __post_init__(self):
        if self.N < MIN_GRID:
            raise ValueError(f"radial grid needs at least {MIN_GRID} points, got {self.N}")

    @property
    def spacing(self) -> float:
        return np.pi / (self.N + 1)

    @property
    def chi(self) -> np.ndarray:
        return np.arange(1, self.N + 1) * self.spacing

    def refined(self) -> "RadialGrid":
        """Grid with exactly half the spacing."""
        return RadialGrid(2 * self.N + 1)


def radial_operator(alpha: float, l: int, grid: RadialGrid) -> TridiagonalSpec:
    chi = grid.chi
    inv_h2 = 1.0 / grid.spacing**2
    potential = l * (l + 1) / np.sin(chi) ** 2 - 1.0 - 2.0 * alpha / np.tan(chi)
    return TridiagonalSpec(2.0 * inv_h2 + potential, np.full(grid.N - 1, -inv_h2))


def radial_eigenvalues(alpha: float, l: int, count: int, grid: RadialGrid,
                       richardson: bool = False, refine_tol: float = 1e-3) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the sector-``l`` radial problem.

    With ``richardson`` the grid is also solved at half spacing and the two
    second-order results are extrapolated; a :class:`UserWarning` is issued
    if they differ by more than ``refine_tol``.
    """
    if l < 0:
        raise ValueError("l must be non-negative")
    if count < 1:
        raise ValueError("count must be at least 1")
    coarse = tridiag_eigen_lowest(radial_operator(alpha, l, grid), count)
    if not richardson:
        return coarse
    fine = tridiag_eigen_lowest(radial_operator(alpha, l, grid.refined()), count)
    gap = float(np.abs(fine - coarse).max())
    if gap > refine_tol:
        warnings.warn(f"radial grid N={grid.N} too coarse: refinement moves eigenvalues by {gap:.3g}")
    return (4.0 * fine - coarse) / 3.0


def sector_towers(alpha: float, n_max: int, grid: RadialGrid, richardson: bool = False,
                  parallel: bool = False) -> dict[int, np.ndarray]:
    """Eigenvalues ``n = l+1 .. n_max`` of every sector ``l < n_max``."""
    def job(l):
        return radial_eigenvalues(alpha, l, n_max - l, grid, richardson)

    sectors = range(n_max)
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(job, sectors))
    else:
        results = [job(l) for l in sectors]
    return dict(zip(sectors, results))


def tower_values(alpha: float, n: int, grid: RadialGrid, richardson: bool = False) -> dict[int, float]:
    """Level ``n`` as seen from each sector ``l = 0 .. n-1``."""
    return {l: float(radial_eigenvalues(alpha, l, n - l, grid, richardson)[-1]) for l in range(n)}


def degeneracy_check(alpha: float, n: int, grid: RadialGrid, richardson: bool = False) -> float:
    """Largest pairwise difference of level ``n`` across its ``l`` sectors."""
    if n < 1:
        raise ValueError("n must be at least 1")
    values = list(tower_values(alpha, n, grid, richardson).values())
    return max(values) - min(values)


def spectrum_table(alpha: float, n_max: int, grid: RadialGrid, richardson: bool = False,
                   parallel: bool = False) -> list[dict]:
    """Closed form against the radial oracle, one row per level."""
    towers = sector_towers(alpha, n_max, grid, richardson, parallel)
    rows = []
    for level in closed_form_levels(alpha, n_max):
        n = level.n
        radial = {l: float(towers[l][n - l - 1]) for l in range(n)}
        vals = list(radial.values())
        rows.append({
            "n": n,
            "h_closed": level.h,
            "degeneracy": level.degeneracy,
            "h_radial": radial,
            "spread": max(vals) - min(vals),
            "max_abs_delta": max(abs(v - level.h) for v in vals),
        })
    return rows
