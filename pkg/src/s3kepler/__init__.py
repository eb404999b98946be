"""Kepler problem on the 3-sphere: classical SO(4) dynamics, the dressed
Laplace-Runge-Lenz vector, and the exact spectrum with a radial oracle."""

from .classical import PhasePoint, integrate, poisson_bracket
from .geometry import SystemParams
from .lrl import spectral_params
from .so4 import build_irrep
from .spectrum import closed_form_levels, level_energy

__all__ = [
    "PhasePoint",
    "SystemParams",
    "build_irrep",
    "closed_form_levels",
    "integrate",
    "level_energy",
    "poisson_bracket",
    "spectral_params",
]
