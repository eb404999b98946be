"""Stereographic chart of the unit 3-sphere.

A point ``x`` of R^3 maps to ``X = (2 lam x, x^2 - lam^2) / (x^2 + lam^2)``, so
the origin lands on the south pole ``X4 = -1`` and ``|x| = lam`` on the equator.
The polar angle ``chi`` is measured from the south pole, ``X4 = -cos(chi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SystemParams:
    """Mass ``m``, curvature radius ``lam`` and Kepler coupling ``alpha``."""

    m: float = 1.0
    lam: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if not self.lam > 0:
            raise ValueError(f"curvature scale must be positive, got {self.lam}")


DEFAULT_PARAMS = SystemParams()


def stereographic_embed(x, params: SystemParams = DEFAULT_PARAMS) -> np.ndarray:
    """Return the unit 4-vector on S^3 for the chart point ``x``."""
    x = np.asarray(x, dtype=float)
    lam = params.lam
    x2 = x @ x
    denom = x2 + lam * lam
    return np.append(2.0 * lam * x / denom, (x2 - lam * lam) / denom)


def polar_angle(x, params: SystemParams = DEFAULT_PARAMS) -> float:
    """Angle from the south pole, ``chi = 2 arctan(|x| / lam)``."""
    return 2.0 * np.arctan(np.linalg.norm(x) / params.lam)


def chart_radius(chi, params: SystemParams = DEFAULT_PARAMS):
    """Inverse of :func:`polar_angle`: ``|x| = lam tan(chi / 2)``."""
    return params.lam * np.tan(np.asarray(chi) / 2.0)


def conformal_factor(x, params: SystemParams = DEFAULT_PARAMS) -> float:
    x = np.asarray(x, dtype=float)
    return 1.0 / (x @ x + params.lam**2) ** 2
