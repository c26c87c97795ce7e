"""Elastic-band hidden-variable model.

A share is a band lying along a direction ``orientation`` with a
pre-determined breaking point ``x`` in ``[-1, 1]`` (``+1`` at the pole the
band points to).  An observable at angle ``setting`` projects onto the band at
``cos(setting - orientation)``; the outcome is ``+1`` when the break lies
between the ``+1`` pole and that projection point.

All scalar functions here are pure; the ``*_many`` helpers are their
vectorized counterparts used by the Monte Carlo estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class BandShare:
    """Band orientation (radians) plus breaking point."""

    orientation: float = 0.0
    x: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "orientation", _finite("orientation", self.orientation))
        x = _finite("x", self.x)
        if not -1.0 <= x <= 1.0:
            raise ValueError(f"breaking point must lie in [-1, 1], got {x!r}")
        object.__setattr__(self, "x", x)


def sgn(value: float) -> int:
    """Sign with sgn(0) = +1."""
    return 1 if value >= 0 else -1


def band_outcome(setting: float, share: BandShare) -> int:
    """+1 iff cos(setting - orientation) >= x."""
    setting = _finite("setting", setting)
    return sgn(math.cos(setting - share.orientation) - share.x)


def band_outcome_many(setting, orientation, x) -> np.ndarray:
    proj = np.cos(np.asarray(setting, dtype=float) - np.asarray(orientation, dtype=float))
    return np.where(proj >= x, 1, -1).astype(np.int64)


def prob_plus(alpha: float) -> float:
    return (1.0 + math.cos(alpha)) / 2.0


def prob_minus(alpha: float) -> float:
    return 1.0 - prob_plus(alpha)


def single_expectation(alpha: float) -> float:
    return math.cos(alpha)


def pair_expectation(alpha: float, beta: float, anticorrelated: bool = False) -> float:
    """Correlation of two readings of one share, x uniform on [-1, 1].

    The product is -1 exactly when x falls between the two projection
    points, a segment of length |cos(alpha) - cos(beta)| out of 2.  This is
    the sign-free form of ``1 + (cos a - cos b) sgn(a - b)``.

    ``anticorrelated`` flips the overall sign, for the convention where the
    second band is the first one rotated by 180 degrees.
    """
    e = 1.0 - abs(math.cos(alpha) - math.cos(beta))
    return -e if anticorrelated else e


def adaptive_expectation(theta: float) -> float:
    """One setting aligned with the share, the other at relative angle theta."""
    return math.cos(theta)


def uniform_orientation_expectation(theta: float) -> float:
    """Average of the linear band law over orientations uniform on [0, pi]."""
    theta = _finite("theta", theta)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    return 1.0 - (2.0 / math.pi) * math.sin(theta)


def uniform_orientation_integrand(alpha: float, theta: float) -> float:
    return 1.0 + math.cos(alpha) - math.cos(alpha - theta)
