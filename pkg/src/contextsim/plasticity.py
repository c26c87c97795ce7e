"""Squeezed elastic-band models.

The outer circle is replaced by an ellipse with horizontal semi-axis ``a``
and vertical semi-axis ``b`` while the band keeps spanning the vertical
diameter.  Observables are placed by arc-length fraction ``s`` along the
boundary, starting at the top pole and running clockwise; an observable's
projection onto the band, renormalized to the band coordinate, is
``f(s) = y(s) / b``.  Breaking-point mechanics are unchanged, so the band
correlation law carries over with ``cos`` replaced by ``f``.

Boundary point at parameter t: ``(a sin t, b cos t)``, so ``f = cos t`` and
only the map from arc length to t depends on the shape.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from contextsim import rng as _rng
from contextsim.protocol import CorrelationEstimate, run_estimate

MIN_RESOLUTION = 64
MAX_RESOLUTION = 1 << 16
INTERP_TOL = 1e-4
_PANELS = 256
_NEWTON_TOL = 1e-15


@dataclass(frozen=True)
class EllipseShape:
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"semi-axis {name} must be positive, got {v!r}")
            object.__setattr__(self, name, v)

    def speed(self, t):
        return np.hypot(self.a * np.cos(t), self.b * np.sin(t))


class EllipseProfile:
    """Arc-length to projection map for one shape, evaluated by inversion.

    The quarter arc from the top pole to the right equator is split into
    panels integrated adaptively; a query solves ``S(t) = s L`` by Newton
    steps inside its panel.  The other three quarters follow by symmetry.
    """

    def __init__(self, shape: EllipseShape, panels: int = _PANELS):
        self.shape = shape
        edges = np.linspace(0.0, math.pi / 2, panels + 1)
        edges[-1] = math.pi / 2
        pieces = [self._arc(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
        self._edges = edges
        self._cum = np.concatenate([[0.0], np.cumsum(pieces)])
        self.quarter = float(self._cum[-1])
        self.perimeter = 4.0 * self.quarter

    def _arc(self, lo: float, hi: float) -> float:
        sh = self.shape
        val, _ = integrate.quad(lambda t: math.hypot(sh.a * math.cos(t), sh.b * math.sin(t)),
                                lo, hi, epsabs=1e-14 * max(sh.a, sh.b), epsrel=1e-13, limit=200)
        return val

    def _t_of_quarter_fraction(self, q: float) -> float:
        """Parameter t in [0, pi/2] reached after q of the quarter arc."""
        if q <= 0.0:
            return 0.0
        if q >= 1.0:
            return math.pi / 2
        target = q * self.quarter
        k = int(np.searchsorted(self._cum, target, side="right")) - 1
        k = min(max(k, 0), len(self._edges) - 2)
        lo, hi = self._edges[k], self._edges[k + 1]
        base = self._cum[k]
        t = lo + (hi - lo) * (target - base) / (self._cum[k + 1] - base)
        for _ in range(50):
            g = base + self._arc(lo, t) - target
            step = g / float(self.shape.speed(t))
            t_new = min(max(t - step, lo), hi)
            if abs(t_new - t) <= _NEWTON_TOL:
                t = t_new
                break
            t = t_new
        return t

    def __call__(self, s: float) -> float:
        s = float(s) % 1.0
        if s > 0.5:
            s = 1.0 - s
        if s == 0.25:
            return 0.0
        if s > 0.25:
            return -self(0.5 - s)
        return math.cos(self._t_of_quarter_fraction(4.0 * s))


@functools.lru_cache(maxsize=64)
def profile_for(shape: EllipseShape) -> EllipseProfile:
    return EllipseProfile(shape)


@dataclass(frozen=True)
class ProfileTable:
    shape: EllipseShape
    s: np.ndarray
    f: np.ndarray

    def interpolate(self, s) -> np.ndarray:
        s = np.mod(np.asarray(s, dtype=float), 1.0)
        xs = np.append(self.s, 1.0)
        ys = np.append(self.f, self.f[0])
        return np.interp(s, xs, ys)

    @property
    def resolution(self) -> int:
        return int(self.s.size)


def _table(shape: EllipseShape, resolution: int) -> ProfileTable:
    prof = profile_for(shape)
    s = np.arange(resolution) / resolution
    quarter = resolution // 4 if resolution % 4 == 0 else None
    f = np.empty(resolution)
    for i, si in enumerate(s):
        if i > resolution // 2:
            f[i] = f[resolution - i]
        elif quarter is not None and quarter < i <= 2 * quarter:
            f[i] = -f[2 * quarter - i]
        else:
            f[i] = prof(si)
    return ProfileTable(shape, s, f)


def interpolation_error(coarse: ProfileTable, fine: ProfileTable) -> float:
    return float(np.max(np.abs(coarse.interpolate(fine.s) - fine.f)))


def arc_length_profile(shape: EllipseShape, resolution: int = MIN_RESOLUTION) -> ProfileTable:
    """Tabulated projection profile, refined until linear interpolation is within 1e-4."""
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}, got {resolution}")
    table = _table(shape, int(resolution))
    while table.resolution < MAX_RESOLUTION:
        finer = _table(shape, 2 * table.resolution)
        if interpolation_error(table, finer) < INTERP_TOL:
            return table
        table = finer
    return table


def squeezed_pair_expectation(shape: EllipseShape, alpha_frac: float, beta_frac: float) -> float:
    f = profile_for(shape)
    return 1.0 - abs(f(alpha_frac) - f(beta_frac))


def squeezed_adaptive_curve(shape: EllipseShape, grid) -> list[float]:
    f = profile_for(shape)
    out = []
    for t in grid:
        t = float(t)
        if not 0.0 <= t <= 0.5:
            raise ValueError(f"fraction must lie in [0, 0.5], got {t!r}")
        out.append(1.0 - abs(1.0 - f(t)))
    return out


def squeezed_adaptive_estimate(shape: EllipseShape, t: float, n: int, seed: int = 0,
                               workers: int = 1, tag: str = "squeeze") -> CorrelationEstimate:
    """Monte Carlo of the aligned protocol on the squeezed band.

    A sits on the band's top pole and always reads +1; B reads +1 iff the
    break lies below its projection f(t).
    """
    proj = profile_for(shape)(t)
    analytic = squeezed_adaptive_curve(shape, [t])[0]

    def kernel(idx):
        x = _rng.uniform(seed, f"{tag}/x", idx, -1.0, 1.0)
        return np.where(proj >= x, 1, -1).astype(np.int64), 0
    return run_estimate(kernel, n, analytic, workers)
