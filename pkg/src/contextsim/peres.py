"""Peres' bomb-fragment model.

A bomb at rest splits into two fragments with angular momenta ``J`` and
``-J``.  Observer A reads ``sign(a . J)`` on fragment one, observer B reads
``sign(b . -J)`` on fragment two.  With ``J`` uniform on the sphere the
correlation is linear in the angle between ``a`` and ``b``.
"""

from __future__ import annotations

import math

import numpy as np

from contextsim import rng as _rng

UNIT_TOL = 1e-12

Direction3 = tuple[float, float, float]

Z_HAT: Direction3 = (0.0, 0.0, 1.0)
X_HAT: Direction3 = (1.0, 0.0, 0.0)


def as_direction(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"direction must be a finite 3-vector, got {v!r}")
    norm = math.sqrt(float(arr @ arr))
    if abs(norm - 1.0) > UNIT_TOL:
        raise ValueError(f"direction must have unit norm, |v| = {norm!r}")
    return arr


def _sign(value: float) -> int:
    return 1 if value >= 0 else -1


def peres_outcome(direction, j) -> int:
    return _sign(float(as_direction(direction) @ as_direction(j)))


def peres_pair_outcomes(j, dir_a, dir_b) -> tuple[int, int]:
    """Outcomes on fragment one (carrying j) and fragment two (carrying -j)."""
    j = as_direction(j)
    return peres_outcome(dir_a, j), peres_outcome(dir_b, -j)


def peres_correlation_analytic(theta: float) -> float:
    theta = float(theta)
    if not (math.isfinite(theta) and 0.0 <= theta <= math.pi):
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    return 2.0 * theta / math.pi - 1.0


def direction_in_xz(theta: float) -> np.ndarray:
    """Unit vector at polar angle theta from z in the x-z plane."""
    return np.array([math.sin(theta), 0.0, math.cos(theta)])


def _sphere_from_uniforms(u_z, u_phi) -> np.ndarray:
    z = 2.0 * np.asarray(u_z) - 1.0
    phi = 2.0 * math.pi * np.asarray(u_phi)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def sample_direction_uniform(stream: _rng.CounterStream) -> np.ndarray:
    """One direction uniform on the unit sphere (z and azimuth uniform)."""
    u_z = stream.random()
    u_phi = stream.random()
    return _sphere_from_uniforms(u_z, u_phi)


def sample_directions(seed: int, index, tag: str = "peres") -> np.ndarray:
    """Vectorized sphere draws, one per trial index, shape (n, 3)."""
    u_z = _rng.uniform(seed, f"{tag}/z", index)
    u_phi = _rng.uniform(seed, f"{tag}/phi", index)
    return _sphere_from_uniforms(u_z, u_phi)


def pair_products(js: np.ndarray, dir_a, dir_b) -> tuple[np.ndarray, int]:
    """Per-share products A*B with exact-zero dot products dropped.

    Returns the products of the surviving shares and the number of shares
    discarded as ties.
    """
    da = js @ np.asarray(dir_a, dtype=float)
    db = -(js @ np.asarray(dir_b, dtype=float))
    keep = (da != 0.0) & (db != 0.0)
    prod = np.where(da[keep] > 0, 1, -1) * np.where(db[keep] > 0, 1, -1)
    return prod.astype(np.int64), int(keep.size - np.count_nonzero(keep))
