"""Generalized urn of two-valued states for the CHSH configuration.

Each ball pair carries values for all four observables ``a, a', b, b'`` on the
first ball and their negations on the second.  Observer A sees one of
``a, a'`` on the first ball, observer B one of ``b, b'`` on the second.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from contextsim import rng as _rng

Side = Literal["A", "B"]
Context = Literal["unprimed", "primed"]

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Assignment:
    a: int
    a_prime: int
    b: int
    b_prime: int

    def __post_init__(self):
        for v in self.as_tuple():
            if v not in (-1, 1):
                raise ValueError(f"assignment values must be +1 or -1, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.a_prime, self.b, self.b_prime)

    def negated(self) -> "Assignment":
        return Assignment(-self.a, -self.a_prime, -self.b, -self.b_prime)


@dataclass(frozen=True)
class SingletPair:
    first: Assignment
    second: Assignment

    def __post_init__(self):
        if self.second != self.first.negated():
            raise ValueError("second ball must carry the negated values of the first")

    @classmethod
    def from_assignment(cls, first: Assignment) -> "SingletPair":
        return cls(first, first.negated())

    def swapped(self) -> "SingletPair":
        return SingletPair(self.second, self.first)


def enumerate_assignments() -> list[Assignment]:
    """All 16 assignments in lexicographic order with -1 < +1."""
    return [Assignment(*v) for v in itertools.product((-1, 1), repeat=4)]


def observe(pair: SingletPair, side: Side, context: Context) -> int:
    if context not in ("unprimed", "primed"):
        raise ValueError(f"unknown context {context!r}")
    if side == "A":
        ball = pair.first
        return ball.a if context == "unprimed" else ball.a_prime
    if side == "B":
        ball = pair.second
        return ball.b if context == "unprimed" else ball.b_prime
    raise ValueError(f"unknown side {side!r}")


# term order throughout: (ab, ab', a'b, a'b')
TERMS: tuple[tuple[Context, Context], ...] = (
    ("unprimed", "unprimed"),
    ("unprimed", "primed"),
    ("primed", "unprimed"),
    ("primed", "primed"),
)


def state_products(pair: SingletPair) -> tuple[int, int, int, int]:
    return tuple(observe(pair, "A", ca) * observe(pair, "B", cb) for ca, cb in TERMS)


@dataclass(frozen=True)
class UrnDistribution:
    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if len(w) != 16:
            raise ValueError(f"need 16 weights, got {len(w)}")
        if any(not np.isfinite(v) or v < 0 for v in w):
            raise ValueError("weights must be finite and nonnegative")
        if abs(sum(w) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls) -> "UrnDistribution":
        return cls((1.0 / 16,) * 16)

    @classmethod
    def point_mass(cls, assignment: Assignment) -> "UrnDistribution":
        idx = enumerate_assignments().index(assignment)
        return cls(tuple(1.0 if i == idx else 0.0 for i in range(16)))

    @classmethod
    def mixture(cls, parts: Sequence[tuple[float, "UrnDistribution"]]) -> "UrnDistribution":
        w = np.zeros(16)
        for lam, dist in parts:
            w += lam * np.asarray(dist.weights)
        return cls(tuple(w))


def urn_expectations(dist: UrnDistribution) -> tuple[float, float, float, float]:
    """Convex sum of the per-state products over the urn weights."""
    if not isinstance(dist, UrnDistribution):
        dist = UrnDistribution(tuple(dist))
    table = np.array([state_products(SingletPair.from_assignment(s)) for s in enumerate_assignments()])
    return tuple(float(v) for v in np.asarray(dist.weights) @ table)


def max_abs_chsh_over_states() -> int:
    """Largest |E_ab + E_ab' + E_a'b - E_a'b'| over the 16 deterministic states."""
    best = 0
    for s in enumerate_assignments():
        e = state_products(SingletPair.from_assignment(s))
        best = max(best, abs(e[0] + e[1] + e[2] - e[3]))
    return best


def sample_states(dist: UrnDistribution, seed: int, index, tag: str = "urn") -> np.ndarray:
    """Indices into ``enumerate_assignments()`` drawn by inverse CDF."""
    cdf = np.cumsum(dist.weights)
    cdf[-1] = 1.0
    u = _rng.uniform(seed, tag, index)
    return np.searchsorted(cdf, u, side="right")


def linear_law_distribution(theta: float) -> UrnDistribution:
    """Urn mixture whose (a, b) correlation is 2 theta / pi - 1.

    Mixes the all-plus state (E_ab = -1) with the state a = +1, b = -1
    (E_ab = +1) in proportion theta / pi.
    """
    lam = float(theta) / np.pi
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"theta must lie in [0, pi], got {theta!r}")
    return UrnDistribution.mixture(
        [
            (1.0 - lam, UrnDistribution.point_mass(Assignment(1, 1, 1, 1))),
            (lam, UrnDistribution.point_mass(Assignment(1, 1, -1, -1))),
        ]
    )


def debug_view(pair: SingletPair) -> dict[str, int]:
    """Every pairwise product on the first ball, cross-context ones included.

    Not used by any protocol statistic: an observer never sees both
    contexts of one side in a run.
    """
    names = ("a", "a'", "b", "b'")
    vals = pair.first.as_tuple()
    return {f"{names[i]}*{names[j]}": vals[i] * vals[j] for i, j in itertools.combinations(range(4), 2)}
