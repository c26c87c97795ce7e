"""Correlation polytopes and their facets, in exact integer arithmetic.

Facets are found by brute force: every d-subset of vertices that spans a
hyperplane yields an integer normal (generalized cross product via cofactor
expansion); the hyperplane is kept when all vertices lie weakly on one side.
At desk scale (d <= 8, a few dozen vertices) this is fast and bit-exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from contextsim.urn import SingletPair, enumerate_assignments, state_products

MAX_DIM = 8

Vector = tuple[int, ...]


class DegenerateVertexSetError(ValueError):
    def __init__(self, rank: int, dim: int):
        self.rank = rank
        self.dim = dim
        super().__init__(f"vertices span an affine subspace of rank {rank}, need full rank {dim}")


@dataclass(frozen=True, order=True)
class Facet:
    """Inequality ``coeffs . p <= rhs``."""

    coeffs: tuple[int, ...]
    rhs: int

    def holds(self, point: Sequence) -> bool:
        return sum(c * p for c, p in zip(self.coeffs, point)) <= self.rhs

    def is_tight(self, point: Sequence) -> bool:
        return sum(c * p for c, p in zip(self.coeffs, point)) == self.rhs

    def to_line(self) -> str:
        return " ".join(str(c) for c in self.coeffs) + f" <= {self.rhs}"

    @classmethod
    def from_line(cls, line: str) -> "Facet":
        lhs, rhs = line.split("<=")
        return cls(tuple(int(t) for t in lhs.split()), int(rhs))


def det(matrix: Sequence[Sequence[int]]) -> int:
    """Exact determinant of an integer matrix (Bareiss elimination)."""
    m = [list(map(int, row)) for row in matrix]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix (fraction-free elimination)."""
    m = [list(map(int, row)) for row in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f, g = m[i][c], m[r][c]
                m[i] = [g * x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def affine_rank(points: Sequence[Vector]) -> int:
    p0 = points[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in points[1:]])


def hyperplane_normal(points: Sequence[Vector]) -> tuple[int, ...]:
    """Integer normal of the hyperplane through d points in Z^d.

    Component j is the signed cofactor of the (d-1) x d difference matrix
    with column j removed; all zeros if the points are affinely dependent.
    """
    d = len(points[0])
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    normal = []
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in diffs]
        normal.append((-1) ** j * det(minor))
    return tuple(normal)


def _normalize(coeffs: Sequence[int], rhs: int) -> Facet:
    g = math.gcd(*coeffs, rhs)
    return Facet(tuple(c // g for c in coeffs), rhs // g)


def _as_vertex_set(points: Iterable[Sequence[int]]) -> list[Vector]:
    pts = sorted({tuple(int(v) for v in p) for p in points})
    if not pts:
        raise ValueError("vertex set is empty")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("all vertices must have the same dimension")
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
    return pts


def raw_vertices() -> list[Vector]:
    """The 16 two-valued states (a, a', b, b') as points of {-1, 1}^4."""
    return [s.as_tuple() for s in enumerate_assignments()]


def product_vertices() -> list[Vector]:
    """Distinct (ab, ab', a'b, a'b') over the 16 assignments of one ball."""
    pts = {tuple(s.a * t for t in (s.b, s.b_prime)) + tuple(s.a_prime * t for t in (s.b, s.b_prime))
           for s in enumerate_assignments()}
    return sorted(pts)


def singlet_product_vertices() -> list[Vector]:
    """Product vertices as seen through the singlet pairs (B reads the negated ball)."""
    return sorted({state_products(SingletPair.from_assignment(s)) for s in enumerate_assignments()})


def enumerate_facets(points: Iterable[Sequence[int]]) -> list[Facet]:
    pts = _as_vertex_set(points)
    d = len(pts[0])
    r = affine_rank(pts)
    if r < d:
        raise DegenerateVertexSetError(r, d)

    found: set[Facet] = set()
    for subset in itertools.combinations(pts, d):
        normal = hyperplane_normal(subset)
        if not any(normal):
            continue
        level = sum(c * v for c, v in zip(normal, subset[0]))
        values = [sum(c * v for c, v in zip(normal, p)) for p in pts]
        if all(v <= level for v in values):
            found.add(_normalize(normal, level))
        elif all(v >= level for v in values):
            found.add(_normalize([-c for c in normal], -level))
    return sorted(found)


CANONICAL_SIGNS = (1, 1, 1, -1)


def chsh_sum(e: Sequence[float], signs: Sequence[int] = CANONICAL_SIGNS) -> float:
    if len(e) != 4 or len(signs) != 4:
        raise ValueError("need four correlations and four signs")
    return sum(s * v for s, v in zip(signs, e))


def chsh_facets() -> list[Facet]:
    """The eight inequalities +-E1 +-E2 +-E3 +-E4 <= 2 with an odd count of minus signs."""
    out = []
    for signs in itertools.product((-1, 1), repeat=4):
        if signs.count(-1) % 2 == 1:
            out.append(Facet(signs, 2))
    return sorted(out)


def format_facets(facets: Iterable[Facet]) -> str:
    return "".join(f.to_line() + "\n" for f in facets)
