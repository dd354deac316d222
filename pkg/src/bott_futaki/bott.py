"""Bott towers: fans, primitive collections and moment polytopes from the Bott matrix."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .errors import BudgetExceeded, NotBottMatrix
from .polytope import HalfSpace, HPolytope, det, rank, vertex_enumerate

MAX_STAGES = 10


@dataclass(frozen=True)
class BottMatrix:
    """Lower triangular unipotent integer matrix.

    ``below[j][i]`` (for ``i < j``) is the entry in row ``j``, column ``i``,
    i.e. ``a_j^i`` in 0-based indices.  Rows are stored ragged:
    ``below[j]`` has length ``j``.
    """

    below: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.below)
        for j, row in enumerate(rows):
            if len(row) != j:
                raise NotBottMatrix(f"row {j} must have {j} below-diagonal entries")
        if not rows:
            raise NotBottMatrix("a Bott matrix needs at least one stage")
        object.__setattr__(self, "below", rows)

    @classmethod
    def identity(cls, n: int) -> BottMatrix:
        return cls(tuple((0,) * j for j in range(n)))

    @classmethod
    def from_rows(cls, matrix: Sequence[Sequence[int]]) -> BottMatrix:
        """Accept a full square matrix and validate its unipotent lower-triangular shape."""
        n = len(matrix)
        for j, row in enumerate(matrix):
            if len(row) != n:
                raise NotBottMatrix("matrix is not square")
            if int(row[j]) != 1:
                raise NotBottMatrix(f"diagonal entry ({j + 1},{j + 1}) is not 1")
            if any(int(x) != 0 for x in row[j + 1:]):
                raise NotBottMatrix(f"row {j + 1} has a nonzero entry above the diagonal")
        return cls(tuple(tuple(row[:j]) for j, row in enumerate(matrix)))

    @classmethod
    def from_entries(cls, n: int, entries: Sequence[int]) -> BottMatrix:
        """Below-diagonal entries listed row by row: a_2^1, a_3^1, a_3^2, ..."""
        entries = list(entries)
        if len(entries) != n * (n - 1) // 2:
            raise NotBottMatrix(f"expected {n * (n - 1) // 2} entries for n={n}")
        rows, k = [], 0
        for j in range(n):
            rows.append(tuple(entries[k:k + j]))
            k += j
        return cls(tuple(rows))

    @property
    def n(self) -> int:
        return len(self.below)

    def entry(self, row: int, col: int) -> int:
        if row == col:
            return 1
        if col > row:
            return 0
        return self.below[row][col]

    def rows(self) -> list[list[int]]:
        return [[self.entry(r, c) for c in range(self.n)] for r in range(self.n)]

    def column(self, i: int) -> list[int]:
        return [self.entry(r, i) for r in range(self.n)]

    def is_identity(self) -> bool:
        return not any(any(row) for row in self.below)


@dataclass(frozen=True)
class BottFan:
    """Rays ordered ``(u_1, e_1, ..., u_n, e_n)``; pair ``k`` is rays ``2k, 2k+1``."""

    n: int
    rays: tuple

    @property
    def pairs(self) -> tuple:
        return tuple((2 * k, 2 * k + 1) for k in range(self.n))

    def pair_of(self, ray: int) -> int:
        return ray // 2

    def partner(self, ray: int) -> int:
        return ray ^ 1

    def maximal_cones(self):
        """One ray from each primitive collection, as ray-index tuples."""
        for choice in product((0, 1), repeat=self.n):
            yield tuple(2 * k + c for k, c in enumerate(choice))


def fan_from_matrix(A: BottMatrix) -> BottFan:
    n = A.n
    rays = []
    for i in range(n):
        rays.append(tuple(-x for x in A.column(i)))
        rays.append(tuple(int(k == i) for k in range(n)))
    return BottFan(n, tuple(rays))


def presentation_twist(A: BottMatrix) -> int:
    """Number of stages whose column carries a nonzero below-diagonal entry."""
    return sum(1 for i in range(A.n) if any(A.entry(r, i) for r in range(i + 1, A.n)))


def pair_sums(fan: BottFan) -> list[tuple]:
    return [tuple(a + b for a, b in zip(fan.rays[i], fan.rays[j])) for i, j in fan.pairs]


def is_product_of_lines(A: BottMatrix) -> bool:
    """True iff every primitive collection sums to zero, i.e. the fan is that of (P^1)^n."""
    return all(not any(s) for s in pair_sums(fan_from_matrix(A)))


def cones_are_smooth(fan: BottFan) -> bool:
    return all(abs(det([fan.rays[r] for r in cone])) == 1 for cone in fan.maximal_cones())


def _check_budget(n: int) -> None:
    if n > MAX_STAGES:
        raise BudgetExceeded(f"n={n} exceeds the stage budget {MAX_STAGES}")


def moment_polytope(A: BottMatrix | BottFan, a: Sequence) -> HPolytope:
    """``{x : <x, v_i> >= -a_i}`` in ray order; boundedness is not asserted."""
    fan = A if isinstance(A, BottFan) else fan_from_matrix(A)
    _check_budget(fan.n)
    if len(a) != 2 * fan.n:
        raise ValueError(f"Kähler class needs {2 * fan.n} offsets, got {len(a)}")
    return HPolytope(fan.n, tuple(HalfSpace(v, Fraction(x)) for v, x in zip(fan.rays, a)))


def is_delzant_with_fan(P: HPolytope) -> bool:
    """Bounded, full-dimensional, every half-space a facet, 2^n simple unimodular vertices."""
    n = P.dim
    if P.is_empty or not P.is_bounded or not P.is_full_dimensional:
        return False
    vp = vertex_enumerate(P)
    if len(vp.vertices) != 2 ** n:
        return False
    for tight in vp.tight:
        if len(tight) != n or abs(det([P.halfspaces[j].normal for j in tight])) != 1:
            return False
    # each half-space must be tight on an (n-1)-face
    for j in range(len(P.halfspaces)):
        pts = [v for v, t in zip(vp.vertices, vp.tight) if j in t]
        if len(pts) < n or rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]) != n - 1:
            return False
    return True


def is_kahler_class(A: BottMatrix, a: Sequence) -> bool:
    _check_budget(A.n)
    return is_delzant_with_fan(moment_polytope(A, a))


def canonical_kahler_class(A: BottMatrix) -> tuple:
    """A Kähler class whose polytope is combinatorially a cube.

    With ``x_i >= 0`` and ``x_i <= c_i - sum_{j>i} a_j^i x_j``, and ``M_j`` a bound
    on ``x_j``, the choice ``c_i = 1 + sum_{j>i} |a_j^i| M_j`` keeps every upper
    bound at least 1.
    """
    n = A.n
    c = [Fraction(0)] * n
    bound = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        spread = sum(abs(A.entry(j, i)) * bound[j] for j in range(i + 1, n))
        c[i] = 1 + spread
        bound[i] = c[i] + spread
    out = []
    for i in range(n):
        out += [c[i], Fraction(0)]
    return tuple(out)
