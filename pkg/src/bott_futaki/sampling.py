"""Seeded generators of Bott matrices, Kähler classes and test polytopes."""

from __future__ import annotations

import random
from fractions import Fraction

from .bott import BottMatrix, canonical_kahler_class, is_kahler_class


def random_rational(rng: random.Random, magnitude: int = 4, max_den: int = 6) -> Fraction:
    den = rng.randint(1, max_den)
    return Fraction(rng.randint(-magnitude * den, magnitude * den), den)


def random_bott_matrix(rng: random.Random, n: int, lo: int = -2, hi: int = 2) -> BottMatrix:
    return BottMatrix.from_entries(n, [rng.randint(lo, hi) for _ in range(n * (n - 1) // 2)])


def random_kahler_class(A: BottMatrix, rng: random.Random, tries: int = 200) -> tuple:
    """Perturb the canonical class by small rationals until it is a Kähler class."""
    base = canonical_kahler_class(A)
    for _ in range(tries):
        a = tuple(x + Fraction(rng.randint(-6, 12), rng.randint(2, 8)) for x in base)
        if is_kahler_class(A, a):
            return a
    return base


def random_unimodular(rng: random.Random, n: int, bound: int = 3) -> list[list[int]]:
    """Product of random elementary integer matrices, entries kept within ``bound`` where possible."""
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-1, 1])
        row = [a + c * b for a, b in zip(U[i], U[j])]
        if max(abs(x) for x in row) <= bound:
            U[i] = row
    if rng.random() < 0.5:
        k = rng.randrange(n)
        U[k] = [-x for x in U[k]]
    return U
