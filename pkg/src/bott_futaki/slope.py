"""Nefness, Seshadri constants, intersection numbers and the slope invariant xi on Bott manifolds.

Divisor classes are coefficient vectors ``b`` over the torus-invariant prime
divisors, in ray order; ``b`` corresponds to the polytope ``{<x, v_i> >= -b_i}``.
Only smooth prime divisors ``D = D_{i0}`` are handled, so the blow-up in the
Seshadri constant is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import factorial
from typing import Sequence

from scipy import integrate

from .bott import BottFan, moment_polytope
from .errors import InvariantViolation, NotAmple, NotNef
from .futaki import futaki_linear
from .poly import PiecewisePolynomial
from .polytope import _solve, boundary_volume, dot, face_measure, facet_measures, volume


@dataclass(frozen=True)
class Wall:
    """Torus-invariant curve ``C_tau`` for the wall between the two cones using pair ``pair``."""

    pair: int
    rays: tuple
    degrees: tuple  # (D_j . C_tau) for every ray j


@lru_cache(maxsize=256)
def walls(fan: BottFan) -> tuple:
    """All invariant curves, via the wall relation ``v + v' + sum beta_i w_i = 0``."""
    n = fan.n
    out = []
    for k in range(n):
        others = [j for j in range(n) if j != k]
        u, e = fan.rays[2 * k], fan.rays[2 * k + 1]
        target = [-(a + b) for a, b in zip(u, e)]
        for choice in product((0, 1), repeat=n - 1):
            wall = tuple(2 * j + c for j, c in zip(others, choice))
            cols = [fan.rays[r] for r in wall] + [u]
            rows = [[col[i] for col in cols] for i in range(n)]
            sol = _solve(rows, target)
            if sol is None or sol[-1] != 0:
                raise InvariantViolation(f"wall relation fails for pair {k}, wall {wall}")
            deg = [Fraction(0)] * (2 * n)
            deg[2 * k] = deg[2 * k + 1] = Fraction(1)
            for r, beta in zip(wall, sol):
                deg[r] = beta
            out.append(Wall(k, wall, tuple(deg)))
    return tuple(out)


def curve_degrees(fan: BottFan, N: Sequence) -> list[Fraction]:
    return [dot(w.degrees, N) for w in walls(fan)]


def is_nef(fan: BottFan, N: Sequence) -> bool:
    return all(x >= 0 for x in curve_degrees(fan, N))


def is_ample(fan: BottFan, N: Sequence) -> bool:
    return all(x > 0 for x in curve_degrees(fan, N))


def _require_ample(fan, L):
    if not is_ample(fan, L):
        raise NotAmple()


def divisor(fan: BottFan, i0: int, scale=1) -> tuple:
    return tuple(Fraction(scale) if j == i0 else Fraction(0) for j in range(2 * fan.n))


def canonical_divisor(fan: BottFan) -> tuple:
    return (Fraction(-1),) * (2 * fan.n)


def combine(*terms) -> tuple:
    """Rational linear combination of classes given as ``(coefficient, class)`` pairs."""
    size = len(terms[0][1])
    return tuple(sum((Fraction(c) * Fraction(N[j]) for c, N in terms), Fraction(0)) for j in range(size))


def seshadri_constant(fan: BottFan, L: Sequence, i0: int) -> Fraction:
    """Largest ``x`` with ``L - x D_{i0}`` nef: the smallest positive wall threshold."""
    _require_ample(fan, L)
    thresholds = [
        dot(w.degrees, L) / w.degrees[i0] for w in walls(fan) if w.degrees[i0] > 0
    ]
    if not thresholds:
        raise InvariantViolation("no wall bounds the Seshadri constant")
    return min(thresholds)


def intersection_number(fan: BottFan, *classes: Sequence) -> Fraction:
    """``(N_1 . ... . N_n)`` by polarizing the volume of the moment polytopes.

    The first ``n - 1`` classes must be nef; the last may be arbitrary and is
    expanded linearly over the prime divisors when it is not nef.
    """
    n = fan.n
    if len(classes) != n:
        raise ValueError(f"need {n} classes, got {len(classes)}")
    if any(not is_nef(fan, N) for N in classes[:-1]):
        raise NotNef("intersection needs nef classes in the first n-1 slots")
    last = classes[-1]
    if is_nef(fan, last):
        total = Fraction(0)
        for r in range(1, n + 1):
            for sub in combinations(range(n), r):
                P = moment_polytope(fan, combine(*((1, classes[k]) for k in sub)))
                total += (-1) ** (n - r) * volume(P)
        return total
    return sum(
        (Fraction(c) * mixed_facet(fan, classes[:-1], j) for j, c in enumerate(last) if c),
        Fraction(0),
    )


def mixed_facet(fan: BottFan, classes: Sequence, j: int) -> Fraction:
    """``(N_1 . ... . N_{n-1} . D_j)`` for nef ``N_k`` by polarizing facet measures."""
    m = len(classes)
    total = Fraction(0)
    for r in range(1, m + 1):
        for sub in combinations(range(m), r):
            P = moment_polytope(fan, combine(*((1, classes[k]) for k in sub)))
            total += (-1) ** (m - r) * face_measure(P, j)
    return total


def mu_L(fan: BottFan, L: Sequence) -> Fraction:
    """``(L^{n-1} . -K_X) / (L^n) = Vol(dP_L) / (n Vol(P_L))``."""
    _require_ample(fan, L)
    P = moment_polytope(fan, L)
    return boundary_volume(P) / (fan.n * volume(P))


def _chop_thresholds(fan: BottFan, L: Sequence, i0: int, lo, hi) -> list[Fraction]:
    """Values of ``x`` in ``(lo, hi)`` where the vertex combinatorics of ``P_{L - x D}`` can change."""
    n = fan.n
    normals = fan.rays
    a0 = [Fraction(x) for x in L]
    slope = [Fraction(-1) if j == i0 else Fraction(0) for j in range(2 * n)]
    found = set()
    for sub in combinations(range(2 * n), n):
        rows = [normals[j] for j in sub]
        p0 = _solve(rows, [-a0[j] for j in sub])
        if p0 is None:
            continue
        p1 = _solve(rows, [-slope[j] for j in sub])
        for k in range(2 * n):
            if k in sub:
                continue
            c0 = dot(p0, normals[k]) + a0[k]
            c1 = dot(p1, normals[k]) + slope[k]
            if c1 != 0:
                x = -c0 / c1
                if lo < x < hi:
                    found.add(x)
    return sorted(found)


def xi_integrand(fan: BottFan, L: Sequence, i0: int, mu: Fraction, x) -> Fraction:
    """``((L - xD)^{n-1} . (K_X + mu L + (1 - mu x) D))`` for ``0 < x < eps``."""
    n = fan.n
    x = Fraction(x)
    P = moment_polytope(fan, combine((1, L), (-x, divisor(fan, i0))))
    fm = facet_measures(P)
    coeffs = combine((1, canonical_divisor(fan)), (mu, L), (1 - mu * x, divisor(fan, i0)))
    return factorial(n - 1) * dot(coeffs, fm)


def xi_profile(fan: BottFan, L: Sequence, i0: int) -> PiecewisePolynomial:
    """The integrand of xi on ``[0, eps]`` as an exact piecewise polynomial."""
    eps = seshadri_constant(fan, L, i0)
    mu = mu_L(fan, L)
    bps = [Fraction(0), *_chop_thresholds(fan, L, i0, 0, eps), eps]
    return PiecewisePolynomial.from_function(
        lambda x: xi_integrand(fan, L, i0, mu, x), bps, fan.n
    )


def xi_invariant(fan: BottFan, L: Sequence, i0: int) -> Fraction:
    return fan.n * xi_profile(fan, L, i0).integrate()


def xi_quadrature(fan: BottFan, L: Sequence, i0: int) -> float:
    """Floating-point adaptive quadrature of the same integrand (independent check)."""
    eps = seshadri_constant(fan, L, i0)
    mu = mu_L(fan, L)

    def h(x: float) -> float:
        x = min(max(Fraction(x), Fraction(0)), eps)
        if x in (0, eps):
            # endpoint: use the limit from inside, the chopped polytope may be flat at eps
            x = eps / 10**12 if x == 0 else eps * (1 - Fraction(1, 10**12))
        return float(xi_integrand(fan, L, i0, mu, x))

    val, _ = integrate.quad(h, 0.0, float(eps), epsabs=0.0, epsrel=1e-12, limit=200)
    return fan.n * val


@dataclass(frozen=True)
class StabilityReport:
    divisor: int
    epsilon: Fraction
    mu: Fraction
    xi: Fraction
    assumption_holds: bool
    futaki_vD: Fraction
    consistent: bool | None = None


def _divisor_report(fan: BottFan, L: Sequence, i0: int) -> StabilityReport:
    eps = seshadri_constant(fan, L, i0)
    chopped = combine((1, L), (-eps, divisor(fan, i0)))
    top = intersection_number(fan, *([chopped] * fan.n))
    return StabilityReport(
        divisor=i0,
        epsilon=eps,
        mu=mu_L(fan, L),
        xi=xi_invariant(fan, L, i0),
        assumption_holds=top == 0,
        futaki_vD=futaki_linear(moment_polytope(fan, L), fan.rays[i0]),
    )


def stability_pair(fan: BottFan, L: Sequence, i0: int) -> tuple[StabilityReport, StabilityReport]:
    """Reports for ``D_{i0}`` and its primitive-collection partner, with the cross-check filled in.

    When the degeneration assumption holds on both sides, the pair is
    consistent iff vanishing of both Futaki values coincides with both xi
    being nonnegative.  Otherwise the check is vacuous.
    """
    _require_ample(fan, L)
    mine = _divisor_report(fan, L, i0)
    other = _divisor_report(fan, L, fan.partner(i0))
    if mine.assumption_holds and other.assumption_holds:
        vanish = mine.futaki_vD == 0 and other.futaki_vD == 0
        consistent = vanish == (mine.xi >= 0 and other.xi >= 0)
    else:
        consistent = True
    return replace(mine, consistent=consistent), replace(other, consistent=consistent)


def stability_report(fan: BottFan, L: Sequence, i0: int) -> StabilityReport:
    return stability_pair(fan, L, i0)[0]
