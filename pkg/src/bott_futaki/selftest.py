"""Invariant suites run by ``bott-futaki selftest``.

Each check returns ``(ok, detail)``; :func:`run_all` collects them in order.
The suites are sized to finish in a few seconds.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product
from math import factorial

from . import futaki as fk
from . import slope
from .errors import DegenerateSlice
from .bott import BottMatrix, cones_are_smooth, fan_from_matrix, is_product_of_lines, moment_polytope
from .poly import interpolate, pderiv, peval
from .polytope import (
    HPolytope,
    axis_profiles,
    boundary_moment_first,
    boundary_volume,
    clip_axis,
    facet_measure,
    facet_measures,
    slice_at,
    transform_unimodular,
    translate,
    volume,
)
from .sampling import random_bott_matrix, random_kahler_class, random_unimodular

HIRZEBRUCH = BottMatrix.from_rows([[1, 0], [1, 1]])


def _samples(seed, count, dims=(2, 3)):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        A = random_bott_matrix(rng, dims[k % len(dims)])
        out.append((A, random_kahler_class(A, rng), rng))
    return out


def check_reference_values():
    T = moment_polytope(HIRZEBRUCH, (2, 0, 0, 1))
    got = (volume(T), boundary_volume(T), boundary_moment_first(T, 1), fk.futaki_component(T, 1))
    want = (Fraction(5, 2), Fraction(7), Fraction(-4), Fraction(-2, 3))
    return got == want, f"trapezoid vol/bvol/bmom/F2 = {[str(x) for x in got]}"


def check_fan_smoothness():
    rng = random.Random(1)
    for n in range(1, 5):
        for _ in range(5):
            if not cones_are_smooth(fan_from_matrix(random_bott_matrix(rng, n))):
                return False, f"non-smooth cone for n={n}"
    return True, "all maximal cones unimodular"


def check_slicing_volume():
    for A, a, rng in _samples(2, 4):
        P = moment_polytope(A, a)
        axis = rng.randrange(A.n)
        prof = axis_profiles(P, axis)
        if prof.f.integrate() != volume(P):
            return False, f"integral of f differs from volume for {A.rows()}"
        for _ in range(5):
            u = prof.lo + (prof.hi - prof.lo) * Fraction(rng.randint(0, 97), 97)
            if volume(slice_at(P, axis, u)) != prof.f(u):
                return False, "slice volume differs from profile"
    return True, "volume = integral of slice profile"


def check_boundary_decomposition():
    for A, a, rng in _samples(3, 4):
        P = moment_polytope(A, a)
        axis = A.n - 1
        prof = axis_profiles(P, axis)
        s = prof.lo + (prof.hi - prof.lo) * Fraction(rng.randint(1, 9), 10)
        sub = translate(clip_axis(P, axis, prof.lo, s), [0] * axis + [-prof.lo])
        g = prof.g.restrict(prof.lo, s)
        f = prof.f
        lhs1 = boundary_volume(sub)
        rhs1 = g.integrate() + f(prof.lo) + f(s)
        lhs2 = boundary_moment_first(sub, axis)
        shifted = g.times_x() - g * prof.lo
        rhs2 = shifted.integrate() + (s - prof.lo) * f(s)
        if (lhs1, lhs2) != (rhs1, rhs2):
            return False, f"boundary decomposition fails for {A.rows()}"
    return True, "boundary volume and moment decompose along the axis"


def check_minkowski_derivative():
    for A, a, _ in _samples(4, 3):
        P = moment_polytope(A, a)
        for i in range(2 * A.n):
            h = Fraction(1, 1000)
            ts = [h * k for k in range(-(A.n // 2), A.n - A.n // 2 + 1)]
            vols = [volume(P.with_offsets([x + (t if j == i else 0) for j, x in enumerate(a)])) for t in ts]
            if peval(pderiv(interpolate(ts, vols)), 0) != facet_measure(P, i):
                return False, f"volume derivative differs from facet {i}"
    return True, "d Vol / d a_i = facet measure"


def check_unimodular_equivariance():
    rng = random.Random(5)
    for A, a, _ in _samples(5, 3):
        P = moment_polytope(A, a)
        U = random_unimodular(rng, A.n)
        Q = transform_unimodular(P, U)
        if volume(Q) != volume(P) or facet_measures(Q) != facet_measures(P):
            return False, "volume or facet measures changed under GL(n, Z)"
    return True, "GL(n, Z) invariance"


def check_translation_invariance():
    for A, a, rng in _samples(6, 3):
        P = moment_polytope(A, a)
        t = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(A.n)]
        if fk.futaki_vector(P) != fk.futaki_vector(translate(P, t)):
            return False, "Futaki vector changed under translation"
    return True, "Futaki vector translation invariant"


def check_product_vanishing():
    for n in (2, 3):
        A = BottMatrix.identity(n)
        for a, _, _ in [(random_kahler_class(A, random.Random(s)), 0, 0) for s in range(4)]:
            if any(fk.futaki_vector(moment_polytope(A, a))):
                return False, f"nonzero Futaki on (P^1)^{n}"
    return True, "Futaki vanishes on products of lines"


def check_pillar_identities():
    for A, a, rng in _samples(7, 4):
        base = a[: 2 * A.n - 2]
        try:
            prof = fk.pillar_profile(A, base)
        except DegenerateSlice:
            continue
        table = fk.derivative_table(prof, 4)
        if table.failures():
            return False, f"derivative relations fail: {table.failures()}"
        if not fk.check_third_derivative(prof)[2]:
            return False, "third derivative identity fails"
        F = prof.futaki
        for _ in range(3):
            s = prof.top * Fraction(rng.randint(1, 20), 20)
            if F(s) != fk.futaki_component(fk.pillar_polytope(A, base, s), A.n - 1):
                return False, "pillar polynomial differs from direct Futaki"
    return True, "pillar derivative table and direct evaluation agree"


def check_product_split():
    for A, a, rng in _samples(8, 3, dims=(2,)):
        Q = moment_polytope(A, a)
        h = Fraction(rng.randint(1, 9), rng.randint(1, 3))
        P = HPolytope(3, tuple((v + (0,), x) for v, x in zip(Q.normals, Q.offsets)) + (((0, 0, -1), h), ((0, 0, 1), 0)))
        res = fk.product_split(P, 2)
        if res is None or not res.verified:
            return False, "prism not recognized or scaling fails"
    return True, "prism Futaki scales by height squared"


def check_stability():
    fan = fan_from_matrix(HIRZEBRUCH)
    top, bottom = slope.stability_pair(fan, (2, 0, 0, 1), 2)
    ok = (
        (top.xi, bottom.xi) == (Fraction(-8, 15), Fraction(8, 15))
        and top.mu == Fraction(7, 5)
        and top.epsilon == bottom.epsilon == 1
        and top.assumption_holds
        and bottom.assumption_holds
        and top.consistent
    )
    return ok, f"xi = {top.xi}, {bottom.xi}"


def check_bridge_identity():
    for A, a, _ in _samples(9, 4):
        fan = fan_from_matrix(A)
        P = moment_polytope(A, a)
        lhs = -slope.intersection_number(fan, *([a] * (A.n - 1)), slope.canonical_divisor(fan))
        if lhs != factorial(A.n - 1) * boundary_volume(P):
            return False, "(L^{n-1}.-K) differs from (n-1)! Vol(dP)"
    return True, "(L^{n-1}.-K) = (n-1)! Vol(dP)"


def check_product_of_lines():
    bad = [
        e
        for e in product((0, 1), repeat=3)
        if is_product_of_lines(BottMatrix.from_entries(3, e)) != (not any(e))
    ]
    return not bad, "only the identity is a product of lines" if not bad else f"wrong for {bad}"


CHECKS = [
    check_reference_values,
    check_fan_smoothness,
    check_slicing_volume,
    check_boundary_decomposition,
    check_minkowski_derivative,
    check_unimodular_equivariance,
    check_translation_invariance,
    check_product_vanishing,
    check_pillar_identities,
    check_product_split,
    check_stability,
    check_bridge_identity,
    check_product_of_lines,
]


def run_all() -> list[tuple[str, bool, str]]:
    results = []
    for check in CHECKS:
        name = check.__name__.removeprefix("check_")
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001 - report, never crash the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, ok, detail))
    return results
