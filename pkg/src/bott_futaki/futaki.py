"""Futaki invariants of toric Kähler classes and the pillar slice identities."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, floor
from typing import Iterator, Sequence

from scipy.stats import qmc

from .bott import (
    BottMatrix,
    canonical_kahler_class,
    fan_from_matrix,
    is_kahler_class,
    moment_polytope,
)
from .errors import DegeneratePolytope, DegenerateSlice, InvariantViolation
from .poly import PiecewisePolynomial, pderiv, peval
from .polytope import (
    HalfSpace,
    HPolytope,
    axis_profiles,
    boundary_moment_first,
    boundary_volume,
    clip_axis,
    moment_first,
    slice_at,
    vertex_enumerate,
    volume,
)

log = logging.getLogger(__name__)


def futaki_component(P: HPolytope, i: int) -> Fraction:
    """``Vol(P) * int_{dP} x_i dsigma - Vol(dP) * int_P x_i dv``."""
    return futaki_linear(P, [int(k == i) for k in range(P.dim)])


def futaki_linear(P: HPolytope, w: Sequence) -> Fraction:
    """Futaki invariant of the linear function ``<x, w>``."""
    P.check_bounded()
    if P.is_empty or not P.is_full_dimensional:
        raise DegeneratePolytope("Futaki invariant needs a full-dimensional polytope")
    vol, bvol = volume(P), boundary_volume(P)
    bm = sum((c * boundary_moment_first(P, k) for k, c in enumerate(w) if c), Fraction(0))
    m = sum((c * moment_first(P, k) for k, c in enumerate(w) if c), Fraction(0))
    return vol * bm - bvol * m


def futaki_vector(P: HPolytope) -> tuple:
    return tuple(futaki_component(P, i) for i in range(P.dim))


# --- pillars ---------------------------------------------------------------------


@dataclass(frozen=True)
class PillarProfile:
    """Slice profiles of ``P_[0,x]`` and the cumulative functions built from them.

    ``a, b, c, d`` are volume, boundary volume, first moment and boundary first
    moment (in ``x_n``) of ``P_[0,x]``.  ``s_max`` is None when the slices stay
    full-dimensional for every ``x >= 0``; the profiles are then stored on
    ``[0, top]`` and their last piece continues unchanged.
    """

    f: PiecewisePolynomial
    g: PiecewisePolynomial
    a: PiecewisePolynomial
    b: PiecewisePolynomial
    c: PiecewisePolynomial
    d: PiecewisePolynomial
    s_max: Fraction | None
    top: Fraction

    @classmethod
    def from_slices(cls, f, g, s_max=None) -> PillarProfile:
        fx = f.times_x()
        a = f.cumulative()
        b = g.cumulative() + f(0) + f
        c = fx.cumulative()
        d = g.times_x().cumulative() + fx
        return cls(f, g, a, b, c, d, s_max, f.hi)

    @property
    def futaki(self) -> PiecewisePolynomial:
        return (self.a * self.d - self.b * self.c).simplify()


def pillar_halfspaces(A: BottMatrix, base: Sequence) -> HPolytope:
    """The unbounded pillar cut out by the first ``2n - 2`` half-spaces."""
    fan = fan_from_matrix(A)
    n = A.n
    if len(base) != 2 * n - 2:
        raise ValueError(f"pillar needs {2 * n - 2} base offsets")
    return HPolytope(n, tuple(HalfSpace(v, Fraction(x)) for v, x in zip(fan.rays, base)))


def pillar_polytope(A: BottMatrix, base: Sequence, s, t=0) -> HPolytope:
    """``P_[t,s]``: the pillar truncated to ``t <= x_n <= s``."""
    return clip_axis(pillar_halfspaces(A, base), A.n - 1, t, s)


def pillar_profile(A: BottMatrix, base: Sequence) -> PillarProfile:
    n = A.n
    axis = n - 1
    inf = pillar_halfspaces(A, base)
    q0 = slice_at(inf, axis, 0)
    if q0.is_empty or not q0.is_bounded or not q0.is_full_dimensional:
        raise DegenerateSlice("bottom slice Q_0 is not (n-1)-dimensional")
    half = clip_axis(inf, axis, lo=0)
    heights = sorted({v[axis] for v in half._vertex_data[0]})
    if half.is_bounded:
        s_max = top = heights[-1]
    else:
        s_max, top = None, heights[-1] + 1
    prof = axis_profiles(clip_axis(inf, axis, 0, top), axis)
    return PillarProfile.from_slices(prof.f, prof.g, s_max)


def futaki_pillar(A: BottMatrix, base: Sequence) -> PiecewisePolynomial:
    """``s -> F(P_[0,s])`` for the generator along ``x_n``, as ``a d - b c``.

    The value reported is ``Vol * int_{dP} x_n - Vol(dP) * int_P x_n``, which is
    exactly ``futaki_component(P_[0,s], n-1)``.
    """
    return pillar_profile(A, base).futaki


FUNCTIONS = ("f", "g", "a", "b", "c", "d")


@dataclass(frozen=True)
class DerivativeTable:
    """``values[name][m]`` is the m-th right derivative at 0 of ``name``."""

    values: dict
    order: int

    def __getitem__(self, key):
        return self.values[key]

    def relations(self) -> list[tuple[str, Fraction, Fraction]]:
        """Each derivative identity at 0 as ``(label, lhs, rhs)``."""
        f, g = self["f"], self["g"]
        a, b, c, d = self["a"], self["b"], self["c"], self["d"]
        out = [("a(0)=0", a[0], Fraction(0)), ("b(0)=2f(0)", b[0], 2 * f[0])]
        if self.order >= 1:
            out += [
                ("c(0)=0", c[0], Fraction(0)),
                ("c'(0)=0", c[1], Fraction(0)),
                ("d(0)=0", d[0], Fraction(0)),
                ("d'(0)=f(0)", d[1], f[0]),
            ]
        for m in range(1, self.order + 1):
            out.append((f"a^({m})(0)=f^({m - 1})(0)", a[m], f[m - 1]))
            out.append((f"b^({m})(0)=g^({m - 1})(0)+f^({m})(0)", b[m], g[m - 1] + f[m]))
            if m >= 2:
                out.append((f"c^({m})(0)=({m}-1)f^({m - 2})(0)", c[m], (m - 1) * f[m - 2]))
                out.append((
                    f"d^({m})(0)=({m}-1)g^({m - 2})(0)+{m}f^({m - 1})(0)",
                    d[m],
                    (m - 1) * g[m - 2] + m * f[m - 1],
                ))
        return out

    def failures(self) -> list[str]:
        return [label for label, lhs, rhs in self.relations() if lhs != rhs]


def derivative_table(profile: PillarProfile, m_max: int) -> DerivativeTable:
    values = {}
    for name in FUNCTIONS:
        piece = getattr(profile, name).pieces[0]
        values[name] = [peval(pderiv(piece, m), 0) for m in range(m_max + 1)]
    return DerivativeTable(values, m_max)


def check_third_derivative(profile: PillarProfile) -> tuple[Fraction, Fraction, bool]:
    """Third derivative of ``a d - b c`` at 0 by the Leibniz rule, against ``2 f'(0) f(0)``."""
    t = derivative_table(profile, 3)
    a, b, c, d = t["a"], t["b"], t["c"], t["d"]
    lhs = sum(comb(3, k) * (a[3 - k] * d[k] - b[3 - k] * c[k]) for k in range(4))
    rhs = 2 * t["f"][1] * t["f"][0]
    return lhs, rhs, lhs == rhs


# --- slices: congruence and splitting -------------------------------------------------


@dataclass(frozen=True)
class CongruenceResult:
    verdict: str  # "congruent" | "homothetic" | "incongruent"
    volumes: tuple
    translation: tuple | None = None
    ratio: Fraction | None = None


def _exact_root(x: Fraction, k: int) -> Fraction | None:
    def iroot(m: int) -> int | None:
        lo, hi = 0, 1
        while hi ** k < m:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** k < m:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo ** k == m else None

    if x <= 0:
        return None
    p, q = iroot(x.numerator), iroot(x.denominator)
    return None if p is None or q is None else Fraction(p, q)


def _barycenter(points) -> tuple:
    n = len(points)
    return tuple(sum(p[k] for p in points) / n for k in range(len(points[0])))


def slice_congruence(P: HPolytope, axis: int, u1, u2) -> CongruenceResult:
    """Compare two parallel slices up to translation, then up to homothety.

    Homothety is only reported for slices of dimension at least 2; any two
    segments are homothetic, so in dimension 1 the test carries no information.
    """
    q1, q2 = slice_at(P, axis, u1), slice_at(P, axis, u2)
    for q in (q1, q2):
        if q.is_empty or not q.is_bounded or not q.is_full_dimensional:
            raise DegenerateSlice("slice is not full-dimensional")
    v1, v2 = volume(q1), volume(q2)
    p1 = set(vertex_enumerate(q1).vertices)
    p2 = list(vertex_enumerate(q2).vertices)
    b1, b2 = _barycenter(list(p1)), _barycenter(p2)
    if v1 == v2:
        t = tuple(x - y for x, y in zip(b1, b2))
        if {tuple(x + s for x, s in zip(p, t)) for p in p2} == p1:
            return CongruenceResult("congruent", (v1, v2), translation=t, ratio=Fraction(1))
        return CongruenceResult("incongruent", (v1, v2))
    dim = q1.dim
    r = _exact_root(v1 / v2, dim)
    if dim >= 2 and r is not None:
        t = tuple(x - r * y for x, y in zip(b1, b2))
        if {tuple(r * x + s for x, s in zip(p, t)) for p in p2} == p1:
            return CongruenceResult("homothetic", (v1, v2), translation=t, ratio=r)
    return CongruenceResult("incongruent", (v1, v2))


@dataclass(frozen=True)
class SplitResult:
    base: HPolytope
    height: Fraction
    futaki_total: tuple  # F_P(x_i) for every coordinate of P
    futaki_base: tuple  # F_Q(x_i) for the remaining coordinates
    verified: bool


def product_split(P: HPolytope, axis: int) -> SplitResult | None:
    """Detect ``P = Q x [lo, lo + a]`` along ``axis`` and check the Futaki scaling."""
    P.check_bounded()
    P.require_full_dimensional()
    plus = [h for h in P.halfspaces if h.normal[axis] != 0]
    if any(sum(1 for x in h.normal if x) != 1 for h in plus):
        return None
    ups = {h.offset for h in plus if h.normal[axis] > 0}
    downs = {h.offset for h in plus if h.normal[axis] < 0}
    if len(ups) != 1 or len(downs) != 1:
        return None
    lo, hi = -ups.pop(), downs.pop()
    base_hs = tuple(
        HalfSpace(h.normal[:axis] + h.normal[axis + 1:], h.offset) for h in P.halfspaces if h.normal[axis] == 0
    )
    Q = HPolytope(P.dim - 1, base_hs)
    a = hi - lo
    fp = futaki_vector(P)
    fq = futaki_vector(Q)
    others = [fp[i] for i in range(P.dim) if i != axis]
    ok = fp[axis] == 0 and all(x == a * a * y for x, y in zip(others, fq))
    return SplitResult(Q, a, fp, fq, ok)


# --- Brunn-Minkowski along an axis ---------------------------------------------------


def midpoint_concave(f: PiecewisePolynomial, u1, u2, dim: int) -> bool:
    """Check ``f^(1/dim)`` at the midpoint against the chord (exact when ``dim`` is 1 or 2)."""
    u1, u2 = Fraction(u1), Fraction(u2)
    m = (u1 + u2) / 2
    fa, fb, fm = f(u1), f(u2), f(m)
    if dim == 1:
        return 2 * fm >= fa + fb
    if dim == 2:
        # sqrt(fm) >= (sqrt(fa) + sqrt(fb)) / 2, squared twice
        lhs = 4 * fm - fa - fb
        return lhs >= 0 and lhs * lhs >= 4 * fa * fb
    k = 1.0 / dim
    return float(fm) ** k >= (float(fa) ** k + float(fb) ** k) / 2 - 1e-9


# --- nonvanishing witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class ScanResult:
    kahler: tuple | None
    futaki: tuple | None
    examined: int

    def __bool__(self) -> bool:
        return self.kahler is not None


def pillar_family(A: BottMatrix, count: int = 8) -> list[tuple]:
    """Canonical class with the lower bound of ``x_n`` pushed down by k/2."""
    base = list(canonical_kahler_class(A))
    out = []
    for k in range(count):
        a = list(base)
        a[-1] = Fraction(k, 2)
        out.append(tuple(a))
    return out


def candidate_classes(A: BottMatrix, seed: int) -> Iterator[tuple]:
    """Deterministic stream: pillar family, then scrambled Halton points on a rational grid."""
    yield from pillar_family(A)
    dim = 2 * A.n
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    index = 0
    while True:
        for h in sampler.random(64):
            den = [1 + (index + i) % 8 for i in range(dim)]
            yield tuple(Fraction(floor(float(x) * 8 * q), q) for x, q in zip(h, den))
            index += 1


def _evaluate(args) -> tuple | None:
    A, a = args
    if not is_kahler_class(A, a):
        return None
    return futaki_vector(moment_polytope(A, a))


def _chunks(it, size):
    chunk = []
    for x in it:
        chunk.append(x)
        if len(chunk) == size:
            yield chunk
            chunk = []


def scan_nonvanishing(A: BottMatrix, budget: int = 100, seed: int = 0, workers: int | None = None) -> ScanResult:
    """First class in enumeration order with a nonzero Futaki component.

    ``budget`` counts valid Kähler classes; at most ``64 * budget`` candidates
    are drawn.  With ``workers`` the candidates are evaluated in parallel and
    merged in enumeration order, so the result does not depend on scheduling.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    trivial = A.is_identity()
    examined = 0
    draws = 0
    max_draws = 64 * budget
    pool = ProcessPoolExecutor(workers) if workers and workers > 1 else None
    try:
        for chunk in _chunks(candidate_classes(A, seed), 32):
            chunk = chunk[: max_draws - draws]
            draws += len(chunk)
            jobs = [(A, a) for a in chunk]
            results = pool.map(_evaluate, jobs) if pool else map(_evaluate, jobs)
            for a, fv in zip(chunk, results):
                if fv is None:
                    continue
                examined += 1
                if any(fv):
                    if trivial:
                        raise InvariantViolation(f"nonzero Futaki invariant {fv} on (P^1)^n")
                    return ScanResult(a, fv, examined)
                if examined >= budget:
                    return ScanResult(None, None, examined)
            if draws >= max_draws:
                break
    finally:
        if pool:
            pool.shutdown()
    log.info("scan exhausted %d draws with %d valid classes", draws, examined)
    return ScanResult(None, None, examined)
