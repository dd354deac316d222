"""Exact univariate polynomials and piecewise polynomials over the rationals.

Polynomials are tuples of :class:`~fractions.Fraction` coefficients in
ascending degree, with trailing zeros stripped (the zero polynomial is ``()``).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import zip_longest
from typing import Callable, Iterable, Sequence

Poly = tuple


def poly(coeffs: Iterable) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def padd(p: Poly, q: Poly) -> Poly:
    return poly(a + b for a, b in zip_longest(p, q, fillvalue=Fraction(0)))


def pscale(p: Poly, c) -> Poly:
    return poly(c * a for a in p)


def psub(p: Poly, q: Poly) -> Poly:
    return padd(p, pscale(q, -1))


def pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return poly(out)


def peval(p: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pderiv(p: Poly, m: int = 1) -> Poly:
    for _ in range(m):
        p = poly(k * c for k, c in enumerate(p) if k > 0)
    return p


def pantideriv(p: Poly) -> Poly:
    """Antiderivative vanishing at 0."""
    return poly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(p)])


def pcompose_shift(p: Poly, h) -> Poly:
    """Return the polynomial ``x -> p(x + h)``."""
    out: Poly = ()
    for c in reversed(p):
        out = padd(pmul(out, (Fraction(h), Fraction(1))), (c,))
    return out


def interpolate(xs: Sequence, ys: Sequence) -> Poly:
    """Exact interpolating polynomial through ``(xs[k], ys[k])`` (Newton form)."""
    xs = [Fraction(x) for x in xs]
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out: Poly = ()
    for i in range(n - 1, -1, -1):
        out = padd(pmul(out, (-xs[i], Fraction(1))), (coef[i],))
    return out


def sample_points(lo: Fraction, hi: Fraction, count: int) -> list[Fraction]:
    """``count`` equally spaced points strictly inside ``(lo, hi)``."""
    step = (hi - lo) / (count + 1)
    return [lo + (k + 1) * step for k in range(count)]


def fit_on_interval(func: Callable[[Fraction], Fraction], lo, hi, degree: int) -> Poly:
    xs = sample_points(Fraction(lo), Fraction(hi), degree + 1)
    return interpolate(xs, [func(x) for x in xs])


@dataclass(frozen=True)
class PiecewisePolynomial:
    """A polynomial on each ``[breakpoints[k], breakpoints[k+1]]``.

    Evaluation at an interior breakpoint uses the right-hand piece unless
    ``side="left"`` is requested; the last breakpoint always uses the last piece.
    """

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        pcs = tuple(poly(p) for p in self.pieces)
        if len(bps) < 2 or len(pcs) != len(bps) - 1:
            raise ValueError("need k+1 breakpoints for k pieces")
        if any(b >= c for b, c in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @classmethod
    def constant(cls, value, lo, hi) -> PiecewisePolynomial:
        return cls((lo, hi), ((value,),))

    @classmethod
    def from_function(cls, func, breakpoints: Sequence, degree: int) -> PiecewisePolynomial:
        """Recover each piece of ``func`` by exact interpolation at interior points."""
        bps = [Fraction(b) for b in breakpoints]
        return cls(bps, [fit_on_interval(func, lo, hi, degree) for lo, hi in zip(bps, bps[1:])])

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0]

    @property
    def hi(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def degree(self) -> int:
        return max((len(p) - 1 for p in self.pieces), default=-1)

    def piece_index(self, x, side: str = "right") -> int:
        x = Fraction(x)
        if x < self.lo or x > self.hi:
            raise ValueError(f"{x} outside [{self.lo}, {self.hi}]")
        k = bisect_right(self.breakpoints, x) - 1
        if side == "left" and k > 0 and x == self.breakpoints[k]:
            k -= 1
        return min(k, len(self.pieces) - 1)

    def __call__(self, x, side: str = "right") -> Fraction:
        return peval(self.pieces[self.piece_index(x, side)], Fraction(x))

    def refine(self, breakpoints: Iterable) -> PiecewisePolynomial:
        """Same function on a finer breakpoint set (extra points inside the domain)."""
        bps = sorted({*self.breakpoints, *(Fraction(b) for b in breakpoints if self.lo <= b <= self.hi)})
        pieces = []
        for a, b in zip(bps, bps[1:]):
            pieces.append(self.pieces[self.piece_index((a + b) / 2)])
        return PiecewisePolynomial(bps, pieces)

    def _binary(self, other, op) -> PiecewisePolynomial:
        if not isinstance(other, PiecewisePolynomial):
            other = PiecewisePolynomial.constant(other, self.lo, self.hi)
        if (self.lo, self.hi) != (other.lo, other.hi):
            raise ValueError("domains differ")
        bps = sorted({*self.breakpoints, *other.breakpoints})
        a, b = self.refine(bps), other.refine(bps)
        return PiecewisePolynomial(bps, [op(p, q) for p, q in zip(a.pieces, b.pieces)])

    def __add__(self, other):
        return self._binary(other, padd)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, psub)

    def __rsub__(self, other):
        return self._binary(other, lambda p, q: psub(q, p))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.map(lambda p: pscale(p, other))
        return self._binary(other, pmul)

    __rmul__ = __mul__

    def __neg__(self):
        return self.map(lambda p: pscale(p, -1))

    def map(self, func) -> PiecewisePolynomial:
        return PiecewisePolynomial(self.breakpoints, [func(p) for p in self.pieces])

    def times_x(self) -> PiecewisePolynomial:
        return self.map(lambda p: pmul(p, (Fraction(0), Fraction(1))))

    def derivative(self, m: int = 1) -> PiecewisePolynomial:
        return self.map(lambda p: pderiv(p, m))

    def cumulative(self) -> PiecewisePolynomial:
        """The continuous antiderivative ``x -> integral of self from lo to x``."""
        pieces, acc = [], Fraction(0)
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            anti = pantideriv(p)
            piece = padd(anti, (acc - peval(anti, a),))
            pieces.append(piece)
            acc = peval(piece, b)
        return PiecewisePolynomial(self.breakpoints, pieces)

    def integrate(self, a=None, b=None) -> Fraction:
        a = self.lo if a is None else Fraction(a)
        b = self.hi if b is None else Fraction(b)
        cum = self.cumulative()
        return cum(b, side="left") - cum(a)

    def is_zero(self) -> bool:
        return all(not p for p in self.pieces)

    def is_constant(self) -> bool:
        """True when the function is one constant across every piece."""
        if any(len(p) > 1 for p in self.pieces):
            return False
        values = {p[0] if p else Fraction(0) for p in self.pieces}
        return len(values) == 1

    def is_continuous(self) -> bool:
        return all(
            peval(p, t) == peval(q, t)
            for p, q, t in zip(self.pieces, self.pieces[1:], self.breakpoints[1:-1])
        )

    def simplify(self) -> PiecewisePolynomial:
        """Merge neighbouring pieces that carry the same polynomial."""
        bps, pieces = [self.breakpoints[0]], []
        for p, b in zip(self.pieces, self.breakpoints[1:]):
            if pieces and pieces[-1] == p:
                bps[-1] = b
            else:
                pieces.append(p)
                bps.append(b)
        return PiecewisePolynomial(bps, pieces)

    def restrict(self, lo, hi) -> PiecewisePolynomial:
        lo, hi = Fraction(lo), Fraction(hi)
        fine = self.refine([lo, hi])
        keep = [k for k, (a, b) in enumerate(zip(fine.breakpoints, fine.breakpoints[1:])) if lo <= a and b <= hi]
        bps = [fine.breakpoints[keep[0]]] + [fine.breakpoints[k + 1] for k in keep]
        return PiecewisePolynomial(bps, [fine.pieces[k] for k in keep])
