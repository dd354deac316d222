"""Exact rational polyhedral geometry.

A polytope is given by half-spaces ``<x, v> >= -a`` with primitive integer
normals ``v``.  Volumes and moments use the standard Lebesgue measure; facet
integrals use the lattice-normalized measure ``dsigma`` fixed by
``dv = dsigma ^ dl`` where ``l(x) = <x, v> + a``.  That measure is computed by
changing to a unimodular coordinate system whose first coordinate is ``l``, so
every facet integral is an honest (n-1)-dimensional Lebesgue integral and the
recursion bottoms out at intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import combinations
from math import gcd
from typing import NamedTuple, Sequence

from .errors import DegeneratePolytope, EmptyPolytope, UnboundedPolytope
from .poly import PiecewisePolynomial, fit_on_interval, pderiv

Point = tuple  # tuple of Fraction


# --- small exact linear algebra -------------------------------------------------


def _solve(rows: Sequence[Sequence], rhs: Sequence) -> list[Fraction] | None:
    """Solve a square system exactly; None when singular."""
    n = len(rows)
    m = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / pv
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[r][n] / m[r][r] for r in range(n)]


def _row_reduce(vectors: Sequence[Sequence]) -> list[list[Fraction]]:
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return []
    ncols = len(rows[0])
    out, r = [], 0
    for col in range(ncols):
        piv = next((k for k in range(r, len(rows)) if rows[k][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = [x / rows[r][col] for x in rows[r]]
        rows[r] = pr
        for k in range(len(rows)):
            if k != r and rows[k][col] != 0:
                f = rows[k][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], pr)]
        r += 1
        if r == len(rows):
            break
    return rows[:r]


def rank(vectors: Sequence[Sequence]) -> int:
    return len(_row_reduce(vectors))


def nullspace(vectors: Sequence[Sequence], dim: int) -> list[list[Fraction]]:
    """Basis of ``{d : <d, v> = 0 for all v}``."""
    red = _row_reduce(vectors)
    pivots = [next(c for c, x in enumerate(row) if x != 0) for row in red]
    basis = []
    for free in (c for c in range(dim) if c not in pivots):
        d = [Fraction(0)] * dim
        d[free] = Fraction(1)
        for row, p in zip(red, pivots):
            d[p] = -row[free]
        basis.append(d)
    return basis


def affine_dimension(points: Sequence[Point]) -> int:
    if not points:
        return -1
    base = points[0]
    return rank([[a - b for a, b in zip(p, base)] for p in points[1:]])


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [[Fraction(x) for x in row] for row in rows]
    n, sign, acc = len(m), 1, Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        acc *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return sign * acc


def primitive(vector: Sequence[int]) -> tuple[tuple[int, ...], int]:
    """Return ``(vector / g, g)`` with ``g`` the gcd of the entries."""
    g = reduce(gcd, (abs(int(x)) for x in vector), 0)
    if g == 0:
        raise ValueError("zero normal vector")
    return tuple(int(x) // g for x in vector), g


@lru_cache(maxsize=4096)
def unimodular_completion(v: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    """Integer matrices ``(R, R^-1)`` with ``R v = e_1``; ``v`` must be primitive.

    The rows of ``R^-T`` form a unimodular basis change whose first coordinate
    is ``<x, v>``.
    """
    d = len(v)
    w = list(v)
    R = [[int(i == j) for j in range(d)] for i in range(d)]
    Rinv = [[int(i == j) for j in range(d)] for i in range(d)]

    def add_row(dst, src, c):
        # R <- E R with E = I + c e_dst e_src^T; R^-1 <- R^-1 E^-1
        w[dst] += c * w[src]
        R[dst] = [a + c * b for a, b in zip(R[dst], R[src])]
        for row in Rinv:
            row[src] -= c * row[dst]

    def swap(i, j):
        w[i], w[j] = w[j], w[i]
        R[i], R[j] = R[j], R[i]
        for row in Rinv:
            row[i], row[j] = row[j], row[i]

    while sum(1 for x in w if x) > 1:
        p = min((k for k in range(d) if w[k]), key=lambda k: abs(w[k]))
        for k in range(d):
            if k != p and w[k]:
                add_row(k, p, -(w[k] // w[p]))
    p = next(k for k in range(d) if w[k])
    if abs(w[p]) != 1:
        raise ValueError(f"{v} is not primitive")
    if p != 0:
        swap(0, p)
    if w[0] == -1:
        w[0] = 1
        R[0] = [-a for a in R[0]]
        for row in Rinv:
            row[0] = -row[0]
    return tuple(map(tuple, R)), tuple(map(tuple, Rinv))


# --- types -----------------------------------------------------------------------


@dataclass(frozen=True)
class HalfSpace:
    """``{x : <x, normal> >= -offset}`` with the normal stored primitive."""

    normal: tuple
    offset: Fraction

    def __post_init__(self):
        normal, g = primitive(self.normal)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", Fraction(self.offset) / g)

    def value(self, x) -> Fraction:
        """The affine function ``l(x) = <x, v> + a`` (nonnegative on the half-space)."""
        return dot(x, self.normal) + self.offset


@dataclass(frozen=True)
class VPolytope:
    dim: int
    vertices: tuple
    tight: tuple  # tight[k] = frozenset of half-space indices tight at vertices[k]


class _Masses(NamedTuple):
    volume: Fraction
    moment: tuple
    facets: tuple  # (measure, boundary moment vector) per half-space


@dataclass(frozen=True)
class HPolytope:
    """Rational polytope given by an ordered list of half-spaces.

    The order of ``halfspaces`` indexes the facets.  Vertices and exact
    integrals are computed lazily and cached on the (immutable) instance.
    """

    dim: int
    halfspaces: tuple = field(default=())

    def __post_init__(self):
        hs = tuple(h if isinstance(h, HalfSpace) else HalfSpace(*h) for h in self.halfspaces)
        if any(len(h.normal) != self.dim for h in hs):
            raise ValueError("normal length does not match dimension")
        object.__setattr__(self, "halfspaces", hs)

    @classmethod
    def from_inequalities(cls, normals, offsets) -> HPolytope:
        normals = [tuple(v) for v in normals]
        return cls(len(normals[0]), tuple(HalfSpace(v, a) for v, a in zip(normals, offsets)))

    @classmethod
    def box(cls, lows, highs) -> HPolytope:
        n = len(lows)
        hs = []
        for k in range(n):
            e = tuple(int(i == k) for i in range(n))
            hs.append(HalfSpace(tuple(-x for x in e), highs[k]))
            hs.append(HalfSpace(e, -Fraction(lows[k])))
        return cls(n, tuple(hs))

    @property
    def normals(self) -> tuple:
        return tuple(h.normal for h in self.halfspaces)

    @property
    def offsets(self) -> tuple:
        return tuple(h.offset for h in self.halfspaces)

    def contains(self, x) -> bool:
        return all(h.value(x) >= 0 for h in self.halfspaces)

    def with_halfspaces(self, extra) -> HPolytope:
        return HPolytope(self.dim, self.halfspaces + tuple(extra))

    def with_offsets(self, offsets) -> HPolytope:
        return HPolytope(self.dim, tuple(HalfSpace(h.normal, a) for h, a in zip(self.halfspaces, offsets)))

    @cached_property
    def _vertex_data(self) -> tuple[tuple, tuple]:
        return _enumerate(self.normals, self.offsets, self.dim)

    @cached_property
    def is_empty(self) -> bool:
        if self._vertex_data[0]:
            return False
        if rank(self.normals) == self.dim:
            return True
        return not _feasible_with_lineality(self.normals, self.offsets, self.dim)

    @cached_property
    def is_bounded(self) -> bool:
        """Empty polytopes count as bounded."""
        return self.is_empty or _recession_ray(self.normals, self.dim) is None

    def check_bounded(self) -> None:
        if not self.is_bounded:
            raise UnboundedPolytope("polytope has a nontrivial recession cone")

    @cached_property
    def affine_dim(self) -> int:
        self.check_bounded()
        return affine_dimension(self._vertex_data[0])

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    def require_full_dimensional(self) -> None:
        if not self.is_full_dimensional:
            raise DegeneratePolytope(f"polytope has dimension {self.affine_dim} < {self.dim}")

    @cached_property
    def _masses(self) -> _Masses:
        self.check_bounded()
        verts, tight = self._vertex_data
        m = len(self.halfspaces)
        zero_moment = (Fraction(0),) * self.dim
        if affine_dimension(verts) < self.dim:
            return _Masses(Fraction(0), zero_moment, ((Fraction(0), zero_moment),) * m)
        face = _Face(self.normals, self.offsets, verts, tight)
        facets = _facet_masses(face)
        vol, mom = _mass_from_facets(face, facets)
        return _Masses(vol, mom, tuple(facets))


def _enumerate(normals, offsets, d) -> tuple[tuple, tuple]:
    """Brute-force vertex enumeration over all d-subsets of constraints."""
    m = len(normals)
    found: dict = {}
    for sub in combinations(range(m), d):
        x = _solve([normals[i] for i in sub], [-offsets[i] for i in sub])
        if x is None:
            continue
        x = tuple(x)
        if x in found:
            continue
        vals = [dot(x, normals[j]) + offsets[j] for j in range(m)]
        if all(v >= 0 for v in vals):
            found[x] = frozenset(j for j, v in enumerate(vals) if v == 0)
    verts = tuple(sorted(found))
    return verts, tuple(found[v] for v in verts)


@lru_cache(maxsize=1024)
def _recession_ray(normals: tuple, d: int):
    """A nonzero ``r`` with ``<r, v> >= 0`` for every normal, or None."""
    if rank(normals) < d:
        return tuple(nullspace(normals, d)[0])
    for sub in combinations(range(len(normals)), d - 1):
        rows = [normals[i] for i in sub]
        if rank(rows) != d - 1:
            continue
        r = nullspace(rows, d)[0]
        for s in (1, -1):
            cand = [s * x for x in r]
            if all(dot(cand, v) >= 0 for v in normals):
                return tuple(cand)
    return None


def _feasible_with_lineality(normals, offsets, d) -> bool:
    # pin coordinates complementary to the lineality space, then look for a vertex
    rows = list(normals)
    extra_n, extra_a = [], []
    for k in range(d):
        e = tuple(int(i == k) for i in range(d))
        if rank(rows + [e]) > rank(rows):
            rows.append(e)
            extra_n += [e, tuple(-x for x in e)]
            extra_a += [Fraction(0), Fraction(0)]
    verts, _ = _enumerate(tuple(normals) + tuple(extra_n), tuple(offsets) + tuple(extra_a), d)
    return bool(verts)


# --- lattice-normalized integration ----------------------------------------------


@dataclass
class _Face:
    normals: tuple
    offsets: tuple
    verts: tuple
    tight: tuple

    @property
    def dim(self) -> int:
        return len(self.verts[0])


def _restrict(face: _Face, i: int) -> tuple[_Face, tuple]:
    """Facet ``i`` of ``face`` in the unimodular coordinates ``y = R^-T x`` (first one dropped)."""
    R, Rinv = unimodular_completion(face.normals[i])
    d = face.dim
    a_i = face.offsets[i]
    keep, normals, offsets = {}, [], []
    for j, (v, a) in enumerate(zip(face.normals, face.offsets)):
        if j == i:
            continue
        w = [sum(R[r][c] * v[c] for c in range(d)) for r in range(d)]
        tail = w[1:]
        if not any(tail):
            continue
        prim, g = primitive(tail)
        keep[j] = len(normals)
        normals.append(prim)
        offsets.append((a - w[0] * a_i) / g)
    verts, tight = [], []
    for x, t in zip(face.verts, face.tight):
        if i not in t:
            continue
        y = [sum(Rinv[c][r] * x[c] for c in range(d)) for r in range(d)]
        verts.append(tuple(y[1:]))
        tight.append(frozenset(keep[j] for j in t if j in keep))
    return _Face(tuple(normals), tuple(offsets), tuple(verts), tuple(tight)), Rinv


def _facet_masses(face: _Face) -> list:
    """(lattice measure, first moment) of every facet; zeros for non-facets and repeats."""
    d = face.dim
    zero = (Fraction(0), (Fraction(0),) * d)
    out, seen = [], set()
    for i, key in enumerate(zip(face.normals, face.offsets)):
        if key in seen:
            out.append(zero)
            continue
        seen.add(key)
        if d == 1:
            pts = [x for x, t in zip(face.verts, face.tight) if i in t]
            out.append((Fraction(1), pts[0]) if pts else zero)
            continue
        sub, Rinv = _restrict(face, i)
        if affine_dimension(sub.verts) < d - 1:
            out.append(zero)
            continue
        sigma, mom = _mass(sub)
        y = (-face.offsets[i] * sigma,) + tuple(mom)
        # x = R^T y and R^T = (R^-1)^-T; map back through R^T
        R, _ = unimodular_completion(face.normals[i])
        x = tuple(sum(R[r][c] * y[r] for r in range(d)) for c in range(d))
        out.append((sigma, x))
    return out


def _mass_from_facets(face: _Face, facets) -> tuple[Fraction, tuple]:
    # cone each facet over the vertex barycenter p:  vol = sum l_i(p) sigma_i / d,
    # pyramid centroid = (d c_i + p) / (d + 1)
    d = face.dim
    nv = len(face.verts)
    p = tuple(sum(v[k] for v in face.verts) / nv for k in range(d))
    vol = Fraction(0)
    mom = [Fraction(0)] * d
    for (v, a), (sigma, m) in zip(zip(face.normals, face.offsets), facets):
        if not sigma:
            continue
        h = dot(p, v) + a
        vol += h * sigma / d
        c = h / (d * (d + 1))
        for k in range(d):
            mom[k] += c * (d * m[k] + sigma * p[k])
    return vol, tuple(mom)


def _mass(face: _Face) -> tuple[Fraction, tuple]:
    if face.dim == 1:
        lo = min(v[0] for v in face.verts)
        hi = max(v[0] for v in face.verts)
        return hi - lo, ((hi * hi - lo * lo) / 2,)
    return _mass_from_facets(face, _facet_masses(face))


# --- public operations -----------------------------------------------------------


def vertex_enumerate(P: HPolytope) -> VPolytope:
    if P.is_empty:
        raise EmptyPolytope("no feasible point")
    P.check_bounded()
    verts, tight = P._vertex_data
    return VPolytope(P.dim, verts, tight)


def volume(P: HPolytope) -> Fraction:
    """Exact n-dimensional volume; 0 for empty or lower-dimensional polytopes."""
    if P.is_empty:
        return Fraction(0)
    return P._masses.volume


def moment_first(P: HPolytope, i: int) -> Fraction:
    if P.is_empty:
        return Fraction(0)
    return P._masses.moment[i]


def facet_measure(P: HPolytope, i: int) -> Fraction:
    """Euclidean (n-1)-volume of facet ``i`` divided by the norm of its primitive normal."""
    P.check_bounded()
    P.require_full_dimensional()
    return P._masses.facets[i][0]


def facet_measures(P: HPolytope) -> tuple:
    P.check_bounded()
    P.require_full_dimensional()
    return tuple(s for s, _ in P._masses.facets)


def face_measure(P: HPolytope, i: int) -> Fraction:
    """Lattice (n-1)-volume of ``P ∩ {l_i = 0}``; defined for lower-dimensional ``P`` too."""
    P.check_bounded()
    if P.is_empty:
        return Fraction(0)
    verts, tight = P._vertex_data
    if P.dim == 1:
        return Fraction(any(i in t for t in tight))
    sub, _ = _restrict(_Face(P.normals, P.offsets, verts, tight), i)
    if not sub.verts or affine_dimension(sub.verts) < P.dim - 1:
        return Fraction(0)
    return _mass(sub)[0]


def boundary_volume(P: HPolytope) -> Fraction:
    return sum(facet_measures(P), Fraction(0))


def boundary_moment_first(P: HPolytope, i: int) -> Fraction:
    P.check_bounded()
    P.require_full_dimensional()
    return sum((m[i] for _, m in P._masses.facets), Fraction(0))


def slice_at(P: HPolytope, axis: int, u) -> HPolytope:
    """``P ∩ {x_axis = u}`` as a polytope in the remaining coordinates."""
    if P.dim < 2:
        raise ValueError("cannot slice a 1-dimensional polytope")
    u = Fraction(u)
    hs = []
    infeasible = False
    for h in P.halfspaces:
        rest = h.normal[:axis] + h.normal[axis + 1:]
        off = h.offset + h.normal[axis] * u
        if any(rest):
            hs.append(HalfSpace(rest, off))
        elif off < 0:
            infeasible = True
    if infeasible:
        e = tuple(int(k == 0) for k in range(P.dim - 1))
        hs += [HalfSpace(e, 0), HalfSpace(tuple(-x for x in e), -1)]
    return HPolytope(P.dim - 1, tuple(hs))


def clip_axis(P: HPolytope, axis: int, lo=None, hi=None) -> HPolytope:
    """Append ``x_axis >= lo`` and/or ``x_axis <= hi``."""
    e = tuple(int(k == axis) for k in range(P.dim))
    extra = []
    if lo is not None:
        extra.append(HalfSpace(e, -Fraction(lo)))
    if hi is not None:
        extra.append(HalfSpace(tuple(-x for x in e), Fraction(hi)))
    return P.with_halfspaces(extra)


def translate(P: HPolytope, t) -> HPolytope:
    """``P + t``."""
    return HPolytope(P.dim, tuple(HalfSpace(h.normal, h.offset - dot(t, h.normal)) for h in P.halfspaces))


def transform_unimodular(P: HPolytope, U) -> HPolytope:
    """Image of ``P`` under ``x -> U^-T x`` (normals ``v -> U v``, offsets unchanged)."""
    n = P.dim
    return HPolytope(
        n,
        tuple(
            HalfSpace(tuple(sum(U[r][c] * h.normal[c] for c in range(n)) for r in range(n)), h.offset)
            for h in P.halfspaces
        ),
    )


class AxisProfiles(NamedTuple):
    f: PiecewisePolynomial
    g: PiecewisePolynomial
    lo: Fraction
    hi: Fraction


def axis_breakpoints(P: HPolytope, axis: int) -> list[Fraction]:
    return sorted({v[axis] for v in vertex_enumerate(P).vertices})


def axis_profiles(P: HPolytope, axis: int) -> AxisProfiles:
    """Slice volume ``f(u)`` and slice boundary volume ``g(u)`` along ``x_axis``.

    ``g`` is the derivative of the side-boundary volume of ``P ∩ {lo <= x_axis <= s}``,
    so the boundary of any axis-truncation of ``P`` decomposes exactly as
    ``integral of g + f(lo) + f(s)``.
    """
    P.check_bounded()
    P.require_full_dimensional()
    bps = axis_breakpoints(P, axis)
    lo, hi = bps[0], bps[-1]
    n = P.dim

    def f_at(u):
        return volume(slice_at(P, axis, u))

    f = PiecewisePolynomial.from_function(f_at, bps, n - 1)
    f_lo = f(lo)

    def side(s):
        return boundary_volume(clip_axis(P, axis, lo, s)) - f_lo - f(s)

    g_pieces = [pderiv(fit_on_interval(side, a, b, n - 1)) for a, b in zip(bps, bps[1:])]
    return AxisProfiles(f, PiecewisePolynomial(bps, g_pieces), lo, hi)
