import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bott_futaki.errors import DegeneratePolytope, EmptyPolytope, UnboundedPolytope
from bott_futaki.poly import interpolate, pderiv, peval
from bott_futaki.polytope import (
    HalfSpace,
    HPolytope,
    axis_profiles,
    boundary_moment_first,
    boundary_volume,
    clip_axis,
    facet_measure,
    facet_measures,
    moment_first,
    slice_at,
    transform_unimodular,
    translate,
    vertex_enumerate,
    volume,
)
from bott_futaki.sampling import random_unimodular

from oracles import (
    brute_vertices,
    hull_facet_measures,
    hull_volume,
    polygon_boundary,
    polygon_boundary_moment,
    polygon_cycle,
    polygon_moment,
    random_polytope_data,
    shoelace,
)

# -x1 - x2 >= -2, x1 >= 0, -x2 >= 0, x2 >= -1
TRAPEZOID = HPolytope.from_inequalities([(-1, -1), (1, 0), (0, -1), (0, 1)], [2, 0, 0, 1])
SQUARE = HPolytope.box([0, 0], [1, 1])


def _random_polytopes(seed, dim, count):
    rng = random.Random(seed)
    return [HPolytope.from_inequalities(*random_polytope_data(rng, dim)) for _ in range(count)]


def test_halfspace_is_made_primitive():
    h = HalfSpace((2, -4), Fraction(6))
    assert h.normal == (1, -2) and h.offset == 3


def test_trapezoid_vertices():
    got = set(vertex_enumerate(TRAPEZOID).vertices)
    assert got == {(0, 0), (2, 0), (0, -1), (3, -1)}
    assert got == brute_vertices(TRAPEZOID.normals, TRAPEZOID.offsets)


def test_trapezoid_measures():
    cyc = polygon_cycle(vertex_enumerate(TRAPEZOID).vertices)
    assert volume(TRAPEZOID) == shoelace(cyc) == Fraction(5, 2)
    assert moment_first(TRAPEZOID, 1) == polygon_moment(cyc, 1) == Fraction(-4, 3)
    assert facet_measures(TRAPEZOID) == (1, 1, 2, 3)
    assert boundary_volume(TRAPEZOID) == polygon_boundary(cyc) == 7
    assert boundary_moment_first(TRAPEZOID, 1) == polygon_boundary_moment(cyc, 1) == -4


def test_square_and_simplex():
    assert volume(SQUARE) == 1
    assert boundary_moment_first(SQUARE, 0) == 2
    simplex = HPolytope.from_inequalities([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)], [0, 0, 0, 1])
    assert volume(simplex) == Fraction(1, 6)
    assert facet_measures(simplex) == (Fraction(1, 2),) * 4


def test_errors():
    half_plane = HPolytope.from_inequalities([(1, 0)], [0])
    with pytest.raises(UnboundedPolytope):
        volume(half_plane)
    empty = HPolytope.box([0, 0], [1, 1]).with_halfspaces([HalfSpace((1, 0), -5)])
    assert empty.is_empty
    with pytest.raises(EmptyPolytope):
        vertex_enumerate(empty)
    flat = HPolytope.box([0, 0], [1, 0])
    assert volume(flat) == 0
    with pytest.raises(DegeneratePolytope):
        facet_measure(flat, 0)
    with pytest.raises(DegeneratePolytope):
        boundary_volume(flat)


def test_duplicate_halfspaces_count_once():
    P = SQUARE.with_halfspaces([HalfSpace((1, 0), 0), HalfSpace((1, 1), 5)])
    fm = facet_measures(P)
    assert sum(fm) == 4
    assert fm[-1] == 0
    assert boundary_volume(P) == 4


def test_slices():
    s = slice_at(TRAPEZOID, 1, Fraction(-1, 2))
    assert s.dim == 1 and volume(s) == Fraction(5, 2)
    assert slice_at(TRAPEZOID, 1, 1).is_empty


def test_axis_profiles_examples():
    prof = axis_profiles(TRAPEZOID, 1)
    assert (prof.lo, prof.hi) == (-1, 0)
    assert prof.f.pieces == ((2, -1),)
    assert prof.g.pieces == ((2,),)
    box = axis_profiles(HPolytope.box([-1, -1], [1, 1]), 1)
    assert box.f.pieces == ((2,),) and box.g.pieces == ((2,),)


def test_prism_profile():
    Q = TRAPEZOID
    P = HPolytope(3, tuple(HalfSpace(h.normal + (0,), h.offset) for h in Q.halfspaces)).with_halfspaces(
        [HalfSpace((0, 0, 1), 0), HalfSpace((0, 0, -1), Fraction(7, 3))]
    )
    prof = axis_profiles(P, 2)
    assert prof.f.simplify().pieces == ((volume(Q),),)
    assert prof.g.simplify().pieces == ((boundary_volume(Q),),)


@pytest.mark.parametrize("dim", [2, 3])
def test_vertices_match_bruteforce(dim):
    for P in _random_polytopes(10 + dim, dim, 8):
        assert set(vertex_enumerate(P).vertices) == brute_vertices(P.normals, P.offsets)


def test_polygon_measures_match_shoelace():
    for P in _random_polytopes(20, 2, 15):
        cyc = polygon_cycle(vertex_enumerate(P).vertices)
        assert volume(P) == shoelace(cyc)
        assert boundary_volume(P) == polygon_boundary(cyc)
        for i in range(2):
            assert moment_first(P, i) == polygon_moment(cyc, i)
            assert boundary_moment_first(P, i) == polygon_boundary_moment(cyc, i)


def test_triangulation_consistency_3d():
    for P in _random_polytopes(21, 3, 10):
        verts = vertex_enumerate(P).vertices
        assert volume(P) == hull_volume(verts)
        assert list(facet_measures(P)) == hull_facet_measures(verts, P.normals, P.offsets)
        for axis in range(3):
            assert axis_profiles(P, axis).f.integrate() == volume(P)


def test_slice_volume_matches_profile():
    rng = random.Random(3)
    for P in _random_polytopes(22, 3, 4):
        axis = rng.randrange(3)
        prof = axis_profiles(P, axis)
        for _ in range(20):
            u = prof.lo + (prof.hi - prof.lo) * Fraction(rng.randint(0, 1000), 1000)
            assert volume(slice_at(P, axis, u)) == prof.f(u)


def test_boundary_decomposition_along_axis():
    rng = random.Random(4)
    for P in _random_polytopes(23, 3, 5):
        axis = 2
        prof = axis_profiles(P, axis)
        for _ in range(3):
            s = prof.lo + (prof.hi - prof.lo) * Fraction(rng.randint(1, 99), 100)
            # shift so the bottom slice sits at height 0
            Ps = translate(clip_axis(P, axis, prof.lo, s), (0, 0, -prof.lo))
            g = prof.g.restrict(prof.lo, s)
            assert boundary_volume(Ps) == g.integrate() + prof.f(prof.lo) + prof.f(s)
            shifted_ug = g.times_x() - g * prof.lo
            assert boundary_moment_first(Ps, axis) == shifted_ug.integrate() + (s - prof.lo) * prof.f(s)


@pytest.mark.parametrize("dim", [2, 3])
def test_volume_derivative_is_facet_measure(dim):
    # one-sided samples stay inside a single combinatorial chamber
    for P in _random_polytopes(30 + dim, dim, 5):
        for i in range(len(P.halfspaces)):
            ts = [Fraction(k, 10**6) for k in range(dim + 1)]
            vols = [volume(P.with_offsets([a + (t if j == i else 0) for j, a in enumerate(P.offsets)])) for t in ts]
            assert peval(pderiv(interpolate(ts, vols)), 0) == facet_measure(P, i)


def test_unimodular_invariance():
    rng = random.Random(5)
    for dim in (2, 3):
        for P in _random_polytopes(40 + dim, dim, 5):
            U = random_unimodular(rng, dim)
            Q = transform_unimodular(P, U)
            assert volume(Q) == volume(P)
            assert boundary_volume(Q) == boundary_volume(P)
            assert facet_measures(Q) == facet_measures(P)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=7), min_size=2, max_size=2),
    st.integers(min_value=0, max_value=40),
)
def test_translation_preserves_measures(t, seed):
    P = _random_polytopes(seed, 2, 1)[0]
    Q = translate(P, t)
    assert volume(Q) == volume(P)
    assert facet_measures(Q) == facet_measures(P)
    for i in range(2):
        assert moment_first(Q, i) == moment_first(P, i) + t[i] * volume(P)
