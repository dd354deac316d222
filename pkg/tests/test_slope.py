import random
from fractions import Fraction
from itertools import permutations
from math import factorial

import pytest
import sympy

from bott_futaki import slope
from bott_futaki.bott import BottMatrix, fan_from_matrix, moment_polytope
from bott_futaki.errors import NotAmple, NotNef
from bott_futaki.futaki import futaki_vector
from bott_futaki.polytope import boundary_volume, facet_measures, vertex_enumerate, volume
from bott_futaki.sampling import random_bott_matrix, random_kahler_class

from oracles import brute_vertices, lattice_length

HIRZ = fan_from_matrix(BottMatrix.from_rows([[1, 0], [1, 1]]))
HIRZ_L = (2, 0, 0, 1)
SQUARE_FAN = fan_from_matrix(BottMatrix.identity(2))
BOX_L = (0, 1, 0, 1)  # [0, 1]^2
CUBE_FAN = fan_from_matrix(BottMatrix.identity(3))


def _edge_measures(fan, b):
    """Facet lengths of a polygon from sympy vertices and lattice edge lengths."""
    verts = brute_vertices(fan.rays, b)
    out = []
    for v, a in zip(fan.rays, b):
        tight = [p for p in verts if sum(x * y for x, y in zip(p, v)) == -Fraction(a)]
        out.append(lattice_length(tight[0], tight[-1]) if len(tight) > 1 else Fraction(0))
    return out


def _oracle_integrand(fan, L, i0, x):
    n = 2
    P_vol = sum(_edge_measures(fan, L))  # Vol(dP_L)
    area = volume(moment_polytope(fan, L))
    mu = P_vol / (n * area)
    b = [Fraction(y) - (x if j == i0 else 0) for j, y in enumerate(L)]
    c = [-1 + mu * Fraction(y) + ((1 - mu * x) if j == i0 else 0) for j, y in enumerate(L)]
    return sum(cj * m for cj, m in zip(c, _edge_measures(fan, b)))


def test_nef_examples():
    assert slope.is_nef(SQUARE_FAN, BOX_L)
    assert not slope.is_nef(SQUARE_FAN, slope.combine((1, BOX_L), (-2, slope.divisor(SQUARE_FAN, 2))))
    bottom = slope.divisor(HIRZ, 3)
    assert slope.is_nef(HIRZ, slope.combine((1, HIRZ_L), (-1, bottom)))
    assert not slope.is_nef(HIRZ, slope.combine((1, HIRZ_L), (Fraction(-3, 2), bottom)))


def test_walls_are_invariant_curves():
    for fan in (HIRZ, CUBE_FAN):
        ws = slope.walls(fan)
        assert len(ws) == fan.n * 2 ** (fan.n - 1)
        for w in ws:
            rel = [sum(d * fan.rays[j][k] for j, d in enumerate(w.degrees)) for k in range(fan.n)]
            assert rel == [0] * fan.n


def test_seshadri_examples():
    assert slope.seshadri_constant(SQUARE_FAN, BOX_L, 2) == 1
    box3 = (1, 0, 2, 0, 3, 0)  # [0,1] x [0,2] x [0,3]
    assert slope.seshadri_constant(CUBE_FAN, box3, 4) == 3
    assert slope.seshadri_constant(HIRZ, HIRZ_L, 3) == 1
    assert slope.seshadri_constant(HIRZ, HIRZ_L, 2) == 1
    with pytest.raises(NotAmple):
        slope.seshadri_constant(HIRZ, (0, 0, 0, 1), 3)


def test_intersection_examples():
    assert slope.intersection_number(SQUARE_FAN, BOX_L, BOX_L) == 2
    assert slope.intersection_number(SQUARE_FAN, BOX_L, slope.divisor(SQUARE_FAN, 0)) == 1
    assert slope.intersection_number(HIRZ, HIRZ_L, slope.canonical_divisor(HIRZ)) == -7
    assert slope.intersection_number(HIRZ, HIRZ_L, HIRZ_L) == 5
    with pytest.raises(NotNef):
        slope.intersection_number(HIRZ, slope.canonical_divisor(HIRZ), HIRZ_L)


def test_mu_examples():
    assert slope.mu_L(CUBE_FAN, (1, 0) * 3) == 2
    assert slope.mu_L(SQUARE_FAN, BOX_L) == 2
    assert slope.mu_L(HIRZ, HIRZ_L) == Fraction(7, 5)


def test_xi_integrands_match_edge_oracle():
    prof4 = slope.xi_profile(HIRZ, HIRZ_L, 3)
    prof3 = slope.xi_profile(HIRZ, HIRZ_L, 2)
    assert prof4.simplify().pieces == ((3, Fraction(-32, 5), Fraction(7, 5)),)
    assert prof3.simplify().pieces == ((2, Fraction(-18, 5), Fraction(-7, 5)),)
    for x in (Fraction(1, 7), Fraction(1, 2), Fraction(5, 6)):
        assert prof4(x) == _oracle_integrand(HIRZ, HIRZ_L, 3, x)
        assert prof3(x) == _oracle_integrand(HIRZ, HIRZ_L, 2, x)


def test_xi_examples():
    x = sympy.Symbol("x")
    r = sympy.Rational
    assert 2 * sympy.integrate(3 - r(32, 5) * x + r(7, 5) * x**2, (x, 0, 1)) == r(8, 15)
    assert slope.xi_invariant(HIRZ, HIRZ_L, 3) == Fraction(8, 15)
    assert slope.xi_invariant(HIRZ, HIRZ_L, 2) == Fraction(-8, 15)
    assert slope.xi_profile(SQUARE_FAN, BOX_L, 2).pieces == ((1, -2),)
    assert slope.xi_invariant(SQUARE_FAN, BOX_L, 2) == 0


def test_quadrature_agrees_with_exact_xi():
    rng = random.Random(0)
    cases = [(HIRZ, HIRZ_L, 3), (HIRZ, HIRZ_L, 2)]
    for n in (2, 3):
        A = random_bott_matrix(rng, n)
        cases.append((fan_from_matrix(A), random_kahler_class(A, rng), rng.randrange(2 * n)))
    for fan, L, i0 in cases:
        exact = slope.xi_invariant(fan, L, i0)
        approx = slope.xi_quadrature(fan, L, i0)
        assert abs(approx - float(exact)) <= 1e-9 * max(1.0, abs(float(exact)))


def test_stability_reports():
    top, bottom = slope.stability_pair(SQUARE_FAN, BOX_L, 2)
    assert (top.epsilon, top.mu, top.xi, top.futaki_vD) == (1, 2, 0, 0)
    assert top.assumption_holds and top.consistent

    r3, r4 = slope.stability_pair(HIRZ, HIRZ_L, 2)
    assert (r3.epsilon, r4.epsilon) == (1, 1)
    assert (r3.xi, r4.xi) == (Fraction(-8, 15), Fraction(8, 15))
    assert r3.assumption_holds and r4.assumption_holds
    assert r4.futaki_vD == futaki_vector(moment_polytope(HIRZ, HIRZ_L))[1] == Fraction(-2, 3)
    assert r3.consistent and r4.consistent


def test_cube_reports_are_balanced():
    for i0 in range(6):
        r = slope.stability_report(CUBE_FAN, (1, 0) * 3, i0)
        assert r.xi >= 0 and r.futaki_vD == 0 and r.consistent


def _cone_vertices_in_polytope(fan, N):
    """Toric nefness oracle: every maximal cone's vertex m_sigma lies in P_N."""
    for cone in fan.maximal_cones():
        M = sympy.Matrix([list(fan.rays[j]) for j in cone])
        m = M.LUsolve(sympy.Matrix([-sympy.Rational(N[j]) for j in cone]))
        for v, b in zip(fan.rays, N):
            if sum(m[k] * v[k] for k in range(fan.n)) < -sympy.Rational(b):
                return False
    return True


def test_nef_polytope_coherence():
    rng = random.Random(1)
    seen = {True: 0, False: 0}
    for n in (2, 3):
        for _ in range(6):
            fan = fan_from_matrix(random_bott_matrix(rng, n))
            for _ in range(6):
                N = [Fraction(rng.randint(-2, 6), rng.randint(1, 3)) for _ in range(2 * n)]
                nef = slope.is_nef(fan, N)
                seen[nef] += 1
                assert nef == _cone_vertices_in_polytope(fan, N)
                if nef:
                    verts = vertex_enumerate(moment_polytope(fan, N)).vertices
                    for v, b in zip(fan.rays, N):
                        assert min(sum(x * y for x, y in zip(p, v)) for p in verts) == -b
    assert seen[True] and seen[False]


def test_bridge_identity():
    rng = random.Random(2)
    for n in (2, 3):
        for _ in range(4):
            A = random_bott_matrix(rng, n)
            fan = fan_from_matrix(A)
            L = random_kahler_class(A, rng)
            lhs = -slope.intersection_number(fan, *([L] * (n - 1)), slope.canonical_divisor(fan))
            assert lhs == factorial(n - 1) * boundary_volume(moment_polytope(fan, L))
            assert slope.intersection_number(fan, *([L] * n)) == factorial(n) * volume(moment_polytope(fan, L))
            fm = facet_measures(moment_polytope(fan, L))
            for j in range(2 * n):
                assert slope.intersection_number(fan, *([L] * (n - 1)), slope.divisor(fan, j)) == factorial(n - 1) * fm[j]


def test_multilinearity():
    rng = random.Random(3)
    for n in (2, 3):
        A = random_bott_matrix(rng, n)
        fan = fan_from_matrix(A)
        N = [random_kahler_class(A, rng) for _ in range(n + 1)]
        base = slope.intersection_number(fan, *N[:n])
        for perm in permutations(range(n)):
            assert slope.intersection_number(fan, *(N[k] for k in perm)) == base
        s, t = Fraction(2, 3), Fraction(5, 4)
        mixed = slope.combine((s, N[0]), (t, N[n]))
        assert slope.intersection_number(fan, mixed, *N[1:n]) == s * base + t * slope.intersection_number(
            fan, N[n], *N[1:n]
        )


def test_epsilon_is_degeneration_threshold():
    rng = random.Random(4)
    for n in (2, 3):
        for _ in range(3):
            A = random_bott_matrix(rng, n)
            fan = fan_from_matrix(A)
            L = random_kahler_class(A, rng)
            i0 = rng.randrange(2 * n)
            eps = slope.seshadri_constant(fan, L, i0)
            chop = lambda x: moment_polytope(fan, slope.combine((1, L), (-x, slope.divisor(fan, i0))))
            assert slope.is_nef(fan, slope.combine((1, L), (-eps, slope.divisor(fan, i0))))
            assert not slope.is_nef(fan, slope.combine((1, L), (-eps * Fraction(101, 100), slope.divisor(fan, i0))))
            if volume(chop(eps * Fraction(99, 100))) > 0 and volume(chop(eps)) == 0:
                assert slope.stability_report(fan, L, i0).assumption_holds
