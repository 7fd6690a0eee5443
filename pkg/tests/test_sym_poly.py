import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symcodes.errors import ArityMismatch, BadCharacteristic, IndexOutOfRange, MTooLarge, NonMonic
from symcodes.finite_field import field_of_order, make_field
from symcodes.plane_geometry import Mode, external_set
from symcodes.sym_poly import (
    MultiPoly,
    PointTuple,
    discriminant_membership,
    discriminant_poly,
    distinguished_points,
    elementary_symmetric,
    evaluate,
    has_repeated_root,
    monic_from_roots,
    monic_from_sigma,
    parse_poly,
    phi_map,
    quotient_array,
    quotient_map,
    representatives,
    sylvester_discriminant_zero,
    vieta_roots,
)

F7 = make_field(7)


def P(field, *c):
    return PointTuple(field, tuple(c))


def test_elementary_symmetric():
    s = elementary_symmetric(2, 1, F7)
    assert s == parse_poly("X1 + X2", F7, ["X1", "X2"])
    s32 = elementary_symmetric(3, 2, F7)
    assert len(s32.terms) == 3
    assert s32 == parse_poly("X1*X2 + X2*X3 + X1*X3", F7, ["X1", "X2", "X3"])
    assert elementary_symmetric(3, 3, F7).terms == {(1, 1, 1): 1}
    with pytest.raises(IndexOutOfRange):
        elementary_symmetric(2, 3, F7)


def test_phi_map_examples():
    names = ["X1", "X2"]
    x1 = MultiPoly.var(F7, 2, 0)
    x2 = MultiPoly.var(F7, 2, 1)
    assert phi_map(x1, 2) == x1 + x2
    assert phi_map(x1 * x2, 2) == parse_poly("X1^2*X2 + X1*X2^2", F7, names)
    assert phi_map(MultiPoly.const(F7, 2, 5), 2) == MultiPoly.const(F7, 2, 5)
    with pytest.raises(ArityMismatch):
        phi_map(x1, 3)


def _random_poly(field, m, rng, deg=3, terms=5):
    t = {}
    for _ in range(terms):
        e = tuple(int(v) for v in rng.integers(0, deg + 1, m))
        t[e] = int(rng.integers(0, field.q))
    return MultiPoly(field, m, t)


@pytest.mark.parametrize("q", [7, 9])
@pytest.mark.parametrize("m", [2, 3])
def test_phi_image_is_symmetric(q, m):
    F = field_of_order(q)
    rng = np.random.default_rng(q * 10 + m)
    pts = rng.integers(0, q, (20, m))
    for _ in range(100):
        G = phi_map(_random_poly(F, m, rng), m)
        base = G.evaluate_many(pts)
        for perm in itertools.permutations(range(m)):
            assert G.permute(perm) == G
            assert np.array_equal(G.evaluate_many(pts[:, perm]), base)


def test_phi_map_is_linear():
    rng = np.random.default_rng(1)
    for _ in range(20):
        A, B = _random_poly(F7, 2, rng), _random_poly(F7, 2, rng)
        a, b = 3, 5
        assert phi_map(A.scale(a) + B.scale(b), 2) == phi_map(A, 2).scale(a) + phi_map(B, 2).scale(b)


def test_evaluate():
    assert int(evaluate(elementary_symmetric(3, 2, F7), P(F7, 1, 2, 3))) == 4
    assert int(evaluate(MultiPoly.zero(F7, 2), P(F7, 1, 2))) == 0
    assert int(evaluate(MultiPoly.const(F7, 2, 1), P(F7, 1, 2))) == 1
    with pytest.raises(ArityMismatch):
        evaluate(elementary_symmetric(3, 2, F7), P(F7, 1, 2))


@pytest.mark.parametrize("q,m,nd,nr", [(7, 2, 42, 21), (7, 3, 210, 35), (3, 3, 6, 1)])
def test_point_sets(q, m, nd, nr):
    F = field_of_order(q)
    D = distinguished_points(F, m)
    Q = representatives(F, m)
    assert len(D) == nd and len(Q) == nr
    assert all(p.is_distinguished() for p in D)
    assert all(list(p.coords) == sorted(p.coords) for p in Q)
    assert [p.coords for p in Q] == sorted(p.coords for p in Q)
    assert {p.canonical().coords for p in D} == {p.coords for p in Q}


def test_too_many_coordinates():
    with pytest.raises(MTooLarge):
        representatives(make_field(3), 4)


def test_quotient_map_examples():
    assert quotient_map(P(F7, 3, 5)).coords == (1, 1)
    assert quotient_map(P(F7, 1, 2, 3)).coords == (6, 4, 6)
    for a in range(7):
        assert quotient_map(P(F7, a, a)).coords == (F7.mul(2, a), F7.mul(a, a))


@pytest.mark.parametrize("m", [2, 3])
def test_fibres_are_permutation_orbits(m):
    pts = list(itertools.product(range(7), repeat=m))
    images = {}
    for p in pts:
        images.setdefault(quotient_map(P(F7, *p)).coords, set()).add(tuple(sorted(p)))
    # each fibre holds exactly one multiset of coordinates
    assert all(len(v) == 1 for v in images.values())


@pytest.mark.parametrize("q", [5, 7, 9])
def test_image_of_distinguished_points_is_external_set(q):
    F = field_of_order(q)
    D = np.array([p.coords for p in distinguished_points(F, 2)])
    img = quotient_array(F, D)
    uniq, counts = np.unique(img, axis=0, return_counts=True)
    assert np.all(counts == 2)
    E = external_set(F, Mode.AFFINE)
    assert {tuple(r) for r in uniq} == {tuple(r) for r in E}


def test_vieta_roots():
    # X^2 - X + 1, constant first
    assert vieta_roots(F7, [1, 6, 1]) == [3, 5]
    assert vieta_roots(F7, [1, 0, 1]) is None
    for a in range(7):
        assert vieta_roots(F7, monic_from_roots(F7, [a, a])) == [a, a]
    with pytest.raises(NonMonic):
        vieta_roots(F7, [1, 1, 2])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=2, max_size=3))
def test_vieta_roundtrip(xs):
    sigma = quotient_map(P(F7, *xs)).coords
    assert vieta_roots(F7, monic_from_sigma(F7, sigma)) == sorted(xs)


def test_discriminant_m2():
    for a in range(7):
        assert discriminant_membership(2, P(F7, F7.mul(2, a), F7.mul(a, a)))
    assert not discriminant_membership(2, P(F7, 1, 1))


def test_discriminant_m3_example():
    assert quotient_map(P(F7, 1, 1, 2)).coords == (4, 5, 2)
    assert discriminant_membership(3, P(F7, 4, 5, 2))


def test_discriminant_m3_exhaustive_against_oracles():
    for y in itertools.product(range(7), repeat=3):
        member = discriminant_membership(3, P(F7, *y))
        f = monic_from_sigma(F7, y)
        roots = vieta_roots(F7, f)
        assert member == has_repeated_root(F7, f)
        assert member == sylvester_discriminant_zero(F7, y)
        if roots is not None:
            assert member == (len(set(roots)) < 3)


def test_discriminant_with_y2_constant_term_is_wrong():
    wrong = parse_poly("X1^2*X2^2 - 4*X2^3 - 4*X1^3*X3 - 27*X2^2 + 18*X1*X2*X3", F7, ["X1", "X2", "X3"])
    disagree = [
        y for y in itertools.product(range(7), repeat=3)
        if (wrong.evaluate(y) == 0) != has_repeated_root(F7, monic_from_sigma(F7, y))
    ]
    assert disagree


def test_discriminant_characteristic_guard():
    with pytest.raises(BadCharacteristic):
        discriminant_poly(3, make_field(3))


def test_parse_and_format_roundtrip():
    f = parse_poly("3*X1^2*X2 - X2 + 4", F7, ["X1", "X2"])
    assert f.degree() == 3 and f.coeff((0, 1)) == 6 and f.coeff((0, 0)) == 4
    assert parse_poly(f.format(["X1", "X2"]), F7, ["X1", "X2"]) == f


def test_divmod_exact():
    x = MultiPoly.var(F7, 2, 0)
    y = MultiPoly.var(F7, 2, 1)
    a = x * x + y * 3 + 1
    b = x + y * y
    q, r = (a * b).divmod(b)
    assert r.is_zero() and q == a
