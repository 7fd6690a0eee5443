import itertools

import numpy as np
import pytest

from symcodes.errors import DegenerateTriangle, IndexOutOfRange, NotInLambda, SIsSquare, ValidationError
from symcodes.finite_field import field_of_order, make_field, make_tower
from symcodes.linear_systems import (
    FrobeniusTriangle,
    SystemKind,
    admissible_k,
    build_cubic_system,
    build_type1_net,
    build_type2_system,
    combine,
    cubic_triangle_lines,
    full_degree_system,
    lambda_membership,
    lambda_points,
    net_is_irreducible,
    net_members,
    parabola_substitution,
    parse_descriptor,
    smallest_nonsquare,
    substituted_zero_count,
    type2_basis_coeffs,
    type2_determinant,
)
from symcodes.plane_geometry import (
    Mode,
    PointClass,
    classify_point_parabola,
    conic_det_many,
    conic_determinant,
    conic_poly,
    curve_external_count,
    rational_line_factors,
)
from symcodes.sym_poly import MultiPoly, parse_poly


@pytest.fixture(scope="module")
def t5():
    return make_tower(make_field(5), 3)


def _lift(tower, poly):
    """A base-field polynomial viewed over the extension."""
    return poly.map_coeffs(tower.embed, tower.ext)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_lambda_size(q):
    T = make_tower(field_of_order(q), 3)
    assert len(lambda_points(T)) == q**6 - q**5 - q**4 + q**3


def test_lambda_examples(t5):
    assert len(lambda_points(t5)) == 12000
    assert not lambda_membership(t5, (1, 2, 3))  # rational point
    w = t5.ext.primitive_element()
    assert not lambda_membership(t5, (1, w, 0))  # on the rational line Z = 0


def test_frobenius_triangle(t5):
    P = lambda_points(t5)[17]
    tri = FrobeniusTriangle.from_point(t5, P)
    ext = t5.ext
    assert tri.P1 == tuple(t5.frobenius(np.array(tri.P)).tolist())
    assert tri.P2 == tuple(t5.frobenius(np.array(tri.P), 2).tolist())
    assert tri.l2 == tuple(t5.frobenius(np.array(tri.l1)).tolist())
    assert tri.l3 == tuple(t5.frobenius(np.array(tri.l2)).tolist())
    assert tri.l1 == tuple(t5.frobenius(np.array(tri.l3)).tolist())
    lin = lambda l, p: ext.add(ext.add(ext.mul(l[0], p[0]), ext.mul(l[1], p[1])), ext.mul(l[2], p[2]))
    assert lin(tri.l1, tri.P) == 0 and lin(tri.l1, tri.P1) == 0
    with pytest.raises(NotInLambda):
        FrobeniusTriangle.from_point(t5, (1, 2, 3))


def test_type1_net(t5):
    rng = np.random.default_rng(0)
    L = lambda_points(t5)
    for P in L[rng.choice(len(L), 25, replace=False)]:
        net = build_type1_net(t5, P)
        assert net.kind is SystemKind.TYPE1_CONIC and net.dimension == 3
        assert net.rank() == 3 and net.is_rational()
        tri = net.triangle
        for f in net.basis:
            g = _lift(t5, f)
            assert all(g.evaluate(v) == 0 for v in tri.vertices)
        members = net_members(t5, P)
        assert len({tuple(r) for r in members}) == 5**2 + 5 + 1


def test_type1_irreducible_somewhere(t5):
    L = lambda_points(t5)
    assert any(net_is_irreducible(t5, P) for P in L[:50])


def test_type1_descriptor_roundtrip(t5):
    P = lambda_points(t5)[5]
    net = build_type1_net(t5, P)
    again = parse_descriptor(net.text())
    assert again.text() == net.text() and again.basis == net.basis


def test_type2_system():
    F = make_field(7)
    s = smallest_nonsquare(F)
    assert s == 3
    sysd = build_type2_system(F)
    assert sysd.params["s"] == 3 and sysd.rank() == 3 and sysd.is_rational()
    tw = make_tower(F, 2)
    i = sysd.params["i"]
    assert tw.ext.mul(i, i) == tw.embed(s)
    assert tw.frobenius(i) == tw.ext.neg(i)
    P2 = sysd.params["P2"]
    assert classify_point_parabola(F, P2[:2]) is PointClass.INTERNAL
    for f in sysd.basis:
        g = _lift(tw, f)
        assert g.evaluate(sysd.params["P"]) == 0 and g.evaluate(sysd.params["P1"]) == 0
        assert f.evaluate(P2) == 0
    with pytest.raises(SIsSquare):
        build_type2_system(F, 2)
    with pytest.raises(IndexOutOfRange):
        build_type2_system(F, 0)


def test_type2_alpha_zero_contains_line_at_infinity():
    F = make_field(7)
    B = type2_basis_coeffs(F, 3)
    member = conic_poly(F, combine(F, np.array([0, 1, 0]), B))
    assert conic_determinant(F, member) == 0
    q, r = member.divmod(MultiPoly.linear(F, (0, 0, 1)))
    assert r.is_zero()


@pytest.mark.parametrize("q", [5, 7, 9])
def test_type2_determinant_identity(q):
    F = field_of_order(q)
    for s in (a for a in range(1, q) if not F.is_square(a)):
        B = type2_basis_coeffs(F, s)
        combos = np.array(list(itertools.product(range(q), repeat=3)))
        dets = conic_det_many(F, combine(F, combos, B))
        formula = [type2_determinant(F, s, *c) for c in combos]
        assert dets.tolist() == formula


def test_full_degree_system():
    F = make_field(7)
    s1 = full_degree_system(F, 1)
    assert [f.format(["x", "y"]) for f in s1.basis] == ["1", "x", "y"]
    assert full_degree_system(F, 2).dimension == 6
    assert full_degree_system(F, 3).dimension == 10
    assert full_degree_system(F, 3).rank() == 10
    with pytest.raises(ValidationError):
        full_degree_system(F, 0)


def test_cubic_system_q5_k11(t5):
    sysd = build_cubic_system(t5, 11)
    assert sysd.dimension == 4 and sysd.rank() == 4 and sysd.is_rational()
    assert all(f.is_homogeneous() and f.degree() == 3 for f in sysd.basis)
    tri = sysd.triangle
    l1, l2, l3 = (MultiPoly.linear(t5.ext, l) for l in tri.sides)
    prod = (l1 * l2 * l3)
    assert _lift(t5, sysd.basis[3]) == prod
    assert sysd.text() == "cubic:q=5;k=11"


@pytest.mark.parametrize("q", [5, 7])
def test_cubic_vertex_incidence(q):
    T = make_tower(make_field(q), 3)
    for k in admissible_k(T):
        sysd = build_cubic_system(T, k)
        lifted = [_lift(T, f) for f in sysd.basis[:3]]
        for v in sysd.triangle.vertices:
            assert all(g.evaluate(v) == 0 for g in lifted)


@pytest.mark.parametrize("q", [5, 7])
def test_cubic_members_have_no_line_components(q):
    T = make_tower(make_field(q), 3)
    rng = np.random.default_rng(q)
    F = T.base
    for k in admissible_k(T)[:6]:
        sysd = build_cubic_system(T, k)
        sides = [MultiPoly.linear(T.ext, l) for l in sysd.triangle.sides]
        for _ in range(10):
            c = rng.integers(0, q, 4)
            if not c[:3].any():
                c[0] = 1
            member = sysd.basis[0].scale(int(c[0])) + sysd.basis[1].scale(int(c[1])) \
                + sysd.basis[2].scale(int(c[2])) + sysd.basis[3].scale(int(c[3]))
            found, _ = rational_line_factors(F, member)
            assert found == []
            lifted = _lift(T, member)
            for s in sides:
                _, r = lifted.divmod(s)
                assert not r.is_zero()


def test_degenerate_triangle_and_range(t5):
    bad = [k for k in range(1, 31) if k not in admissible_k(t5)]
    assert bad
    with pytest.raises(DegenerateTriangle):
        build_cubic_system(t5, bad[0])
    with pytest.raises(IndexOutOfRange):
        build_cubic_system(t5, 0)
    L = cubic_triangle_lines(t5, 11)
    assert L.shape == (3, 3)


def test_parabola_substitution_examples():
    F = make_field(7)
    names = ["x", "y"]
    y = parse_poly("y", F, names)
    four_inv = F.inv(4)
    expect = MultiPoly(F, 2, {(2, 0): four_inv, (0, 2): F.neg(four_inv)})
    assert parabola_substitution(y) == expect
    C = parse_poly("x^2 - 4*y", F, names)
    assert parabola_substitution(C) == parse_poly("t^2", F, ["x", "t"])


@pytest.mark.parametrize("q", [5, 7, 9])
def test_substitution_double_count(q):
    F = field_of_order(q)
    rng = np.random.default_rng(q)
    for deg in (2, 3):
        monos = [(a, b, deg - a - b) for a in range(deg + 1) for b in range(deg + 1 - a)]
        for _ in range(100):
            c = rng.integers(0, q, len(monos))
            if not c.any():
                continue
            D = MultiPoly(F, 3, dict(zip(monos, (int(v) for v in c))))
            aff = D.dehomogenize()
            assert 2 * curve_external_count(F, D, Mode.AFFINE) == substituted_zero_count(aff)


def test_descriptor_parse_errors():
    for bad in ["nonsense", "type2:s=3", "type2:q=x", "type1:q=5;P=(1,2)", "cubic:q=5"]:
        with pytest.raises(ValidationError):
            parse_descriptor(bad)
    assert parse_descriptor("full:q=7;u=2").dimension == 6
    assert parse_descriptor("type2:q=7;s=5").params["s"] == 5
