import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symcodes.errors import DivisionByZero, EvenCharacteristic, NonPrimeP, ReducibleModulus, ValidationError
from symcodes.finite_field import (
    arith,
    enumerate_elements,
    field_of_order,
    is_square,
    make_field,
    make_tower,
    norm_and_trace,
    parse_field_descriptor,
    primitive_element,
    relative_frobenius,
    sqrt,
)

ORDERS = [3, 5, 7, 9, 11, 13, 25, 27]


def test_make_field_prime():
    F = make_field(7)
    assert F.q == 7 and F.e == 1


def test_make_field_with_modulus():
    F = make_field(3, 2, [1, 0, 1])
    assert F.q == 9
    t = 3  # the class of t
    assert F.mul(t, t) == 2


@pytest.mark.parametrize("args,exc", [
    ((9,), NonPrimeP),
    ((2,), EvenCharacteristic),
    ((3, 2, [2, 0, 1]), ReducibleModulus),  # X^2 + 2 = (X-1)(X+1) mod 3
    ((7, 1, [1, 0, 1]), ValidationError),  # degree mismatch
])
def test_make_field_errors(args, exc):
    with pytest.raises(exc):
        make_field(*args)


def test_default_modulus_is_smallest_irreducible():
    assert tuple(make_field(3, 2).modulus) == (1, 0, 1)
    assert tuple(make_field(3, 3).modulus) == (1, 2, 0, 1)


def test_arith_examples():
    F = make_field(7)
    assert int(arith(F, "add", 3, 5)) == 1
    assert int(arith(F, "pow", 3, 3)) == 6
    assert int(arith(F, "pow", 3, -1)) == 5
    G = make_field(3, 2)
    assert int(arith(G, "mul", 3, 3)) == 2
    with pytest.raises(DivisionByZero):
        arith(F, "inv", 0)
    with pytest.raises(DivisionByZero):
        arith(F, "div", 1, 0)


def test_squares_and_sqrt():
    F = make_field(7)
    assert is_square(F, 2) and int(sqrt(F, 2)) == 3
    assert not is_square(F, 3) and sqrt(F, 3) is None
    assert is_square(F, 0) and int(sqrt(F, 0)) == 0


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
def test_half_of_nonzero_elements_are_squares(q):
    F = field_of_order(q)
    squares = [a for a in enumerate_elements(F) if int(a) and is_square(F, a)]
    assert len(squares) == (q - 1) // 2
    assert {F.mul(a, a) for a in range(1, q)} == {int(a) for a in squares}


@pytest.mark.parametrize("q,g", [(7, 3), (3, 2), (5, 2)])
def test_primitive_element(q, g):
    F = field_of_order(q)
    assert int(primitive_element(F)) == g
    # oracle: smallest element whose powers hit every nonzero element
    oracle = next(a for a in range(1, q) if len({pow(a, k, q) for k in range(q - 1)}) == q - 1)
    assert oracle == g


@pytest.mark.parametrize("q", [9, 25, 27])
def test_primitive_element_extension(q):
    F = field_of_order(q)
    g = F.primitive_element()
    seen = {F.pow(g, k) for k in range(q - 1)}
    assert len(seen) == q - 1
    assert all(F.order(a) < q - 1 for a in range(1, g))


def test_enumerate_elements():
    assert [int(a) for a in enumerate_elements(make_field(3))] == [0, 1, 2]
    els = enumerate_elements(field_of_order(9))
    assert len(els) == 9 and [int(a) for a in els[:2]] == [0, 1]
    assert len(set(enumerate_elements(make_field(7)))) == 7


def test_formatting_and_descriptor():
    F = field_of_order(9)
    assert F.format(3) == "t"
    assert F.format(5) == "2+t"
    assert F.descriptor() == "3^2/1,0,1"
    assert parse_field_descriptor("3^2/1,0,1") == F
    assert parse_field_descriptor("9") == F
    assert make_field(7).format(5) == "5"


@pytest.mark.parametrize("q", ORDERS)
@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_field_axioms(q, data):
    F = field_of_order(q)
    el = st.integers(0, q - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, F.inv(a)) == 1


def test_table_and_log_paths_agree():
    # GF(7^4) = 2401 is still tabled; GF(3^8) = 6561 uses log/exp
    for p, e in [(7, 4), (3, 8)]:
        F = make_field(p, e)
        rng = np.random.default_rng(0)
        a = rng.integers(0, F.q, 500)
        b = rng.integers(0, F.q, 500)
        slow = np.array([F._slow_mul(int(x), int(y)) for x, y in zip(a, b)])
        assert np.array_equal(F.vmul(a, b), slow)
        digit_sum = F.from_digits((F.to_digits(a) + F.to_digits(b)) % p)
        assert np.array_equal(F.vadd(a, b), digit_sum)


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
@pytest.mark.parametrize("r", [2, 3])
def test_tower_embedding_is_a_homomorphism(q, r):
    F = field_of_order(q)
    T = make_tower(F, r)
    E = T.ext
    a, b = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
    assert np.array_equal(T.embed(F.vadd(a, b)), E.vadd(T.embed(a), T.embed(b)))
    assert np.array_equal(T.embed(F.vmul(a, b)), E.vmul(T.embed(a), T.embed(b)))
    assert T.embed(1) == 1


@pytest.mark.parametrize("q,r", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (7, 3), (9, 3), (11, 3)])
def test_frobenius_properties(q, r):
    T = make_tower(field_of_order(q), r)
    E = T.ext
    xs = np.arange(E.q)
    assert np.array_equal(T.frobenius(xs, r), xs)
    fixed = xs[T.frobenius(xs) == xs]
    assert sorted(fixed.tolist()) == sorted(T.embed(np.arange(q)).tolist())
    if E.q <= 1331:
        a, b = np.meshgrid(xs, xs, indexing="ij")
        fa, fb = T.frob_table[a], T.frob_table[b]
        assert np.array_equal(T.frob_table[E.vadd(a, b)], E.vadd(fa, fb))
        assert np.array_equal(T.frob_table[E.vmul(a, b)], E.vmul(fa, fb))


def test_frobenius_gf9_over_gf3():
    T = make_tower(make_field(3), 2)
    t = 3
    assert int(relative_frobenius(T, t)) == T.ext.mul(2, t)


def test_norm_and_trace():
    F = make_field(5)
    T = make_tower(F, 3)
    for c in range(5):
        n, tr = norm_and_trace(T, T.embed(c))
        assert int(n) == F.pow(c, 3) and int(tr) == F.mul(3, c)
    n, tr = norm_and_trace(T, 0)
    assert int(n) == 0 and int(tr) == 0
    w = T.ext.primitive_element()
    n, _ = norm_and_trace(T, w)
    assert T.embed(int(n)) == T.ext.pow(w, 1 + 5 + 25)
    assert F.order(int(n)) == 4


def test_restrict_rejects_non_subfield():
    T = make_tower(make_field(5), 3)
    with pytest.raises(ValidationError):
        T.restrict(T.ext.primitive_element())


def test_field_element_operators():
    F = make_field(7)
    a = F.element(3)
    assert int(a + 5) == 1 and int(a * a) == 2 and int(a / a) == 1
    assert int(-a) == 4 and int(a ** 3) == 6 and int(2 - a) == 6
    assert sorted([F.element(5), a])[0] == a


def test_pickle_roundtrip():
    import pickle

    F = field_of_order(9)
    assert pickle.loads(pickle.dumps(F)) == F
    T = make_tower(F, 3)
    T2 = pickle.loads(pickle.dumps(T))
    assert T2.ext == T.ext and np.array_equal(T2.frob_table, T.frob_table)


def test_all_pairs_small_field_exhaustive():
    F = field_of_order(9)
    for a, b in itertools.product(range(9), repeat=2):
        if b:
            assert F.mul(F.div(a, b), b) == a
