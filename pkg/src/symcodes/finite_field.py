"""Arithmetic in GF(p^e) for odd p, with GF(q) ⊂ GF(q^r) towers.

Elements are plain integers ``0 <= a < q``: the coefficient vector
``(c0, ..., c_{e-1})`` of ``c0 + c1*t + ... `` in the polynomial basis is
encoded as ``c0 + c1*p + ... + c_{e-1}*p^(e-1)``.  Integer order is the
element order used everywhere (so ``0, 1, ..., p-1`` come first).

Every operation exists in a scalar form (``add``, ``mul``...) that takes and
returns Python ints, and a vectorised form (``vadd``, ``vmul``...) working on
numpy arrays.  Small fields use full addition/multiplication tables; large
ones fall back to digit-wise addition and log/exp multiplication.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DivisionByZero,
    EvenCharacteristic,
    NonPrimeP,
    ReducibleModulus,
    ValidationError,
)

# fields up to this order get full q x q tables (13^3 = 2197 fits)
TABLE_LIMIT = 2500
MAX_ORDER = 128**3


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q = p^e``; raise ValidationError if q is not a prime power."""
    if q < 2:
        raise ValidationError(f"q={q} is not a prime power")
    fs = prime_factors(q)
    if len(fs) != 1:
        raise ValidationError(f"q={q} is not a prime power")
    p = fs[0]
    e = round(math.log(q, p))
    while p**e < q:
        e += 1
    while p**e > q:
        e -= 1
    return p, e


# --- polynomials over GF(p), coefficient lists constant first ---------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        _trim(a)
    return a


def monic_polys(p: int, d: int) -> Iterable[tuple[int, ...]]:
    """All monic degree-d polynomials over GF(p), in integer-encoding order."""
    for n in range(p**d):
        coeffs = []
        for _ in range(d):
            coeffs.append(n % p)
            n //= p
        yield tuple(coeffs) + (1,)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim([c % p for c in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    for cand in monic_polys(p, e):
        if e == 1 or (cand[0] != 0 and is_irreducible(cand, p)):
            return cand
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# --- the field -----------------------------------------------------------


class GF:
    """The finite field GF(p^e) = GF(p)[t]/(modulus).

    Build instances through :func:`make_field`, which validates and caches.
    """

    def __init__(self, p: int, e: int, modulus: tuple[int, ...]):
        self.p = p
        self.e = e
        self.modulus = modulus
        self.q = p**e
        self._pows = np.array([p**i for i in range(e)], dtype=np.int64)
        q = self.q

        if q <= TABLE_LIMIT:
            self._build_tables()
            self.generator = self._find_generator()
            exp = np.empty(q - 1, dtype=np.int64)
            x = 1
            for k in range(q - 1):
                exp[k] = x
                x = int(self._mul_tab[x, self.generator])
        else:
            self._add_tab = self._mul_tab = None
            self.generator = self._find_generator()
            exp = self._exp_blocks(self.generator)
        self._exp = exp
        self._log = np.zeros(q, dtype=np.int64)
        self._log[exp] = np.arange(q - 1)
        self._neg = self.from_digits((-self.to_digits(np.arange(q))) % p)
        self._inv = np.zeros(q, dtype=np.int64)
        self._inv[1:] = exp[(-self._log[1:]) % (q - 1)]

        x = np.arange(q)
        sq = self.vmul(x, x)
        roots = np.full(q, q, dtype=np.int64)
        np.minimum.at(roots, sq, x)
        roots[roots == q] = -1
        self._sqrt = roots

    # -- construction helpers --

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        if self.e == 1:
            a = np.arange(q)
            self._add_tab = ((a[:, None] + a[None, :]) % p).astype(np.int32)
            self._mul_tab = ((a[:, None] * a[None, :]) % p).astype(np.int32)
            return
        D = self.to_digits(np.arange(q))
        add = np.empty((q, q), dtype=np.int32)
        mul = np.empty((q, q), dtype=np.int32)
        step = max(1, 200_000 // q)
        for lo in range(0, q, step):
            rows = D[lo:lo + step, None, :]
            add[lo:lo + step] = self.from_digits((rows + D[None, :, :]) % p)
            mul[lo:lo + step] = self.from_digits(self._poly_mul_digits(rows, D[None, :, :]))
        self._add_tab = add
        self._mul_tab = mul

    def _poly_mul_digits(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        p, e, mod = self.p, self.e, self.modulus
        shape = np.broadcast_shapes(A.shape, B.shape)[:-1]
        prod = np.zeros(shape + (2 * e - 1,), dtype=np.int64)
        for i in range(e):
            for j in range(e):
                prod[..., i + j] += A[..., i] * B[..., j]
        prod %= p
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[..., k].copy()
            for i in range(e):
                prod[..., k - e + i] = (prod[..., k - e + i] - c * mod[i]) % p
        return prod[..., :e]

    def _slow_mul(self, a: int, b: int) -> int:
        if self._mul_tab is not None:
            return int(self._mul_tab[a, b])
        A = self.to_digits(np.array(a))
        B = self.to_digits(np.array(b))
        return int(self.from_digits(self._poly_mul_digits(A, B)))

    def _slow_pow(self, a: int, n: int) -> int:
        r = 1
        while n:
            if n & 1:
                r = self._slow_mul(r, a)
            a = self._slow_mul(a, a)
            n >>= 1
        return r

    def _find_generator(self) -> int:
        q = self.q
        if q == 2:  # pragma: no cover - char 2 rejected upstream
            return 1
        exps = [(q - 1) // r for r in prime_factors(q - 1)]
        for g in range(1, q):
            if all(self._slow_pow(g, k) != 1 for k in exps):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _exp_blocks(self, g: int) -> np.ndarray:
        q = self.q
        B = math.isqrt(q - 1) + 1
        first = [1]
        for _ in range(B - 1):
            first.append(self._slow_mul(first[-1], g))
        first_d = self.to_digits(np.array(first))
        gB = self._slow_mul(first[-1], g)
        out = []
        step = 1
        for _ in range(0, q - 1, B):
            row = self._poly_mul_digits(first_d, self.to_digits(np.array(step))[None, :])
            out.append(self.from_digits(row))
            step = self._slow_mul(step, gB)
        return np.concatenate(out)[: q - 1]

    # -- encoding --

    def to_digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pows) % self.p

    def from_digits(self, d) -> np.ndarray:
        return (np.asarray(d, dtype=np.int64) * self._pows).sum(axis=-1)

    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.to_digits(a))

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        if len(coeffs) > self.e:
            raise ValidationError(f"too many coefficients for GF({self.q})")
        return int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs)))

    def from_int(self, n: int) -> int:
        """Image of the integer n under Z -> GF(q)."""
        return n % self.p

    def elements(self) -> range:
        return range(self.q)

    # -- scalar arithmetic --

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self._add_tab is not None:
            return int(self._add_tab[a, b])
        return int(self.vadd(a, b))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, int(self._neg[b]))

    def neg(self, a: int) -> int:
        return int(self._neg[a])

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in GF({self.q})")
        return int(self._inv[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if a == 0:
            return 1 if n == 0 else 0
        return int(self._exp[(int(self._log[a]) * n) % (self.q - 1)])

    def is_square(self, a: int) -> bool:
        return a == 0 or self.pow(a, (self.q - 1) // 2) == 1

    def sqrt(self, a: int) -> int | None:
        """Smaller square root of ``a`` in element order, or None."""
        r = int(self._sqrt[a])
        return None if r < 0 else r

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise DivisionByZero("0 has no multiplicative order")
        return (self.q - 1) // math.gcd(self.q - 1, int(self._log[a]))

    def primitive_element(self) -> int:
        return self.generator

    # -- vectorised arithmetic --

    def vadd(self, a, b) -> np.ndarray:
        if self._add_tab is not None:
            return self._add_tab[a, b]
        if self.e == 1:  # pragma: no cover - prime fields are always tabled
            return (np.asarray(a) + np.asarray(b)) % self.p
        return self.from_digits((self.to_digits(a) + self.to_digits(b)) % self.p)

    def vneg(self, a) -> np.ndarray:
        return self._neg[a]

    def vsub(self, a, b) -> np.ndarray:
        return self.vadd(a, self._neg[b])

    def vmul(self, a, b) -> np.ndarray:
        if self._mul_tab is not None:
            return self._mul_tab[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        r = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def vinv(self, a) -> np.ndarray:
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivisionByZero("inverse of 0")
        return self._inv[a]

    def vpow(self, a, n: int) -> np.ndarray:
        a = np.asarray(a)
        if n < 0:
            return self.vpow(self.vinv(a), -n)
        if n == 0:
            return np.ones_like(a, dtype=np.int64)
        r = self._exp[(self._log[a] * n) % (self.q - 1)]
        return np.where(a == 0, 0, r)

    def vis_square(self, a) -> np.ndarray:
        a = np.asarray(a)
        return (a == 0) | (self._log[a] % 2 == 0)

    def vsum(self, a, axis: int = -1) -> np.ndarray:
        """Field sum along ``axis``."""
        a = np.asarray(a)
        if self.e == 1:
            return a.sum(axis=axis) % self.p
        a = np.moveaxis(a, axis, 0)
        acc = a[0].copy() if len(a) else np.zeros(a.shape[1:], dtype=np.int64)
        for k in range(1, len(a)):
            acc = self.vadd(acc, a[k])
        return acc

    def matmul(self, A, B) -> np.ndarray:
        """Matrix product over the field; works on stacked matrices."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if self.e == 1:
            return (A @ B) % self.p
        K = A.shape[-1]
        acc = None
        for k in range(K):
            term = self.vmul(A[..., :, k, None], B[..., k, None, :])
            acc = term if acc is None else self.vadd(acc, term)
        return acc

    # -- misc --

    def format(self, a: int) -> str:
        if self.e == 1:
            return str(a)
        parts = []
        for i, c in enumerate(self.coeffs(a)):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            else:
                mono = "t" if i == 1 else f"t^{i}"
                parts.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(parts) if parts else "0"

    def descriptor(self) -> str:
        return f"{self.p}^{self.e}/" + ",".join(str(c) for c in self.modulus)

    def element(self, a: int) -> "FieldElement":
        return FieldElement(self, a)

    def __repr__(self) -> str:
        return f"GF({self.q})" if self.e == 1 else f"GF({self.p}^{self.e})"

    def __reduce__(self):
        return (make_field, (self.p, self.e, self.modulus))

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))


@functools.lru_cache(maxsize=None)
def _cached_field(p: int, e: int, modulus: tuple[int, ...]) -> GF:
    return GF(p, e, modulus)


def make_field(p: int, e: int = 1, modulus: Sequence[int] | None = None) -> GF:
    """Validated, cached GF(p^e).

    Without a modulus the lexicographically smallest monic irreducible is
    chosen, so element encodings are reproducible across runs.
    """
    if not is_prime(p):
        raise NonPrimeP(f"p={p} is not prime")
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")
    if e < 1:
        raise ValidationError(f"extension degree e={e} must be >= 1")
    if p**e > MAX_ORDER:
        raise ValidationError(f"field order {p}^{e} exceeds supported maximum {MAX_ORDER}")
    if modulus is None:
        modulus = smallest_irreducible(p, e)
    else:
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1:
            raise ReducibleModulus(f"modulus has degree {len(modulus) - 1}, expected {e}")
        if modulus[-1] != 1:
            raise ReducibleModulus("modulus must be monic")
        if e > 1 and not is_irreducible(modulus, p):
            raise ReducibleModulus(f"modulus {modulus} is reducible over GF({p})")
    return _cached_field(p, e, tuple(modulus))


def field_of_order(q: int) -> GF:
    p, e = prime_power(q)
    return make_field(p, e)


def parse_field_descriptor(text: str) -> GF:
    """Parse ``"p^e/c0,c1,...,ce"``; ``"p^e"`` or a bare order ``"q"`` also work."""
    text = text.strip()
    head, _, tail = text.partition("/")
    try:
        if "^" in head:
            p, e = (int(x) for x in head.split("^"))
        else:
            p, e = prime_power(int(head))
        modulus = [int(c) for c in tail.split(",")] if tail else None
    except ValueError as exc:
        raise ValidationError(f"bad field descriptor {text!r}") from exc
    return make_field(p, e, modulus)


def enumerate_elements(field: GF) -> list["FieldElement"]:
    return [FieldElement(field, a) for a in field.elements()]


# --- element wrapper -------------------------------------------------------


class FieldElement:
    """An element of a :class:`GF`, with operator overloading.

    Plain ``int`` operands are read as images of integers (``x + 1``).
    """

    __slots__ = ("field", "value")

    def __init__(self, field: GF, value: int):
        if not 0 <= value < field.q:
            raise ValidationError(f"{value} is not an element encoding of {field}")
        self.field = field
        self.value = int(value)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValidationError(f"mixing {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def _wrap(self, v: int) -> "FieldElement":
        return FieldElement(self.field, v)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._wrap(self.field.div(o, self.value))

    def __neg__(self):
        return self._wrap(self.field.neg(self.value))

    def __pow__(self, n: int):
        return self._wrap(self.field.pow(self.value, n))

    def inverse(self) -> "FieldElement":
        return self._wrap(self.field.inv(self.value))

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.from_int(other)
        return NotImplemented

    def __lt__(self, other: "FieldElement") -> bool:
        return self.value < other.value

    def __hash__(self) -> int:
        return hash((self.field.q, self.value))

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return self.field.format(self.value)


_OPS = {
    "add": lambda F, a, b: F.add(a, b),
    "sub": lambda F, a, b: F.sub(a, b),
    "mul": lambda F, a, b: F.mul(a, b),
    "div": lambda F, a, b: F.div(a, b),
    "neg": lambda F, a: F.neg(a),
    "inv": lambda F, a: F.inv(a),
}


def arith(field: GF, op: str, *operands) -> FieldElement:
    """Named-operation front end: ``arith(F, "pow", 3, 3)``.

    Element operands may be FieldElements or raw encodings; the exponent of
    ``pow`` is an ordinary integer.
    """
    vals = [o.value if isinstance(o, FieldElement) else int(o) for o in operands]
    if op == "pow":
        a, n = vals
        return FieldElement(field, field.pow(a, n))
    if op not in _OPS:
        raise ValidationError(f"unknown field operation {op!r}")
    return FieldElement(field, _OPS[op](field, *vals))


def is_square(field: GF, a) -> bool:
    return field.is_square(int(a))


def sqrt(field: GF, a) -> FieldElement | None:
    r = field.sqrt(int(a))
    return None if r is None else FieldElement(field, r)


def primitive_element(field: GF) -> FieldElement:
    return FieldElement(field, field.primitive_element())


# --- towers ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Tower:
    """GF(q) embedded in GF(q^r).

    ``embed_table[a]`` is the image of base element ``a``; ``restrict_table``
    inverts it (-1 off the subfield); ``frob_table[x] = x^q``.
    """

    base: GF
    ext: GF
    degree: int
    embed_table: np.ndarray = dc_field(repr=False)
    restrict_table: np.ndarray = dc_field(repr=False)
    frob_table: np.ndarray = dc_field(repr=False)

    def embed(self, a):
        return int(self.embed_table[a]) if np.ndim(a) == 0 else self.embed_table[np.asarray(a)]

    def restrict(self, x):
        """Inverse of :meth:`embed`; raises if ``x`` is not in the subfield."""
        r = self.restrict_table[np.asarray(x)]
        if np.any(r < 0):
            raise ValidationError("element is not in the base field")
        return int(r) if np.ndim(x) == 0 else r

    def frobenius(self, x, times: int = 1):
        x = np.asarray(x)
        for _ in range(times % self.degree):
            x = self.frob_table[x]
        return int(x) if x.ndim == 0 else x

    def is_rational(self, x) -> np.ndarray | bool:
        r = self.restrict_table[np.asarray(x)] >= 0
        return bool(r) if np.ndim(x) == 0 else r

    def __reduce__(self):
        return (make_tower, (self.base, self.degree))


@functools.lru_cache(maxsize=None)
def make_tower(base: GF, r: int) -> Tower:
    """Build GF(q^r) over ``base`` (r in {2, 3} in practice)."""
    if r < 2:
        raise ValidationError("tower degree must be >= 2")
    ext = make_field(base.p, base.e * r)
    # theta: smallest root in ext of the base modulus
    xs = np.arange(ext.q)
    val = np.zeros(ext.q, dtype=np.int64)
    for c in reversed(base.modulus):
        val = ext.vadd(ext.vmul(val, xs), c)
    theta = int(np.flatnonzero(val == 0)[0])
    D = base.to_digits(np.arange(base.q))
    embed = np.zeros(base.q, dtype=np.int64)
    power = 1
    for i in range(base.e):
        embed = ext.vadd(embed, ext.vmul(D[:, i], power))
        power = ext.mul(power, theta)
    restrict = np.full(ext.q, -1, dtype=np.int64)
    restrict[embed] = np.arange(base.q)
    frob = ext.vpow(xs, base.q)
    return Tower(base, ext, r, embed, restrict, frob)


def relative_frobenius(tower: Tower, a) -> FieldElement:
    return FieldElement(tower.ext, tower.frobenius(int(a)))


def norm_and_trace(tower: Tower, a) -> tuple[FieldElement, FieldElement]:
    """Relative norm and trace of ``a`` down to the base field."""
    ext = tower.ext
    x = int(a)
    n, t = 1, 0
    for _ in range(tower.degree):
        n = ext.mul(n, x)
        t = ext.add(t, x)
        x = tower.frobenius(x)
    return FieldElement(tower.base, tower.restrict(n)), FieldElement(tower.base, tower.restrict(t))


def embed_elements(tower: Tower, values: Iterable[int]) -> list[int]:
    return [tower.embed(v) for v in values]


def all_tuples(field: GF, k: int) -> np.ndarray:
    """All k-tuples of field elements as a (q^k, k) array, lexicographic."""
    return np.array(list(itertools.product(range(field.q), repeat=k)), dtype=np.int64).reshape(-1, k)
