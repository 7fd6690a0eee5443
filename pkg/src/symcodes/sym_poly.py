"""Sparse multivariate polynomials, elementary symmetric polynomials and the
quotient map x -> (sigma^1(x), ..., sigma^m(x)) for m <= 3.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    BadCharacteristic,
    IndexOutOfRange,
    MTooLarge,
    NonMonic,
    ValidationError,
)
from .finite_field import GF, FieldElement

Exponent = tuple[int, ...]


def _val(c) -> int:
    return c.value if isinstance(c, FieldElement) else int(c)


class MultiPoly:
    """Polynomial in ``nvars`` variables; ``terms`` maps exponent tuples to
    nonzero field-element encodings."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: GF, nvars: int, terms: Mapping[Exponent, int] | None = None):
        self.field = field
        self.nvars = nvars
        clean: dict[Exponent, int] = {}
        for exp, c in (terms or {}).items():
            c = _val(c)
            if len(exp) != nvars:
                raise ArityMismatch(f"exponent {exp} has wrong length for {nvars} variables")
            if c:
                clean[tuple(exp)] = c
        self.terms = clean

    # -- constructors --

    @classmethod
    def zero(cls, field: GF, nvars: int) -> "MultiPoly":
        return cls(field, nvars)

    @classmethod
    def const(cls, field: GF, nvars: int, c) -> "MultiPoly":
        return cls(field, nvars, {(0,) * nvars: _val(c)})

    @classmethod
    def var(cls, field: GF, nvars: int, i: int) -> "MultiPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(field, nvars, {tuple(exp): 1})

    @classmethod
    def linear(cls, field: GF, coeffs: Sequence[int]) -> "MultiPoly":
        """The linear form sum c_i X_i."""
        n = len(coeffs)
        return cls(field, n, {tuple(int(j == i) for j in range(n)): c for i, c in enumerate(coeffs)})

    # -- basic queries --

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def coeff(self, exp: Exponent) -> int:
        return self.terms.get(tuple(exp), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.field == other.field and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- ring operations --

    def _check(self, other: "MultiPoly") -> None:
        if other.nvars != self.nvars:
            raise ArityMismatch(f"{self.nvars} vs {other.nvars} variables")
        if other.field != self.field:
            raise ValidationError("polynomials over different fields")

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, FieldElement):
            return MultiPoly.const(self.field, self.nvars, other.value)
        if isinstance(other, int):
            return MultiPoly.const(self.field, self.nvars, self.field.from_int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = F.add(out.get(e, 0), c)
        return MultiPoly(F, self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        F = self.field
        return MultiPoly(F, self.nvars, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        F = self.field
        out: dict[Exponent, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = F.add(out.get(e, 0), F.mul(c1, c2))
        return MultiPoly(F, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValidationError("negative polynomial power")
        result = MultiPoly.const(self.field, self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "MultiPoly":
        """Multiply by a field element given as encoding or FieldElement."""
        F, c = self.field, _val(c)
        return MultiPoly(F, self.nvars, {e: F.mul(v, c) for e, v in self.terms.items()})

    def map_coeffs(self, fn, field: GF | None = None) -> "MultiPoly":
        return MultiPoly(field or self.field, self.nvars, {e: fn(c) for e, c in self.terms.items()})

    # -- substitution / evaluation --

    def compose(self, subs: Sequence["MultiPoly"]) -> "MultiPoly":
        """Replace variable i by ``subs[i]`` (all subs share one arity)."""
        if len(subs) != self.nvars:
            raise ArityMismatch(f"need {self.nvars} substitutions, got {len(subs)}")
        n = subs[0].nvars
        F = self.field
        cache: dict[tuple[int, int], MultiPoly] = {}

        def power(i: int, k: int) -> MultiPoly:
            if (i, k) not in cache:
                cache[(i, k)] = subs[i] ** k
            return cache[(i, k)]

        out = MultiPoly.zero(F, n)
        for e, c in self.terms.items():
            term = MultiPoly.const(F, n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def __call__(self, *point) -> int:
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> int:
        if len(point) != self.nvars:
            raise ArityMismatch(f"point of length {len(point)} for {self.nvars} variables")
        F = self.field
        xs = [_val(v) for v in point]
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(xs, e):
                if k:
                    t = F.mul(t, F.pow(x, k))
            total = F.add(total, t)
        return total

    def evaluate_many(self, points) -> np.ndarray:
        """Vectorised evaluation on an (N, nvars) array of encodings."""
        pts = np.asarray(points, dtype=np.int64).reshape(-1, self.nvars)
        F = self.field
        out = np.zeros(len(pts), dtype=np.int64)
        if not self.terms:
            return out
        maxdeg = [max(e[i] for e in self.terms) for i in range(self.nvars)]
        powers = []
        for i in range(self.nvars):
            col = [np.ones(len(pts), dtype=np.int64)]
            for _ in range(maxdeg[i]):
                col.append(F.vmul(col[-1], pts[:, i]))
            powers.append(col)
        for e, c in self.terms.items():
            t = np.full(len(pts), c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    t = F.vmul(t, powers[i][k])
            out = F.vadd(out, t)
        return np.asarray(out, dtype=np.int64)

    def permute(self, perm: Sequence[int]) -> "MultiPoly":
        """Polynomial G with G(X) = F(X_perm[0], ..., X_perm[n-1])."""
        out = {}
        for e, c in self.terms.items():
            new = [0] * self.nvars
            for i, k in enumerate(e):
                new[perm[i]] += k
            out[tuple(new)] = c
        return MultiPoly(self.field, self.nvars, out)

    def dehomogenize(self) -> "MultiPoly":
        """Set the last variable to 1."""
        F = self.field
        out: dict[Exponent, int] = {}
        for e, c in self.terms.items():
            k = e[:-1]
            out[k] = F.add(out.get(k, 0), c)
        return MultiPoly(F, self.nvars - 1, out)

    def homogenize(self) -> "MultiPoly":
        d = self.degree()
        return MultiPoly(self.field, self.nvars + 1, {e + (d - sum(e),): c for e, c in self.terms.items()})

    def divmod(self, divisor: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        """Multivariate division with respect to lex order (X1 > X2 > ...).

        Exact whenever ``divisor`` divides ``self``.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ValidationError("division by the zero polynomial")
        F = self.field
        lead = max(divisor.terms)
        inv_lc = F.inv(divisor.terms[lead])
        quot: dict[Exponent, int] = {}
        rem: dict[Exponent, int] = {}
        work = MultiPoly(F, self.nvars, self.terms)
        while work.terms:
            lt = max(work.terms)
            c = work.terms[lt]
            if all(a >= b for a, b in zip(lt, lead)):
                e = tuple(a - b for a, b in zip(lt, lead))
                f = F.mul(c, inv_lc)
                quot[e] = F.add(quot.get(e, 0), f)
                work = work - MultiPoly(F, self.nvars, {e: f}) * divisor
            else:
                rem[lt] = c
                del work.terms[lt]
        return MultiPoly(F, self.nvars, quot), MultiPoly(F, self.nvars, rem)

    def coefficient_vector(self, monomials: Sequence[Exponent]) -> list[int]:
        return [self.terms.get(tuple(m), 0) for m in monomials]

    # -- text form --

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"X{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            cs = self.field.format(c)
            factors = [] if c == 1 and any(e) else [f"({cs})" if "+" in cs else cs]
            for n, k in zip(names, e):
                if k:
                    factors.append(n if k == 1 else f"{n}^{k}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"MultiPoly({self.format()})"


def parse_poly(text: str, field: GF, names: Sequence[str]) -> MultiPoly:
    """Parse ``"c*X1^a*X2^b + ..."``.

    Coefficients are integers (read as n*1) and may carry a leading minus;
    terms are joined by ``+`` or ``-``.
    """
    nv = len(names)
    index = {n: i for i, n in enumerate(names)}
    s = text.replace(" ", "")
    if not s:
        raise ValidationError("empty polynomial")
    # split on + and - while keeping signs
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ValidationError(f"cannot parse polynomial {text!r}")
    out = MultiPoly.zero(field, nv)
    for piece in pieces:
        sign = -1 if piece.startswith("-") else 1
        piece = piece.lstrip("+-")
        coeff = sign
        exp = [0] * nv
        for factor in piece.split("*"):
            if not factor:
                raise ValidationError(f"empty factor in {text!r}")
            base, _, power = factor.partition("^")
            try:
                k = int(power) if power else 1
            except ValueError as exc:
                raise ValidationError(f"bad exponent in {factor!r}") from exc
            if base in index:
                exp[index[base]] += k
            else:
                try:
                    coeff *= int(base) ** k
                except ValueError as exc:
                    raise ValidationError(f"unknown symbol {base!r} in {text!r}") from exc
        out = out + MultiPoly(field, nv, {tuple(exp): field.from_int(coeff)})
    return out


# --- symmetric polynomials -------------------------------------------------


def elementary_symmetric(m: int, i: int, field: GF) -> MultiPoly:
    """sigma_m^i: sum of all products of i distinct variables among m."""
    if not 1 <= m <= 3:
        raise MTooLarge(f"m={m} outside 1..3")
    if not 1 <= i <= m:
        raise IndexOutOfRange(f"i={i} outside 1..{m}")
    terms = {}
    for idx in itertools.combinations(range(m), i):
        terms[tuple(int(j in idx) for j in range(m))] = 1
    return MultiPoly(field, m, terms)


def phi_map(F: MultiPoly, m: int) -> MultiPoly:
    """G(X) = F(sigma^1(X), ..., sigma^m(X)); always symmetric."""
    if F.nvars != m:
        raise ArityMismatch(f"F has {F.nvars} variables, expected {m}")
    return F.compose([elementary_symmetric(m, i, F.field) for i in range(1, m + 1)])


def evaluate(f: MultiPoly, point) -> FieldElement:
    coords = point.coords if isinstance(point, PointTuple) else point
    return FieldElement(f.field, f.evaluate(coords))


@dataclass(frozen=True)
class PointTuple:
    field: GF
    coords: tuple[int, ...]

    def is_distinguished(self) -> bool:
        return len(set(self.coords)) == len(self.coords)

    def canonical(self) -> "PointTuple":
        return PointTuple(self.field, tuple(sorted(self.coords)))

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self) -> str:
        return "(" + ",".join(self.field.format(c) for c in self.coords) + ")"


def _check_m(field: GF, m: int) -> None:
    if m < 1:
        raise ValidationError("m must be positive")
    if m > field.q:
        raise MTooLarge(f"m={m} exceeds q={field.q}")


def distinguished_array(field: GF, m: int) -> np.ndarray:
    _check_m(field, m)
    return np.array(list(itertools.permutations(range(field.q), m)), dtype=np.int64).reshape(-1, m)


def representatives_array(field: GF, m: int) -> np.ndarray:
    _check_m(field, m)
    return np.array(list(itertools.combinations(range(field.q), m)), dtype=np.int64).reshape(-1, m)


def distinguished_points(field: GF, m: int) -> list[PointTuple]:
    """All q(q-1)...(q-m+1) points with pairwise distinct coordinates."""
    return [PointTuple(field, tuple(int(c) for c in row)) for row in distinguished_array(field, m)]


def representatives(field: GF, m: int) -> list[PointTuple]:
    """One ascending tuple per Sym_m-orbit, in lexicographic order."""
    return [PointTuple(field, tuple(int(c) for c in row)) for row in representatives_array(field, m)]


def quotient_map(point: PointTuple) -> PointTuple:
    F = point.field
    m = len(point.coords)
    return PointTuple(F, tuple(elementary_symmetric(m, i, F).evaluate(point.coords) for i in range(1, m + 1)))


def quotient_array(field: GF, points: np.ndarray) -> np.ndarray:
    """Vectorised quotient map on an (N, m) array."""
    m = points.shape[1]
    return np.stack([elementary_symmetric(m, i, field).evaluate_many(points) for i in range(1, m + 1)], axis=1)


# --- univariate helpers ------------------------------------------------------


def monic_from_roots(field: GF, roots: Sequence[int]) -> list[int]:
    """Coefficients (constant first) of prod (X - r)."""
    F = field
    poly = [1]
    for r in roots:
        r = _val(r)
        nxt = [0] * (len(poly) + 1)
        for k, c in enumerate(poly):
            nxt[k + 1] = F.add(nxt[k + 1], c)
            nxt[k] = F.sub(nxt[k], F.mul(c, r))
        poly = nxt
    return poly


def monic_from_sigma(field: GF, sigma: Sequence[int]) -> list[int]:
    """Y^m + sum (-1)^i sigma_i Y^(m-i), constant first."""
    m = len(sigma)
    coeffs = [0] * (m + 1)
    coeffs[m] = 1
    for i, s in enumerate(sigma, start=1):
        s = _val(s)
        coeffs[m - i] = s if i % 2 == 0 else field.neg(s)
    return coeffs


def _poly_eval(field: GF, coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc


def _synthetic_div(field: GF, coeffs: Sequence[int], r: int) -> list[int]:
    """Quotient of coeffs by (X - r), assuming r is a root."""
    n = len(coeffs) - 1
    out = [0] * n
    carry = 0
    for k in range(n, 0, -1):
        carry = field.add(field.mul(carry, r), coeffs[k])
        out[k - 1] = carry
    return out


def vieta_roots(field: GF, coeffs: Sequence) -> list[int] | None:
    """Roots with multiplicity of a monic polynomial, found by exhaustive
    evaluation over the field; None when it does not split."""
    coeffs = [_val(c) for c in coeffs]
    if not coeffs or coeffs[-1] != 1:
        raise NonMonic("leading coefficient must be 1")
    roots: list[int] = []
    poly = coeffs
    while len(poly) > 1:
        for x in field.elements():
            if _poly_eval(field, poly, x) == 0:
                roots.append(x)
                poly = _synthetic_div(field, poly, x)
                break
        else:
            return None
    return sorted(roots)


def _poly_gcd(field: GF, a: list[int], b: list[int]) -> list[int]:
    def trim(v):
        v = list(v)
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(a), trim(b)
    while b:
        inv = field.inv(b[-1])
        while len(a) >= len(b):
            c = field.mul(a[-1], inv)
            shift = len(a) - len(b)
            for i, bi in enumerate(b):
                a[shift + i] = field.sub(a[shift + i], field.mul(c, bi))
            a = trim(a)
        a, b = b, a
    return a


def has_repeated_root(field: GF, coeffs: Sequence[int]) -> bool:
    """gcd(f, f') non-constant, i.e. a repeated root in the splitting field."""
    coeffs = [_val(c) for c in coeffs]
    deriv = [field.mul(field.from_int(k), c) for k, c in enumerate(coeffs)][1:]
    return len(_poly_gcd(field, list(coeffs), deriv)) > 1


# --- discriminant varieties --------------------------------------------------


def discriminant_poly(m: int, field: GF) -> MultiPoly:
    """Defining polynomial of the discriminant variety in sigma-coordinates.

    m=2: y1^2 - 4 y2.
    m=3: y1^2 y2^2 - 4 y2^3 - 4 y1^3 y3 - 27 y3^2 + 18 y1 y2 y3, i.e. the
    discriminant of X^3 - y1 X^2 + y2 X - y3 (the constant-square term is in
    y3; the y2 variant does not cut out repeated roots).
    """
    if m == 2:
        if field.p == 2:
            raise BadCharacteristic("m=2 discriminant needs odd q")
        return parse_poly("X1^2 - 4*X2", field, ["X1", "X2"])
    if m == 3:
        if field.p <= 3:
            raise BadCharacteristic("m=3 discriminant needs p > 3")
        return parse_poly(
            "X1^2*X2^2 - 4*X2^3 - 4*X1^3*X3 - 27*X3^2 + 18*X1*X2*X3", field, ["X1", "X2", "X3"]
        )
    raise MTooLarge(f"discriminant only for m in (2, 3), got {m}")


def discriminant_membership(m: int, point) -> bool:
    coords = point.coords if isinstance(point, PointTuple) else tuple(point)
    field = point.field if isinstance(point, PointTuple) else None
    if field is None:
        raise ValidationError("discriminant_membership needs a PointTuple")
    if len(coords) != m:
        raise ArityMismatch(f"point has {len(coords)} coordinates, expected {m}")
    return discriminant_poly(m, field).evaluate(coords) == 0


def _det(field: GF, rows: list[list[int]]) -> int:
    """Determinant by Gaussian elimination over the field."""
    M = [list(r) for r in rows]
    n = len(M)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = field.neg(det)
        det = field.mul(det, M[col][col])
        inv = field.inv(M[col][col])
        for r in range(col + 1, n):
            if M[r][col]:
                f = field.mul(M[r][col], inv)
                M[r] = [field.sub(a, field.mul(f, b)) for a, b in zip(M[r], M[col])]
    return det


def sylvester_resultant(field: GF, f: Sequence[int], g: Sequence[int]) -> int:
    """Res(f, g) from the Sylvester matrix; coefficient lists constant first."""
    f = [_val(c) for c in f]
    g = [_val(c) for c in g]
    m, n = len(f) - 1, len(g) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(reversed(f)) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(reversed(g)) + [0] * (size - n - 1 - i))
    return _det(field, rows)


def sylvester_discriminant_zero(field: GF, sigma: Sequence[int]) -> bool:
    """Whether the cubic from sigma and its derivative share a root."""
    f = monic_from_sigma(field, sigma)
    deriv = [field.mul(field.from_int(k), c) for k, c in enumerate(f)][1:]
    return sylvester_resultant(field, f, deriv) == 0


def binomial(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0
