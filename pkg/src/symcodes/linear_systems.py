"""Evaluation bases: full degree-<=u systems, the type-1 conic net through a
Frobenius triangle, the type-2 conic system, the cubic system and the
parabola substitution y -> (x^2 - t^2)/4.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateTriangle,
    IndexOutOfRange,
    NotInLambda,
    SIsSquare,
    ValidationError,
)
from .finite_field import GF, Tower, field_of_order, make_tower
from .plane_geometry import (
    CONIC_MONOMIALS,
    PointClass,
    classify_point_parabola,
    conic_det_many,
    conic_poly,
    cross,
    det3,
    normalize,
    projective_points,
)
from .sym_poly import MultiPoly

CUBIC_MONOMIALS: tuple[tuple[int, int, int], ...] = tuple(
    (a, b, 3 - a - b) for a in range(3, -1, -1) for b in range(3 - a, -1, -1)
)


class SystemKind(enum.Enum):
    FULL_U = "full"
    TYPE1_CONIC = "type1"
    TYPE2_CONIC = "type2"
    CUBIC_T1 = "cubic"


# --- Frobenius helpers ---------------------------------------------------


def frob_points(tower: Tower, pts: np.ndarray, times: int = 1) -> np.ndarray:
    return tower.frobenius(np.asarray(pts, dtype=np.int64), times)


def relative_trace(tower: Tower, x: np.ndarray) -> np.ndarray:
    """Tr_{q^r/q}(x), still as ext-field integers."""
    ext = tower.ext
    acc = np.asarray(x, dtype=np.int64)
    y = acc
    for _ in range(tower.degree - 1):
        y = tower.frob_table[y]
        acc = ext.vadd(acc, y)
    return acc


def lambda_basis(tower: Tower) -> list[int]:
    """{1, w, w^2, ...}: a GF(q)-basis of the extension, w primitive."""
    w = tower.ext.primitive_element()
    return [tower.ext.pow(w, i) for i in range(tower.degree)]


def lambda_mask(tower: Tower, pts: np.ndarray) -> np.ndarray:
    """Vectorized Lambda membership for normalized points over GF(q^3)."""
    if tower.degree != 3:
        raise ValidationError("Lambda is defined for the cubic extension")
    pts = np.asarray(pts, dtype=np.int64)
    d = det3(tower.ext, pts, frob_points(tower, pts), frob_points(tower, pts, 2))
    # a non-zero determinant already forces P^q != P
    return d != 0


def lambda_membership(tower: Tower, P: Sequence[int]) -> bool:
    return bool(lambda_mask(tower, np.asarray([list(P)]))[0])


def lambda_points(tower: Tower) -> np.ndarray:
    pts = projective_points(tower.ext)
    return pts[lambda_mask(tower, pts)]


@dataclass(frozen=True)
class FrobeniusTriangle:
    tower: Tower
    P: tuple[int, int, int]
    P1: tuple[int, int, int]
    P2: tuple[int, int, int]
    l1: tuple[int, int, int]
    l2: tuple[int, int, int]
    l3: tuple[int, int, int]

    @classmethod
    def from_point(cls, tower: Tower, P: Sequence[int]) -> "FrobeniusTriangle":
        P = normalize(tower.ext, [list(P)])
        if not lambda_mask(tower, P)[0]:
            raise NotInLambda(f"P={tuple(int(c) for c in P[0])} is not in Lambda")
        P1 = frob_points(tower, P)
        P2 = frob_points(tower, P, 2)
        l1 = cross(tower.ext, P, P1)
        l2 = frob_points(tower, l1)
        l3 = frob_points(tower, l2)
        t = lambda a: tuple(int(c) for c in a[0])
        return cls(tower, t(P), t(P1), t(P2), t(l1), t(l2), t(l3))

    @property
    def vertices(self) -> tuple[tuple[int, int, int], ...]:
        return (self.P, self.P1, self.P2)

    @property
    def sides(self) -> tuple[tuple[int, int, int], ...]:
        return (self.l1, self.l2, self.l3)


# --- system descriptor ---------------------------------------------------


@dataclass
class SystemDescriptor:
    kind: SystemKind
    field: GF
    params: dict
    basis: list[MultiPoly]
    triangle: FrobeniusTriangle | None = dc_field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def affine_basis(self) -> list[MultiPoly]:
        """Basis as polynomials in (x, y); projective members are set to z=1."""
        if self.kind is SystemKind.FULL_U:
            return list(self.basis)
        return [f.dehomogenize() for f in self.basis]

    def text(self) -> str:
        q = self.field.q
        if self.kind is SystemKind.FULL_U:
            return f"full:q={q};u={self.params['u']}"
        if self.kind is SystemKind.TYPE1_CONIC:
            return f"type1:q={q};P=({','.join(str(c) for c in self.params['P'])})"
        if self.kind is SystemKind.TYPE2_CONIC:
            return f"type2:q={q};s={self.params['s']}"
        return f"cubic:q={q};k={self.params['k']}"

    def rank(self) -> int:
        return basis_rank(self.field, self.basis)

    def is_rational(self) -> bool:
        return all(0 <= c < self.field.q for f in self.basis for c in f.terms.values())


def basis_rank(field: GF, basis: Sequence[MultiPoly]) -> int:
    from .code_engine import row_reduce

    monos = sorted({m for f in basis for m in f.terms})
    if not monos:
        return 0
    M = np.array([f.coefficient_vector(monos) for f in basis], dtype=np.int64)
    return len(row_reduce(field, M)[1])


def _check_system(desc: SystemDescriptor) -> SystemDescriptor:
    if desc.rank() != desc.dimension:
        raise ValidationError(f"{desc.text()}: basis is linearly dependent")
    return desc


def full_degree_system(field: GF, u: int) -> SystemDescriptor:
    """Monomials x^a y^b with a+b <= u, ordered by degree then by falling a."""
    if u < 1:
        raise ValidationError("--u must be >= 1")
    basis = [
        MultiPoly(field, 2, {(a, d - a): 1})
        for d in range(u + 1) for a in range(d, -1, -1)
    ]
    return SystemDescriptor(SystemKind.FULL_U, field, {"u": u}, basis)


# --- type-1 conic nets ----------------------------------------------------


def _line_products(ext: GF, l1: np.ndarray, l2: np.ndarray) -> np.ndarray:
    """Coefficients (N, 6) of the conic l1*l2 for stacked lines."""
    m = ext.vmul
    a1, b1, c1 = l1[:, 0], l1[:, 1], l1[:, 2]
    a2, b2, c2 = l2[:, 0], l2[:, 1], l2[:, 2]
    return np.stack([
        m(a1, a2), m(b1, b2), m(c1, c2),
        ext.vadd(m(a1, b2), m(b1, a2)),
        ext.vadd(m(a1, c2), m(c1, a2)),
        ext.vadd(m(b1, c2), m(c1, b2)),
    ], axis=1)


def type1_net_coeffs(tower: Tower, pts: np.ndarray) -> np.ndarray:
    """Base-field conic coefficients (N, 3, 6) of the nets through the
    Frobenius triangles of the (Lambda) points ``pts``.

    Member j is Tr(lambda_j * l1 l2) with lambda_j = w^j, which expands to
    lambda l1 l2 + lambda^q l2 l3 + lambda^{q^2} l3 l1.
    """
    ext = tower.ext
    pts = np.asarray(pts, dtype=np.int64)
    l1 = cross(ext, pts, frob_points(tower, pts))
    l2 = frob_points(tower, l1)
    prod = _line_products(ext, l1, l2)
    out = np.empty((len(pts), 3, 6), dtype=np.int64)
    for j, lam in enumerate(lambda_basis(tower)):
        out[:, j, :] = tower.restrict(relative_trace(tower, ext.vmul(prod, lam)))
    return out


def build_type1_net(tower: Tower, P: Sequence[int]) -> SystemDescriptor:
    tri = FrobeniusTriangle.from_point(tower, P)
    coeffs = type1_net_coeffs(tower, np.asarray([tri.P]))[0]
    basis = [conic_poly(tower.base, row) for row in coeffs]
    desc = SystemDescriptor(SystemKind.TYPE1_CONIC, tower.base, {"P": tri.P}, basis, tri)
    return _check_system(desc)


def projective_combinations(field: GF, k: int) -> np.ndarray:
    """One coefficient vector per point of PG(k-1, q), first nonzero = 1."""
    q = field.q
    rows = []
    for j in range(k):
        rest = k - 1 - j
        tail = np.array(np.unravel_index(np.arange(q ** rest), (q,) * rest)).T if rest else np.zeros((1, 0), int)
        head = np.zeros((len(tail), j + 1), dtype=np.int64)
        head[:, j] = 1
        rows.append(np.concatenate([head, tail.reshape(len(tail), rest)], axis=1))
    return np.concatenate(rows).astype(np.int64)


def combine(field: GF, coeffs: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """coeffs (..., k) times basis (k, m) -> (..., m) over the field."""
    return field.matmul(coeffs, basis)


def net_members(tower: Tower, P: Sequence[int]) -> np.ndarray:
    """All q^2+q+1 member conics of the type-1 net, one per projective class."""
    desc = build_type1_net(tower, P)
    B = np.array([f.coefficient_vector(CONIC_MONOMIALS) for f in desc.basis], dtype=np.int64)
    return combine(tower.base, projective_combinations(tower.base, 3), B)


def net_is_irreducible(tower: Tower, P: Sequence[int]) -> bool:
    return bool(np.all(conic_det_many(tower.base, net_members(tower, P)) != 0))


# --- type-2 conic system --------------------------------------------------


def smallest_nonsquare(field: GF) -> int:
    return next(a for a in range(1, field.q) if not field.is_square(a))


def type2_basis_coeffs(field: GF, s: int) -> np.ndarray:
    """alpha(x^2 - s y^2) + 2 beta xz + 2 gamma yz + s(alpha s^2 + 2 gamma) z^2,
    split along the unit vectors in (alpha, beta, gamma)."""
    F = field
    two = F.from_int(2)
    s3 = F.pow(s, 3)
    return np.array([
        [1, F.neg(s), s3, 0, 0, 0],
        [0, 0, 0, 0, two, 0],
        [0, 0, F.mul(s, two), 0, 0, two],
    ], dtype=np.int64)


def build_type2_system(field: GF, s: int | None = None) -> SystemDescriptor:
    if field.p == 2:
        raise ValidationError("type-2 systems need odd q")
    if s is None:
        s = smallest_nonsquare(field)
    if not 0 < s < field.q:
        raise IndexOutOfRange(f"--s must be a nonzero element of GF({field.q})")
    if field.is_square(s):
        raise SIsSquare(f"s={s} is a square in GF({field.q})")
    tower = make_tower(field, 2)
    ext = tower.ext
    i = ext.sqrt(tower.embed(s))
    one = 1
    P = (i, one, 0)
    P1 = (ext.neg(i), one, 0)
    P2 = (0, field.neg(s), 1)
    basis = [conic_poly(field, row) for row in type2_basis_coeffs(field, s)]
    params = {"s": s, "i": i, "P": P, "P1": P1, "P2": P2}
    desc = SystemDescriptor(SystemKind.TYPE2_CONIC, field, params, basis)
    if classify_point_parabola(field, P2[:2]) is not PointClass.INTERNAL:  # pragma: no cover
        raise AssertionError("(0:-s:1) should be internal to C")
    return _check_system(desc)


def type2_determinant(field: GF, s: int, alpha: int, beta: int, gamma: int) -> int:
    """-alpha (alpha s^2 + beta i + gamma)(alpha s^2 - beta i + gamma), i^2 = s."""
    tower = make_tower(field, 2)
    ext = tower.ext
    e = tower.embed
    i = ext.sqrt(e(s))
    base = ext.add(ext.mul(e(alpha), ext.mul(e(s), e(s))), e(gamma))
    bi = ext.mul(e(beta), i)
    val = ext.mul(ext.neg(e(alpha)), ext.mul(ext.add(base, bi), ext.sub(base, bi)))
    return tower.restrict(val)


# --- cubic system --------------------------------------------------------


def _linear_ext(tower: Tower, line: Sequence[int]) -> MultiPoly:
    return MultiPoly.linear(tower.ext, [int(c) for c in line])


def cubic_triangle_lines(tower: Tower, k: int, w: int | None = None) -> np.ndarray:
    ext = tower.ext
    if w is None:
        w = ext.primitive_element()
    q = tower.base.q
    w1 = ext.pow(w, q - 1)
    l1 = np.array([[ext.pow(w1, k), w1, 1]], dtype=np.int64)
    return np.concatenate([l1, frob_points(tower, l1), frob_points(tower, l1, 2)])


def build_cubic_system(tower: Tower, k: int, w: int | None = None) -> SystemDescriptor:
    q = tower.base.q
    if tower.degree != 3:
        raise ValidationError("cubic systems live over the cubic extension")
    if not 1 <= k <= q * q + q:
        raise IndexOutOfRange(f"--k must lie in 1..{q * q + q}")
    ext = tower.ext
    if w is None:
        w = ext.primitive_element()
    elif ext.order(w) != ext.q - 1:
        raise ValidationError("w must be a primitive element of GF(q^3)")
    L = cubic_triangle_lines(tower, k, w)
    if int(det3(ext, L[0:1], L[1:2], L[2:3])[0]) == 0:
        raise DegenerateTriangle(f"k={k}: the lines l1, l1^q, l1^q^2 are concurrent or equal")
    l1, l2, l3 = (_linear_ext(tower, r) for r in L)
    base_terms = l1 * l2 * l2
    restrict = lambda f: f.map_coeffs(lambda c: tower.restrict(c), tower.base)
    basis = []
    for lam in lambda_basis(tower):
        term = base_terms.scale(lam)
        total = term + term.map_coeffs(tower.frobenius) + term.map_coeffs(lambda c: tower.frobenius(c, 2))
        basis.append(restrict(total))
    basis.append(restrict(l1 * l2 * l3))
    P1 = cross(ext, L[0:1], L[1:2])[0]
    P2 = cross(ext, L[1:2], L[2:3])[0]
    P = cross(ext, L[2:3], L[0:1])[0]
    tri = FrobeniusTriangle(
        tower, tuple(int(c) for c in P), tuple(int(c) for c in P1), tuple(int(c) for c in P2),
        tuple(int(c) for c in L[0]), tuple(int(c) for c in L[1]), tuple(int(c) for c in L[2]),
    )
    desc = SystemDescriptor(SystemKind.CUBIC_T1, tower.base, {"k": k, "w": w}, basis, tri)
    return _check_system(desc)


def admissible_k(tower: Tower, w: int | None = None) -> list[int]:
    q = tower.base.q
    out = []
    for k in range(1, q * q + q + 1):
        L = cubic_triangle_lines(tower, k, w)
        if int(det3(tower.ext, L[0:1], L[1:2], L[2:3])[0]) != 0:
            out.append(k)
    return out


# --- parabola substitution ------------------------------------------------


def parabola_substitution(curve: MultiPoly) -> MultiPoly:
    """f(x, t) = curve(x, (x^2 - t^2)/4) for an affine curve in (x, y)."""
    if curve.nvars != 2:
        raise ValidationError("expected an affine polynomial in (x, y)")
    F = curve.field
    if F.p == 2:
        raise ValidationError("the substitution needs odd q")
    x = MultiPoly.var(F, 2, 0)
    t = MultiPoly.var(F, 2, 1)
    y = (x * x - t * t).scale(F.inv(F.from_int(4)))
    return curve.compose([x, y])


def substituted_zero_count(curve: MultiPoly) -> int:
    """|{(xi, tau): f(xi, tau) = 0, tau != 0}|."""
    from .plane_geometry import affine_points

    f = parabola_substitution(curve)
    pts = affine_points(curve.field)
    pts = pts[pts[:, 1] != 0]
    return int(np.count_nonzero(f.evaluate_many(pts) == 0))


# --- descriptor text form -------------------------------------------------

_DESC_RE = re.compile(r"^(full|type1|type2|cubic):(.*)$")


def parse_descriptor(text: str, field: GF | None = None) -> SystemDescriptor:
    """Inverse of :meth:`SystemDescriptor.text`.

    ``P`` coordinates are GF(q^3) elements in integer encoding.
    """
    m = _DESC_RE.match(text.strip())
    if not m:
        raise ValidationError(f"--descriptor: cannot parse {text!r}")
    kind, rest = m.groups()
    params: dict[str, str] = {}
    for part in filter(None, rest.split(";")):
        if "=" not in part:
            raise ValidationError(f"--descriptor: bad field {part!r}")
        key, val = part.split("=", 1)
        params[key.strip()] = val.strip()
    if "q" not in params:
        raise ValidationError("--descriptor: missing q")
    try:
        q = int(params["q"])
    except ValueError:
        raise ValidationError("--descriptor: q must be an integer") from None
    F = field if field is not None and field.q == q else field_of_order(q)

    def ival(key: str) -> int:
        if key not in params:
            raise ValidationError(f"--descriptor: missing {key}")
        try:
            return int(params[key])
        except ValueError:
            raise ValidationError(f"--descriptor: {key} must be an integer") from None

    if kind == "full":
        return full_degree_system(F, ival("u"))
    if kind == "type2":
        return build_type2_system(F, ival("s") if "s" in params else None)
    tower = make_tower(F, 3)
    if kind == "cubic":
        w = ival("w") if "w" in params else None
        return build_cubic_system(tower, ival("k"), w)
    raw = params.get("P", "").strip("()")
    try:
        P = [int(c) for c in raw.split(",")]
    except ValueError:
        raise ValidationError("--descriptor: P must be three integers") from None
    if len(P) != 3 or any(not 0 <= c < tower.ext.q for c in P):
        raise ValidationError(f"--descriptor: P must be three elements of GF({tower.ext.q})")
    return build_type1_net(tower, P)
