"""The parabola C: y1^2 - 4 y2 = 0 (projectively X^2 - 4YZ = 0) and counting
problems around it: point/line classification, external points, conic
determinants, the Segre bound and the census of conics whose off-C points
are all external.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TooLarge, ValidationError, ZeroConic, ZeroLine, BadCharacteristic
from .finite_field import GF
from .parallel import chunk_ranges, map_tasks
from .sym_poly import MultiPoly

# (X^2, Y^2, Z^2, XY, XZ, YZ)
CONIC_MONOMIALS: tuple[tuple[int, int, int], ...] = (
    (2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (1, 0, 1), (0, 1, 1),
)

ON, EXT, INT = 0, 1, 2
CENSUS_MAX_Q = 11


class PointClass(enum.Enum):
    ON_CONIC = ON
    EXTERNAL = EXT
    INTERNAL = INT


class LineClass(enum.Enum):
    TANGENT = 1
    SECANT = 2
    EXTERNAL_LINE = 0


class Mode(enum.Enum):
    AFFINE = "affine"
    PROJECTIVE = "projective"


def _require_odd(field: GF) -> None:
    if field.p == 2:  # pragma: no cover - GF rejects char 2 already
        raise BadCharacteristic("the parabola model needs odd q")


# --- projective points ---------------------------------------------------


def normalize(field: GF, pts) -> np.ndarray:
    """Scale rows of an (N, 3) array so the first nonzero entry is 1."""
    pts = np.asarray(pts, dtype=np.int64)
    lead = np.where(pts[:, 0] != 0, pts[:, 0], np.where(pts[:, 1] != 0, pts[:, 1], pts[:, 2]))
    if np.any(lead == 0):
        raise ValidationError("(0:0:0) is not a projective point")
    inv = field._inv[lead]
    return field.vmul(pts, inv[:, None]).astype(np.int64)


@dataclass(frozen=True)
class ProjPoint:
    coords: tuple[int, int, int]

    @classmethod
    def of(cls, field: GF, coords: Sequence[int]) -> "ProjPoint":
        return cls(tuple(int(c) for c in normalize(field, [coords])[0]))


def projective_points(field: GF) -> np.ndarray:
    """PG(2,q) as a (q^2+q+1, 3) array in lexicographic order."""
    q = field.q
    r = np.arange(q)
    pts = [np.array([[0, 0, 1]])]
    pts.append(np.stack([np.zeros(q, int), np.ones(q, int), r], axis=1))
    yy, zz = np.meshgrid(r, r, indexing="ij")
    pts.append(np.stack([np.ones(q * q, int), yy.ravel(), zz.ravel()], axis=1))
    return np.concatenate(pts).astype(np.int64)


def point_rank(field: GF, pts: np.ndarray) -> np.ndarray:
    """Index of normalized points in :func:`projective_points` order."""
    q = field.q
    pts = np.asarray(pts, dtype=np.int64)
    return np.where(
        pts[:, 0] == 1, 1 + q + pts[:, 1] * q + pts[:, 2],
        np.where(pts[:, 1] == 1, 1 + pts[:, 2], 0),
    )


def affine_points(field: GF) -> np.ndarray:
    r = np.arange(field.q)
    xx, yy = np.meshgrid(r, r, indexing="ij")
    return np.stack([xx.ravel(), yy.ravel()], axis=1).astype(np.int64)


def lines(field: GF) -> np.ndarray:
    """Lines aX+bY+cZ of PG(2,q) as normalized coefficient triples."""
    return projective_points(field)


def points_on_line(field: GF, line: Sequence[int]) -> np.ndarray:
    P = projective_points(field)
    a, b, c = (int(x) for x in line)
    val = field.vadd(field.vadd(field.vmul(P[:, 0], a), field.vmul(P[:, 1], b)), field.vmul(P[:, 2], c))
    return P[val == 0]


def cross(field: GF, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-wise cross product over the field: line through two points, or
    meet of two lines."""
    F = field
    u = np.asarray(u)
    v = np.asarray(v)

    def m(a, b):
        return F.vmul(a, b)

    x = F.vsub(m(u[..., 1], v[..., 2]), m(u[..., 2], v[..., 1]))
    y = F.vsub(m(u[..., 2], v[..., 0]), m(u[..., 0], v[..., 2]))
    z = F.vsub(m(u[..., 0], v[..., 1]), m(u[..., 1], v[..., 0]))
    return np.stack([x, y, z], axis=-1).astype(np.int64)


def det3(field: GF, a, b, c) -> np.ndarray:
    """Row-wise determinant of stacked 3x3 matrices with rows a, b, c."""
    F = field
    n = cross(field, b, c)
    return F.vadd(F.vadd(F.vmul(a[..., 0], n[..., 0]), F.vmul(a[..., 1], n[..., 1])), F.vmul(a[..., 2], n[..., 2]))


# --- classification -----------------------------------------------------


def parabola_form(field: GF, pts) -> np.ndarray:
    """X^2 - 4YZ on an (N, 3) array."""
    F = field
    pts = np.asarray(pts, dtype=np.int64)
    four = F.from_int(4)
    return F.vsub(F.vmul(pts[:, 0], pts[:, 0]), F.vmul(four, F.vmul(pts[:, 1], pts[:, 2])))


def classify_projective(field: GF, pts) -> np.ndarray:
    """Class codes ON/EXT/INT for an (N, 3) array of projective points.

    X^2 - 4YZ scales by squares, so its quadratic character is well defined;
    nonzero squares are the external points.
    """
    _require_odd(field)
    v = parabola_form(field, pts)
    out = np.where(field.vis_square(v), EXT, INT)
    out[v == 0] = ON
    return out


def classify_point_parabola(field: GF, point: Sequence[int]) -> PointClass:
    eta1, eta2 = (int(c) for c in point)
    return PointClass(int(classify_projective(field, [[eta1, eta2, 1]])[0]))


def classify_line(field: GF, line: Sequence[int]) -> LineClass:
    """Tangent/secant/external by counting points of the line on X^2 = 4YZ."""
    if not any(int(c) for c in line):
        raise ZeroLine("the zero form is not a line")
    pts = points_on_line(field, line)
    hits = int(np.count_nonzero(parabola_form(field, pts) == 0))
    return LineClass(hits)


def tangent_lines(field: GF) -> np.ndarray:
    L = lines(field)
    return L[[classify_line(field, l) is LineClass.TANGENT for l in L]]


def tangents_through(field: GF, pts) -> np.ndarray:
    """Number of tangent lines of C through each point (oracle for classes)."""
    T = tangent_lines(field)
    pts = np.asarray(pts, dtype=np.int64)
    inc = field.matmul(pts, T.T)
    return np.count_nonzero(inc == 0, axis=1)


def external_set(field: GF, mode: Mode | str = Mode.AFFINE) -> np.ndarray:
    """External points of C, lexicographically ordered.

    AFFINE gives an (N, 2) array of (eta1, eta2), PROJECTIVE an (N, 3) array.
    """
    mode = Mode(mode)
    if mode is Mode.AFFINE:
        A = affine_points(field)
        cls = classify_projective(field, np.column_stack([A, np.ones(len(A), int)]))
        return A[cls == EXT]
    P = projective_points(field)
    return P[classify_projective(field, P) == EXT]


def _as_poly(curve) -> MultiPoly:
    return curve.poly if isinstance(curve, PlaneCurve) else curve


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Homogeneous polynomial in X, Y, Z."""

    poly: MultiPoly

    def __post_init__(self):
        if self.poly.nvars != 3:
            raise ValidationError("plane curves need 3 homogeneous variables")
        if self.poly.is_zero():
            raise ValidationError("the zero polynomial is not a curve")
        if not self.poly.is_homogeneous():
            raise ValidationError("plane curve polynomial must be homogeneous")

    @property
    def degree(self) -> int:
        return self.poly.degree()

    @property
    def field(self) -> GF:
        return self.poly.field


def curve_external_count(field: GF, curve, mode: Mode | str = Mode.PROJECTIVE) -> int:
    poly = _as_poly(curve)
    mode = Mode(mode)
    pts = external_set(field, mode)
    if mode is Mode.AFFINE:
        if poly.nvars == 3:
            pts = np.column_stack([pts, np.ones(len(pts), int)])
    return int(np.count_nonzero(poly.evaluate_many(pts) == 0))


def projective_point_count(field: GF, curve) -> int:
    poly = _as_poly(curve)
    return int(np.count_nonzero(poly.evaluate_many(projective_points(field)) == 0))


# --- conics --------------------------------------------------------------


def conic_poly(field: GF, coeffs: Sequence[int]) -> MultiPoly:
    return MultiPoly(field, 3, {m: int(c) for m, c in zip(CONIC_MONOMIALS, coeffs)})


def conic_coeffs(poly: MultiPoly) -> tuple[int, ...]:
    if poly.nvars != 3 or not poly.is_homogeneous() or poly.degree() not in (2, -1):
        raise ValidationError("not a homogeneous quadratic form in X, Y, Z")
    return tuple(poly.coefficient_vector(CONIC_MONOMIALS))


def conic_det_many(field: GF, C) -> np.ndarray:
    """Determinant of the symmetric matrix [[a, d/2, e/2], [d/2, b, f/2],
    [e/2, f/2, c]] for each row (a, b, c, d, e, f)."""
    F = field
    C = np.asarray(C, dtype=np.int64)
    a, b, c, d, e, f = (C[..., i] for i in range(6))
    mul = F.vmul
    inv4 = F.inv(F.from_int(4))
    first = mul(mul(a, b), c)
    second = mul(inv4, mul(mul(d, e), f))
    third = F.vadd(F.vadd(mul(a, mul(f, f)), mul(b, mul(e, e))), mul(c, mul(d, d)))
    return F.vsub(F.vadd(first, second), mul(inv4, third))


def conic_determinant(field: GF, coeffs) -> int:
    if isinstance(coeffs, MultiPoly):
        coeffs = conic_coeffs(coeffs)
    if not any(int(c) for c in coeffs):
        raise ZeroConic("the zero form is not a conic")
    return int(conic_det_many(field, [list(coeffs)])[0])


def is_irreducible_conic(field: GF, coeffs) -> bool:
    return conic_determinant(field, coeffs) != 0


def parabola_coeffs(field: GF) -> tuple[int, ...]:
    """X^2 - 4YZ."""
    return (1, 0, 0, 0, 0, field.neg(field.from_int(4)))


def canonical_conic(field: GF, coeffs: Sequence[int]) -> tuple[int, ...]:
    lead = next(int(c) for c in coeffs if int(c))
    inv = field.inv(lead)
    return tuple(field.mul(int(c), inv) for c in coeffs)


def line_product(field: GF, l1: Sequence[int], l2: Sequence[int]) -> tuple[int, ...]:
    """Conic coefficients of the product of two linear forms."""
    F = field
    a1, b1, c1 = (int(x) for x in l1)
    a2, b2, c2 = (int(x) for x in l2)
    return (
        F.mul(a1, a2), F.mul(b1, b2), F.mul(c1, c2),
        F.add(F.mul(a1, b2), F.mul(b1, a2)),
        F.add(F.mul(a1, c2), F.mul(c1, a2)),
        F.add(F.mul(b1, c2), F.mul(c1, b2)),
    )


# --- Segre bound and line splitting -------------------------------------


def segre_bound(u: int, q: int, splits_into_lines: bool) -> int:
    if u < 1:
        raise ValidationError("degree must be >= 1")
    if splits_into_lines:
        return u * q + 1
    return (u - 1) * q + u // 2 + 1


def rational_line_factors(field: GF, curve) -> tuple[list[tuple[int, ...]], MultiPoly]:
    """Peel off GF(q)-rational line components.

    A line carrying more than deg(F) points of F is a component (Bezout);
    this test is exact while deg(F) < q + 1.  Returns the lines found (with
    multiplicity) and the remaining cofactor.
    """
    poly = _as_poly(curve)
    found: list[tuple[int, ...]] = []
    L = lines(field)
    P = projective_points(field)
    while poly.degree() >= 1:
        if poly.degree() >= field.q + 1:
            raise ValidationError("line test needs degree <= q")
        zero = poly.evaluate_many(P) == 0
        inc = field.matmul(L, P[zero].T) == 0 if zero.any() else np.zeros((len(L), 0), bool)
        hits = inc.sum(axis=1)
        cand = np.flatnonzero(hits > poly.degree())
        if len(cand) == 0:
            break
        line = tuple(int(c) for c in L[cand[0]])
        quot, rem = poly.divmod(MultiPoly.linear(field, line))
        if not rem.is_zero():  # pragma: no cover - excluded by the Bezout test
            raise AssertionError("line with > deg points does not divide")
        found.append(line)
        poly = quot
    return found, poly


def splits_into_lines(field: GF, curve) -> bool:
    _, rest = rational_line_factors(field, curve)
    return rest.degree() == 0


# --- conic census ---------------------------------------------------------


def all_conics(field: GF) -> np.ndarray:
    """Every conic up to scalar: first nonzero coefficient equal to 1."""
    q = field.q
    blocks = []
    for lead in range(6):
        free = 5 - lead
        tail = np.array(np.unravel_index(np.arange(q**free), (q,) * free)).T if free else np.zeros((1, 0), int)
        block = np.zeros((len(tail), 6), dtype=np.int64)
        block[:, lead] = 1
        block[:, lead + 1:] = tail
        blocks.append(block)
    return np.concatenate(blocks)


def _conic_monomial_matrix(field: GF, pts: np.ndarray) -> np.ndarray:
    F = field
    X, Y, Z = pts[:, 0], pts[:, 1], pts[:, 2]
    return np.stack([F.vmul(X, X), F.vmul(Y, Y), F.vmul(Z, Z), F.vmul(X, Y), F.vmul(X, Z), F.vmul(Y, Z)]).astype(np.int64)


def _census_chunk(field: GF, lo: int, hi: int) -> dict[str, np.ndarray]:
    C = all_conics(field)[lo:hi]
    P = projective_points(field)
    cls = classify_projective(field, P)
    vals = field.matmul(C, _conic_monomial_matrix(field, P))
    on = vals == 0
    return {
        "det": np.asarray(conic_det_many(field, C)),
        "points": on.sum(axis=1),
        "on_c": (on & (cls == ON)).sum(axis=1),
        "ext": (on & (cls == EXT)).sum(axis=1),
        "int": (on & (cls == INT)).sum(axis=1),
    }


@dataclass
class ConicCensus:
    """Per-conic incidence counts with C, for every conic of PG(2,q)."""

    field: GF
    conics: np.ndarray
    det: np.ndarray
    points: np.ndarray
    on_c: np.ndarray
    ext: np.ndarray
    int_: np.ndarray

    @property
    def irreducible(self) -> np.ndarray:
        return self.det != 0

    @property
    def is_parabola(self) -> np.ndarray:
        target = np.array(canonical_conic(self.field, parabola_coeffs(self.field)))
        return np.all(self.conics == target, axis=1)

    @property
    def special(self) -> np.ndarray:
        """Irreducible D != C whose points off C are all external."""
        return self.irreducible & ~self.is_parabola & (self.int_ == 0)

    @property
    def other(self) -> np.ndarray:
        """Irreducible conics with some internal point (outside the census)."""
        return self.irreducible & ~self.is_parabola & (self.int_ > 0)


def conic_census(field: GF, threads: int = 1, chunk: int = 20000) -> ConicCensus:
    _require_odd(field)
    if field.q > CENSUS_MAX_Q:
        work = (field.q**6 // (field.q - 1)) * (field.q**2 + field.q + 1)
        raise TooLarge(f"conic census over GF({field.q}) needs ~{work} point tests", work)
    conics = all_conics(field)
    tasks = [(field, lo, hi) for lo, hi in chunk_ranges(len(conics), chunk)]
    parts = map_tasks(_census_chunk, tasks, threads)
    cat = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    return ConicCensus(field, conics, cat["det"], cat["points"], cat["on_c"], cat["ext"], cat["int"])


def census_formula(q: int) -> int:
    return (q**3 - q**2 - 3 * q - 3) // 2


def census_family_formula(q: int) -> int:
    """Size of the pencil families C + t*l^2 that are all-external off C:
    (q-1)/2 per tangent, (q-3)/2 per secant, (q-1)/2 per external line."""
    return (q**3 - q**2 - q - 1) // 2


def census_family_members(census: ConicCensus) -> np.ndarray:
    """Census conics meeting C in at most two points (the pencil members)."""
    return census.special & (census.on_c <= 2)


def census_special_conics(field: GF, threads: int = 1) -> int:
    census = conic_census(field, threads)
    return int(np.count_nonzero(census.special))


def table1_maximum(field: GF, threads: int = 1) -> int:
    census = conic_census(field, threads)
    other = census.other
    return int(census.ext[other].max()) if other.any() else 0


def hasse_weil_window(q: int) -> tuple[float, float]:
    half = (q - 1) / 2
    return half - (math.sqrt(q) + 3), half + (math.sqrt(q) + 3)


def hasse_weil_violations(census: ConicCensus) -> np.ndarray:
    """Conics outside the census families whose external count leaves the
    window; expected empty."""
    lo, hi = hasse_weil_window(census.field.q)
    other = census.other
    bad = other & ((census.ext < lo) | (census.ext > hi))
    return census.conics[bad]


# --- reducible conics ------------------------------------------------------


def reducible_conic_cases(field: GF) -> dict[str, set[int]]:
    """Projective |E_C ∩ D| for every D = l1*l2 over GF(q), grouped by the
    line classes and the class of the meeting point."""
    L = lines(field)
    names = {LineClass.TANGENT: "tangent", LineClass.SECANT: "secant", LineClass.EXTERNAL_LINE: "external"}
    kinds = [classify_line(field, l) for l in L]
    cases: dict[str, set[int]] = defaultdict(set)
    for i in range(len(L)):
        for j in range(i, len(L)):
            D = line_product(field, L[i], L[j])
            count = curve_external_count(field, conic_poly(field, D), Mode.PROJECTIVE)
            pair = sorted([names[kinds[i]], names[kinds[j]]])
            if i == j:
                label = f"double {pair[0]}"
            else:
                meet = cross(field, L[i][None, :], L[j][None, :])
                where = PointClass(int(classify_projective(field, normalize(field, meet))[0])).name.lower()
                label = f"{pair[0]}+{pair[1]} meeting {where}"
            cases[label].add(count)
    return dict(cases)
