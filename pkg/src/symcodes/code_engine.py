"""Evaluation codes: generator matrices, ranks, weight distributions, the
closed-form parameters of the symmetric-polynomial codes and the
minimum-distance bounds.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArityMismatch, EmptyPointSet, MTooLarge, TooLarge, ValidationError
from .finite_field import GF
from .linear_systems import SystemDescriptor
from .parallel import chunk_ranges, map_tasks
from .plane_geometry import Mode, external_set
from .sym_poly import (
    MultiPoly,
    binomial,
    distinguished_array,
    elementary_symmetric,
    representatives_array,
)

MAX_CODEWORDS = 10**8
_CHUNK = 1 << 15


class CodeKind(enum.Enum):
    DJ = "dj"
    DJ_REDUCED = "dj_reduced"
    GRM = "grm"


class BoundKind(enum.Enum):
    THEOREM1 = "theorem1"
    GENERIC_U = "generic_u"
    SEGRE_DERIVED = "segre_derived"


# --- linear algebra -------------------------------------------------------


def row_reduce(field: GF, M) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the field; returns (R, pivot columns)."""
    F = field
    R = np.array(M, dtype=np.int64, copy=True)
    if R.ndim != 2:
        raise ValidationError("expected a matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(R[r:, c])
        if not len(nz):
            continue
        piv = r + int(nz[0])
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        R[r] = F.vmul(R[r], F.inv(int(R[r, c])))
        for i in range(rows):
            if i != r and R[i, c]:
                R[i] = F.vsub(R[i], F.vmul(R[r], int(R[i, c])))
        pivots.append(c)
        r += 1
    return R[:r], pivots


def rank(field: GF, M) -> int:
    return len(row_reduce(field, M)[1])


# --- codes ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvalCode:
    field: GF
    points: np.ndarray
    basis: tuple[MultiPoly, ...]
    gen_matrix: np.ndarray
    K: int

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def q(self) -> int:
        return self.field.q

    def reduced_generator(self) -> np.ndarray:
        return row_reduce(self.field, self.gen_matrix)[0]

    def is_nondegenerate(self) -> bool:
        return bool(np.all(np.any(self.gen_matrix != 0, axis=0)))

    def params(self) -> tuple[int, int, int]:
        return (self.n, self.K, minimum_distance(self))


def build_code(field: GF, points, basis: Sequence[MultiPoly]) -> EvalCode:
    pts = np.asarray(points, dtype=np.int64)
    if pts.size == 0:
        raise EmptyPointSet("no evaluation points")
    if pts.ndim == 1:
        pts = pts[:, None]
    if not basis:
        raise ValidationError("empty basis")
    for f in basis:
        if f.nvars != pts.shape[1]:
            raise ArityMismatch(f"basis polynomial in {f.nvars} variables, points of arity {pts.shape[1]}")
        if f.field != field:
            raise ValidationError("basis polynomial over a different field")
    G = np.stack([f.evaluate_many(pts) for f in basis]).astype(np.int64)
    return EvalCode(field, pts, tuple(basis), G, rank(field, G))


def dj_basis(field: GF, m: int) -> list[MultiPoly]:
    """{1, sigma^1, ..., sigma^m} in m variables."""
    return [MultiPoly.const(field, m, 1)] + [elementary_symmetric(m, i, field) for i in range(1, m + 1)]


def _check_dj(field: GF, m: int) -> None:
    if m < 1:
        raise ValidationError("--m must be >= 1")
    if m >= field.q:
        raise MTooLarge(f"m={m} must be smaller than q={field.q}")
    if m > 3:
        raise MTooLarge("only m <= 3 is supported")


def build_dj_code(field: GF, m: int, reduced: bool = False) -> EvalCode:
    _check_dj(field, m)
    pts = representatives_array(field, m) if reduced else distinguished_array(field, m)
    return build_code(field, pts, dj_basis(field, m))


def build_geometric_code(field: GF, system: SystemDescriptor) -> EvalCode:
    if field.p == 2:
        raise ValidationError("geometric codes need odd q")
    return build_code(field, external_set(field, Mode.AFFINE), system.affine_basis())


# --- weights --------------------------------------------------------------


@dataclass(frozen=True)
class WeightDistribution:
    counts: dict[int, int]
    up_to_scalar: bool

    @property
    def min_distance(self) -> int:
        return min(self.counts) if self.counts else 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_sorted(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


def _digits(idx: np.ndarray, q: int, k: int) -> np.ndarray:
    out = np.empty((len(idx), k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % q
        idx = idx // q
    return out


def _weights_chunk(field: GF, G: np.ndarray, lead: int, lo: int, hi: int) -> dict[int, int]:
    """Weights of the codewords with coefficient vectors indexed lo..hi.

    ``lead < 0``: all vectors in F^K. Otherwise vectors of the form
    (0,..,0, 1, *) with the 1 at position ``lead``.
    """
    q = field.q
    K = G.shape[0]
    idx = np.arange(lo, hi, dtype=np.int64)
    if lead < 0:
        A = _digits(idx, q, K)
    else:
        A = np.zeros((hi - lo, K), dtype=np.int64)
        A[:, lead] = 1
        A[:, lead + 1:] = _digits(idx, q, K - lead - 1)
    W = np.count_nonzero(field.matmul(A, G), axis=1)
    vals, cnt = np.unique(W, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnt)}


def weight_distribution(code: EvalCode, up_to_scalar: bool = False, threads: int = 1,
                        limit: int = MAX_CODEWORDS) -> WeightDistribution:
    F = code.field
    q, K = F.q, code.K
    work = q**K
    if work > limit:
        raise TooLarge(f"q^K = {q}^{K} = {work} codewords exceed the guard {limit}", work)
    G = code.reduced_generator()
    tasks = []
    if up_to_scalar:
        for lead in range(K):
            for lo, hi in chunk_ranges(q ** (K - lead - 1), _CHUNK):
                tasks.append((F, G, lead, lo, hi))
    else:
        for lo, hi in chunk_ranges(work, _CHUNK):
            tasks.append((F, G, -1, lo, hi))
    total: Counter = Counter()
    for part in map_tasks(_weights_chunk, tasks, threads):
        total.update(part)
    if not up_to_scalar:
        total[0] -= 1  # the zero codeword
    counts = {w: c for w, c in sorted(total.items()) if w != 0 and c}
    if total.get(0, 0):  # pragma: no cover - G has full rank
        raise AssertionError("nonzero combination gave the zero codeword")
    return WeightDistribution(counts, up_to_scalar)


def minimum_distance(code: EvalCode, threads: int = 1) -> int:
    return weight_distribution(code, up_to_scalar=True, threads=threads).min_distance


def zero_counts(field: GF, G: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Number of zero coordinates of each codeword coeffs @ G."""
    return G.shape[-1] - np.count_nonzero(field.matmul(coeffs, G), axis=-1)


# --- closed forms and bounds ------------------------------------------------


def _perm(n: int, k: int) -> int:
    return math.perm(n, k)


def closed_form_params(kind: CodeKind | str, q: int, m: int, t: int | None = None) -> tuple[int, int, int]:
    kind = CodeKind(kind) if not isinstance(kind, CodeKind) else kind
    if kind is CodeKind.GRM:
        t = 1 if t is None else t
        if not 0 <= t < q:
            raise ValidationError("GRM order t must satisfy 0 <= t < q")
        return (q**m, binomial(m + t, m), q**m - t * q ** (m - 1))
    if m < 1:
        raise ValidationError("m must be >= 1")
    if m >= q:
        raise MTooLarge(f"m={m} must be smaller than q={q}")
    if kind is CodeKind.DJ:
        return (_perm(q, m), m + 1, (q - m) * _perm(q - 1, m - 1))
    return (binomial(q, m), m + 1, binomial(q, m) - binomial(q - 1, m - 1))


def _ceil_half_theorem1(q: int) -> int:
    """ceil((q^2 - 2q - 7 - 2 sqrt(q)) / 2) in exact integer arithmetic."""
    A = q * q - 2 * q - 7
    # smallest n with 2n >= A - 2 sqrt(q), i.e. 2 sqrt(q) >= A - 2n
    n = (A - 2 * math.isqrt(q) - 2) // 2 - 1
    while True:
        B = A - 2 * n
        if B <= 0 or B * B <= 4 * q:
            return n
        n += 1


def bound(kind: BoundKind | str, q: int, u: int | None = None) -> int:
    kind = BoundKind(kind) if not isinstance(kind, BoundKind) else kind
    if kind is BoundKind.THEOREM1:
        if q % 2 == 0:
            raise ValidationError("the Theorem 1.1 bound needs odd q")
        return _ceil_half_theorem1(q)
    if u is None or u < 1:
        raise ValidationError("--u is required (u >= 1)")
    if kind is BoundKind.GENERIC_U:
        return q * (q - 1) // 2 - u * q - 1
    return q * (q - 1) // 2 - ((u - 1) * q + u // 2 + 1)


def weight_window(q: int) -> tuple[float, float]:
    """Intersection-size window [(q-1)/2 - (sqrt q + 5), (q-1)/2 + (sqrt q + 3)]."""
    r = math.sqrt(q)
    return ((q - 1) / 2 - (r + 5), (q - 1) / 2 + (r + 3))

