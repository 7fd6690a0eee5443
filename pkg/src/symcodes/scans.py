"""Scans over families of linear systems: type-1 nets over P in Lambda,
type-2 systems over the non-squares s, and cubic systems over k.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .code_engine import bound, weight_window
from .errors import DegenerateTriangle, TooLarge, ValidationError
from .finite_field import GF, Tower, make_tower
from .linear_systems import (
    CUBIC_MONOMIALS,
    build_cubic_system,
    build_type2_system,
    frob_points,
    lambda_mask,
    parabola_substitution,
    projective_combinations,
    type1_net_coeffs,
    type2_basis_coeffs,
)
from .parallel import chunk_ranges, map_tasks
from .plane_geometry import (
    CONIC_MONOMIALS,
    Mode,
    affine_points,
    conic_det_many,
    external_set,
    normalize,
    point_rank,
    projective_points,
)

SCAN_QS = (5, 7, 9, 11)
_CHUNK = 2048


class DeltaMode(enum.Enum):
    """Which members of the cubic system enter N(k).

    LAMBDA_ONLY: lambda != 0, delta free. FULL: every member.
    DELTA_ZERO: lambda != 0 and delta = 0 (the net of pure lambda-cubics).
    """

    LAMBDA_ONLY = "lambda"
    FULL = "full"
    DELTA_ZERO = "delta0"


def cubic_combinations(field: GF, delta_mode: DeltaMode | str) -> np.ndarray:
    """Projective coefficient vectors (lambda_0, lambda_1, lambda_2, delta)."""
    mode = DeltaMode(delta_mode)
    if mode is DeltaMode.DELTA_ZERO:
        lam = projective_combinations(field, 3)
        return np.concatenate([lam, np.zeros((len(lam), 1), np.int64)], axis=1)
    combos = projective_combinations(field, 4)
    if mode is DeltaMode.LAMBDA_ONLY:
        combos = combos[np.any(combos[:, :3] != 0, axis=1)]
    return combos


@dataclass
class ScanReport:
    kind: str
    q: int
    options: dict
    records: list[dict]
    timing: float = dc_field(default=0.0, compare=False)

    @property
    def admissible(self) -> list[dict]:
        return [r for r in self.records if r.get("admissible", True)]

    @property
    def achieved_distance_set(self) -> list[int]:
        return sorted({r["d"] for r in self.admissible})

    def witnesses(self) -> dict:
        recs = self.admissible
        if not recs:
            return {}
        hi = max(r["d"] for r in recs)
        lo = min(r["d"] for r in recs)
        return {
            "argmax": [r["choice"] for r in recs if r["d"] == hi],
            "argmin": [r["choice"] for r in recs if r["d"] == lo],
            "max_d": hi,
            "min_d": lo,
        }

    def to_dict(self) -> dict:
        w = self.witnesses()
        return {
            "construction": self.kind,
            "q": self.q,
            "options": self.options,
            "achieved_distance_set": self.achieved_distance_set,
            "max_d": w.get("max_d"),
            "argmax": w.get("argmax", [])[:50],
            "argmin": w.get("argmin", [])[:50],
            "num_choices": len(self.records),
            "num_admissible": len(self.admissible),
        }


def _monomial_matrix(field: GF, monomials, pts: np.ndarray) -> np.ndarray:
    """(len(monomials), N) values of the monomials at projective points."""
    rows = []
    for e in monomials:
        v = np.ones(len(pts), dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                v = field.vmul(v, field.vpow(pts[:, i], k))
        rows.append(v)
    return np.stack(rows)


def _affine_ext_points(field: GF) -> np.ndarray:
    E = external_set(field, Mode.AFFINE)
    return np.concatenate([E, np.ones((len(E), 1), dtype=np.int64)], axis=1)


def _check_q(field: GF) -> None:
    if field.p == 2:
        raise ValidationError("scans need odd q")


def _intersections(field: GF, gen: np.ndarray, combos: np.ndarray) -> np.ndarray:
    """Zero counts of every combination: gen (..., k, n), combos (c, k)."""
    W = field.matmul(combos, gen)
    return np.count_nonzero(W == 0, axis=-1)


def _stats(field: GF, gen: np.ndarray, combos: np.ndarray) -> dict[str, np.ndarray]:
    """Per-system code statistics for a stack of generator matrices."""
    n = gen.shape[-1]
    Z = _intersections(field, gen, combos)
    zero_word = Z == n
    n_zero = zero_word.sum(axis=-1)
    masked = np.where(zero_word, -1, Z)
    max_int = masked.max(axis=-1)
    min_int = np.where(zero_word, n + 1, Z).min(axis=-1)
    lo, hi = weight_window(field.q)
    viol = ((~zero_word) & ((Z < lo) | (Z > hi))).sum(axis=-1)
    q = field.q
    k = gen.shape[-2]
    # projective zero combinations = (q^(k-K) - 1)/(q - 1)
    K = k - np.round(np.log(n_zero * (q - 1) + 1) / np.log(q)).astype(np.int64)
    nondeg = np.all(np.any(gen != 0, axis=-2), axis=-1)
    return {"max_int": max_int, "min_int": min_int, "K": K, "violations": viol, "nondeg": nondeg}


# --- type-1 -----------------------------------------------------------------


def frobenius_orbit_reps(tower: Tower) -> np.ndarray:
    """Lambda points that have the smallest rank within their Frobenius orbit."""
    ext = tower.ext
    pts = projective_points(ext)
    pts = pts[lambda_mask(tower, pts)]
    r0 = point_rank(ext, pts)
    r1 = point_rank(ext, normalize(ext, frob_points(tower, pts)))
    r2 = point_rank(ext, normalize(ext, frob_points(tower, pts, 2)))
    return pts[(r0 < r1) & (r0 < r2)]


def stabilizer_matrices(field: GF) -> np.ndarray:
    """The q(q-1) collineations (x, y) -> (a x + 2b, ab x + a^2 y + b^2) that
    fix C and the line at infinity, as 3x3 matrices acting on columns."""
    F = field
    two = F.from_int(2)
    mats = []
    for a in range(1, F.q):
        for b in range(F.q):
            mats.append([
                [a, 0, F.mul(two, b)],
                [F.mul(a, b), F.mul(a, a), F.mul(b, b)],
                [0, 0, 1],
            ])
    return np.array(mats, dtype=np.int64)


def orbit_reduced_reps(tower: Tower) -> np.ndarray:
    """One Lambda point per orbit of <stabilizer, Frobenius>, smallest rank."""
    ext = tower.ext
    M = tower.embed(stabilizer_matrices(tower.base))
    pts = projective_points(ext)
    mask = lambda_mask(tower, pts)
    seen = ~mask
    reps = []
    for idx in np.flatnonzero(mask):
        if seen[idx]:
            continue
        reps.append(idx)
        P = pts[idx]
        orbit = np.stack([P, frob_points(tower, P), frob_points(tower, P, 2)])
        imgs = ext.matmul(M[:, None, :, :], orbit[None, :, :, None])[..., 0].reshape(-1, 3)
        seen[point_rank(ext, normalize(ext, imgs))] = True
    return pts[np.asarray(reps, dtype=np.int64)]


def _type1_chunk(field: GF, pts: np.ndarray) -> dict[str, np.ndarray]:
    tower = make_tower(field, 3)
    E = _affine_ext_points(field)
    mono = _monomial_matrix(field, CONIC_MONOMIALS, E)
    coeffs = type1_net_coeffs(tower, pts)
    gen = field.matmul(coeffs, mono)
    combos = projective_combinations(field, 3)
    st = _stats(field, gen, combos)
    members = field.matmul(combos, coeffs)
    st["irreducible"] = np.all(conic_det_many(field, members) != 0, axis=-1)
    return st


def scan_type1(field: GF, mode: str = "exhaustive", sample: int | None = None,
               seed: int | None = None, threads: int = 1) -> ScanReport:
    _check_q(field)
    q = field.q
    if mode not in ("exhaustive", "sample", "orbit_reduced"):
        raise ValidationError(f"unknown type-1 scan mode {mode!r}")
    if mode == "exhaustive" and q > 11:
        raise TooLarge(f"exhaustive type-1 scan at q={q} (use --sample or --orbit-reduced)", q**6)
    t0 = time.perf_counter()
    tower = make_tower(field, 3)
    if mode == "orbit_reduced":
        pts = orbit_reduced_reps(tower)
    else:
        pts = frobenius_orbit_reps(tower)
        if mode == "sample":
            if sample is None or seed is None:
                raise ValidationError("--sample needs a count and --seed")
            if sample < 1:
                raise ValidationError("--sample must be >= 1")
            rng = np.random.default_rng(seed)
            take = np.sort(rng.choice(len(pts), size=min(sample, len(pts)), replace=False))
            pts = pts[take]
    tasks = [(field, pts[lo:hi]) for lo, hi in chunk_ranges(len(pts), _CHUNK)]
    parts = map_tasks(_type1_chunk, tasks, threads)
    ranks = point_rank(tower.ext, pts)
    n = q * (q - 1) // 2
    records = []
    off = 0
    for part in parts:
        for j in range(len(part["K"])):
            i = off + j
            K = int(part["K"][j])
            records.append({
                "choice": int(ranks[i]),
                "P": [int(c) for c in pts[i]],
                "n": n, "K": K, "d": n - int(part["max_int"][j]),
                "max_intersection": int(part["max_int"][j]),
                "min_intersection": int(part["min_int"][j]),
                "window_violations": int(part["violations"][j]),
                "irreducible_net": bool(part["irreducible"][j]),
                "nondegenerate": bool(part["nondeg"][j]),
                "admissible": K == 3,
            })
        off += len(part["K"])
    records.sort(key=lambda r: r["choice"])
    opts = {"mode": mode, "sample": sample, "seed": seed, "bound_theorem1": bound("theorem1", q)}
    return ScanReport("type1", q, opts, records, time.perf_counter() - t0)


# --- type-2 -----------------------------------------------------------------


def scan_type2(field: GF, s_values: list[int] | None = None) -> ScanReport:
    _check_q(field)
    t0 = time.perf_counter()
    q = field.q
    if s_values is None:
        s_values = [a for a in range(1, q) if not field.is_square(a)]
    E = _affine_ext_points(field)
    mono = _monomial_matrix(field, CONIC_MONOMIALS, E)
    combos = projective_combinations(field, 3)
    n = len(E)
    records = []
    for s in s_values:
        build_type2_system(field, s)  # validation
        gen = field.matmul(type2_basis_coeffs(field, s), mono)[None]
        st = _stats(field, gen, combos)
        records.append({
            "choice": int(s), "n": n, "K": int(st["K"][0]),
            "d": n - int(st["max_int"][0]),
            "max_intersection": int(st["max_int"][0]),
            "min_intersection": int(st["min_int"][0]),
            "window_violations": int(st["violations"][0]),
            "nondegenerate": bool(st["nondeg"][0]),
            "admissible": int(st["K"][0]) == 3,
        })
    opts = {"s_values": [int(s) for s in s_values], "bound_theorem1": bound("theorem1", q)}
    return ScanReport("type2", q, opts, records, time.perf_counter() - t0)


# --- cubics -----------------------------------------------------------------


def _cubic_record(field: GF, k: int, delta_mode: str) -> dict:
    tower = make_tower(field, 3)
    try:
        desc = build_cubic_system(tower, k)
    except DegenerateTriangle:
        return {"choice": k, "k": k, "admissible": False}
    E = _affine_ext_points(field)
    n = len(E)
    coeffs = np.array([f.coefficient_vector(CUBIC_MONOMIALS) for f in desc.basis], dtype=np.int64)
    gen = field.matmul(coeffs, _monomial_matrix(field, CUBIC_MONOMIALS, E))
    combos = cubic_combinations(field, delta_mode)
    direct = _intersections(field, gen, combos)
    # the same counts through f(x, t) = member(x, (x^2 - t^2)/4), t != 0
    grid = affine_points(field)
    grid = grid[grid[:, 1] != 0]
    sub = np.stack([parabola_substitution(f.dehomogenize()).evaluate_many(grid) for f in desc.basis])
    via_t = _intersections(field, sub, combos)
    if not np.array_equal(via_t, 2 * direct):  # pragma: no cover - an identity
        raise AssertionError(f"k={k}: substituted curve count disagrees with direct count")
    real = direct < n
    Nk = int(via_t[real].max()) if real.any() else 0
    full_rank = bool(real.all())
    return {
        "choice": k, "k": k, "n": n, "K": 3 if delta_mode == DeltaMode.DELTA_ZERO.value else 4,
        "Nk": Nk, "d": n - Nk // 2, "admissible": full_rank,
    }


def scan_cubic(field: GF, delta_mode: DeltaMode | str = DeltaMode.FULL, threads: int = 1) -> ScanReport:
    _check_q(field)
    mode = DeltaMode(delta_mode).value
    q = field.q
    if q > 13:
        raise TooLarge(f"cubic scan at q={q}", q**2 * q**4 * q**2)
    t0 = time.perf_counter()
    tasks = [(field, k, mode) for k in range(1, q * q + q + 1)]
    records = map_tasks(_cubic_record, tasks, threads)
    for r in records:
        if "Nk" not in r:
            r["degenerate"] = True
    return ScanReport("cubic", q, {"delta_mode": mode}, records, time.perf_counter() - t0)
