"""Report assembly and rendering (text, CSV, JSON)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any

from .code_engine import EvalCode, WeightDistribution, weight_distribution
from .scans import ScanReport


@dataclass
class Report:
    title: str
    data: dict[str, Any]
    columns: list[str] = field(default_factory=list)
    rows: list[dict[str, Any]] = field(default_factory=list)


def _key(k) -> tuple:
    s = str(k)
    return (0, int(s), "") if s.lstrip("-").isdigit() else (1, 0, s)


def _ordered(obj):
    """Recursively order dict keys: integer-like keys numerically, then the
    rest alphabetically. Keeps JSON output byte-stable."""
    if isinstance(obj, dict):
        return {str(k): _ordered(obj[k]) for k in sorted(obj, key=_key)}
    if isinstance(obj, (list, tuple)):
        return [_ordered(v) for v in obj]
    if isinstance(obj, set):
        return sorted(obj)
    return obj


def _cell(v) -> str:
    if isinstance(v, (list, tuple, set)):
        return " ".join(str(x) for x in (sorted(v) if isinstance(v, set) else v))
    if isinstance(v, bool):
        return "yes" if v else "no"
    return "" if v is None else str(v)


def emit_report(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        payload = dict(report.data)
        if report.columns:
            payload["rows"] = [{c: r.get(c) for c in report.columns} for r in report.rows]
        return json.dumps(_ordered(payload), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if report.columns:
            w.writerow(report.columns)
            for r in report.rows:
                w.writerow([_cell(r.get(c)) for c in report.columns])
        else:
            w.writerow(["key", "value"])
            for k, v in _ordered(report.data).items():
                w.writerow([k, json.dumps(v) if isinstance(v, (dict, list)) else _cell(v)])
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    out = [report.title, "=" * len(report.title)]
    data = _ordered(report.data)
    width = max((len(k) for k in data), default=0)
    for k, v in data.items():
        if isinstance(v, dict):
            v = ", ".join(f"{a}: {b}" for a, b in v.items())
        out.append(f"{k.ljust(width)}  {_cell(v)}")
    if report.columns:
        cells = [[_cell(r.get(c)) for c in report.columns] for r in report.rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(report.columns)]
        out.append("")
        out.append("  ".join(c.rjust(wd) for c, wd in zip(report.columns, widths)))
        out.append("  ".join("-" * wd for wd in widths))
        for row in cells:
            out.append("  ".join(c.rjust(wd) for c, wd in zip(row, widths)))
        if not cells:
            out.append("(no admissible choices)")
    return "\n".join(out) + "\n"


def code_report(code: EvalCode, construction: str, bound_checks: list[dict] | None = None,
                threads: int = 1) -> Report:
    wd: WeightDistribution = weight_distribution(code, threads=threads)
    n, K, d = code.n, code.K, wd.min_distance
    checks = []
    for b in bound_checks or []:
        checks.append({**b, "d": d, "ok": d >= b["value"]})
    data = {
        "construction": construction,
        "q": code.q,
        "params": {"n": n, "k": K, "d": d},
        "nondegenerate": code.is_nondegenerate(),
        "weight_distribution": wd.counts,
        "bound_checks": checks,
    }
    rows = [{"weight": w, "count": c} for w, c in wd.as_sorted()]
    return Report(f"{construction} over GF({code.q}): [{n}, {K}, {d}]", data, ["weight", "count"], rows)


SCAN_COLUMNS = {
    "type1": ["choice", "n", "K", "d", "max_intersection", "min_intersection", "irreducible_net"],
    "type2": ["choice", "n", "K", "d", "max_intersection", "min_intersection"],
    "cubic": ["k", "Nk", "d"],
}


def scan_report(scan: ScanReport) -> Report:
    data = scan.to_dict()
    data["window_violations"] = sum(r.get("window_violations", 0) for r in scan.records)
    if not scan.admissible:
        data["note"] = "no admissible choices"
    if scan.kind == "cubic":
        data["degenerate_k"] = [r["k"] for r in scan.records if r.get("degenerate")]
    rows = scan.admissible
    title = f"{scan.kind} scan over GF({scan.q}): distances {scan.achieved_distance_set}"
    return Report(title, data, SCAN_COLUMNS[scan.kind], rows)
