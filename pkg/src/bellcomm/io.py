"""File formats: vertex and inequality JSON, catalogs, report CSV and table-style printing."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .linalg import Inequality
from .scenario import Scenario
from .symmetry import FacetCatalog


def scenario_json(s: Scenario) -> dict:
    return {"X": s.X, "Y": s.Y, "comm": s.comm}


def scenario_from_json(data: dict) -> Scenario:
    return Scenario(int(data["X"]), int(data["Y"]), int(data.get("comm", 0)))


def write_vertices(path, V: np.ndarray, s: Scenario):
    data = dict(scenario_json(s), rows=np.asarray(V).tolist())
    Path(path).write_text(json.dumps(data))


def read_vertices(path) -> tuple:
    data = json.loads(Path(path).read_text())
    s = scenario_from_json(data)
    V = np.array(data["rows"], dtype=np.int64).reshape(-1, s.dimension())
    return V, s


def inequality_rows(ineqs: Iterable[Inequality]) -> list:
    return [{"coeffs": [int(c) for c in q.coeffs], "bound": int(q.bound)} for q in ineqs]


def write_inequalities(path, ineqs: Sequence[Inequality], s: Scenario, extra: Optional[dict] = None):
    data = {"space": scenario_json(s), "rows": inequality_rows(ineqs)}
    if extra:
        data.update(extra)
    Path(path).write_text(json.dumps(data, indent=1))


def read_inequalities(path) -> tuple:
    """Inequalities from a facet file, a single-inequality file or a catalog file."""
    data = json.loads(Path(path).read_text())
    if "classes" in data:
        cat = FacetCatalog.from_json(data)
        return cat.representatives(), cat.scenario
    s = scenario_from_json(data["space"])
    rows = data["rows"] if "rows" in data else [data]
    return [Inequality(tuple(r["coeffs"]), r["bound"], s) for r in rows], s


def write_catalog(path, catalog: FacetCatalog):
    Path(path).write_text(json.dumps(catalog.to_json(), indent=1))


def read_catalog(path) -> FacetCatalog:
    return FacetCatalog.from_json(json.loads(Path(path).read_text()))


REPORT_FIELDS = ["class_id", "L", "C", "Q", "merit", "lambda", "schmidt1", "schmidt2"]


def report_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=REPORT_FIELDS, extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _fmt(r.get(k)) for k in REPORT_FIELDS})
    return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6f}"
    return x


def pretty(q: Inequality) -> str:
    """Table-style block: one row per Alice input with f_x in front.

    One-bit inequalities put e_xy under d_xy; Bell inequalities carry e'_y
    in a header row.
    """
    s = q.scenario
    d = q.block("d")
    e = q.block("e")
    f = q.block("f")
    cells = [str(int(c)) for c in q.coeffs]
    w = max(len(c) for c in cells + [str(q.bound)]) + 1

    def row(lead, vals):
        return f"{lead:>{w}} |" + "".join(f"{int(v):>{w}}" for v in vals)

    lines = []
    if s.comm:
        rule = "-" * (w + 2 + w * s.Y)
        lines.append(rule)
        for x in range(s.X):
            lines.append(row(int(f[x]), d[x]))
            lines.append(row("", e[x]))
            lines.append(rule)
    else:
        lines.append(row("", e))
        lines.append("-" * (w + 2 + w * s.Y))
        for x in range(s.X):
            lines.append(row(int(f[x]), d[x]))
    lines.append(f"<= {q.bound}")
    return "\n".join(lines)
