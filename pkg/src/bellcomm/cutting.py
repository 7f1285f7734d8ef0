"""Solving one-bit polytopes piecewise by cutting them with extended Bell inequalities.

A Bell inequality is relabeled, lifted orthogonally to the one-bit space, and
every one-bit vertex on or beyond the lifted hyperplane is kept. The facets of
the small polytope spanned by those vertices include facets of the full
polytope near the cut, plus spurious ones created by the cut itself, which
are removed by certifying each candidate against the full vertex set.

Results directory layout written by :func:`run_cut` (each file is written once
its stage is complete, and an existing file short-circuits that stage):

    cut.json           the CutSpec
    kept.json          indices of the kept vertices in ``vertex_matrix`` order
    candidates.json    facets of the cut polytope
    facets.json        candidates that are facets of the full polytope
    classes.json       catalog of their equivalence classes
    record.json        the RunRecord counts
    dd_checkpoint.npz  double description state while the solve is running
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .bridge import named, orthogonal_extension
from .linalg import Inequality
from .polytope import VRep, enumerate_facets, is_facet
from .scenario import Scenario, vertex_matrix
from .symmetry import (FacetCatalog, Relabeling, apply_relabeling, canonical_keys,
                       orbit_size, FacetClass)

log = logging.getLogger(__name__)


class EmptyCut(ValueError):
    """The cut hyperplane misses the polytope."""


@dataclass(frozen=True)
class CutSpec:
    generator: Inequality
    relabeling: Optional[Relabeling] = None
    bound_shift: Fraction = Fraction(0)
    scenario: Optional[Scenario] = None
    strict: bool = False
    name: str = ""

    def __post_init__(self):
        if self.generator.scenario is None or self.generator.scenario.comm:
            raise ValueError("the generator must be a Bell inequality")
        s = self.scenario or self.generator.scenario
        object.__setattr__(self, "scenario", s.with_comm())
        object.__setattr__(self, "bound_shift", Fraction(self.bound_shift))
        if not self.name:
            object.__setattr__(self, "name", "cut")

    def to_json(self) -> dict:
        s = self.scenario
        return {"name": self.name,
                "scenario": {"X": s.X, "Y": s.Y, "comm": s.comm},
                "generator": {"coeffs": list(self.generator.coeffs), "bound": self.generator.bound},
                "relabeling": self.relabeling.to_json() if self.relabeling else None,
                "bound_shift": str(self.bound_shift), "strict": self.strict}

    @classmethod
    def from_json(cls, data: dict) -> "CutSpec":
        sc = data["scenario"]
        s = Scenario(sc["X"], sc["Y"], sc.get("comm", 1))
        gen = data["generator"]
        if isinstance(gen, str):
            generator = named(gen, s.local())
            name = data.get("name") or gen
        else:
            generator = Inequality(tuple(gen["coeffs"]), gen["bound"], s.local())
            name = data.get("name", "")
        rel = data.get("relabeling")
        return cls(generator, Relabeling.from_json(rel) if rel else None,
                   Fraction(data.get("bound_shift", 0)), s, bool(data.get("strict", False)), name)


def cut_inequality(cut: CutSpec) -> tuple:
    """(extended inequality, threshold): vertices with value >= threshold are kept."""
    b = cut.generator
    if cut.relabeling is not None:
        b = apply_relabeling(b, cut.relabeling)
    ext = orthogonal_extension(b, cut.scenario)
    return ext, Fraction(ext.bound) + cut.bound_shift


def cut_vertices(vertices: np.ndarray, cut: CutSpec) -> np.ndarray:
    """Indices of the vertices on or beyond the cut, in input order."""
    ext, threshold = cut_inequality(cut)
    V = np.asarray(vertices, dtype=np.int64)
    if V.shape[1] != len(ext.coeffs):
        raise ValueError("vertices and cut live in different spaces")
    vals = V @ ext.vector
    # values are integers, so comparing against the fraction is exact
    keep = vals > threshold if cut.strict else vals >= threshold
    idx = np.nonzero(keep)[0]
    if len(idx) == 0:
        raise EmptyCut(f"no vertex reaches {threshold} for the cut {cut.name}")
    return idx


def solve_cut(cut: CutSpec, vertices: Optional[np.ndarray] = None, **dd_options) -> tuple:
    """Facets of the polytope spanned by the kept vertices.

    Returns (kept indices, list of Facet). ``dd_options`` go to ``enumerate_facets``.
    """
    V = vertex_matrix(cut.scenario) if vertices is None else np.asarray(vertices)
    kept = cut_vertices(V, cut)
    sub = VRep(V[kept])
    if not sub.full_dimensional:
        raise ValueError(f"cut polytope has dimension {sub.dim} < {sub.ambient_dim}")
    return kept, enumerate_facets(sub, **dd_options)


def filter_true_facets(candidates: Sequence, full_vertices, s: Optional[Scenario] = None) -> list:
    """Candidates that are facets of the full polytope, in input order."""
    full = full_vertices if isinstance(full_vertices, VRep) else VRep(full_vertices)
    out = []
    for c in candidates:
        q = getattr(c, "ineq", c)
        if s is not None:
            q = Inequality(q.coeffs, q.bound, s)
        if is_facet(q, full):
            out.append(q)
    return out


@dataclass
class RunRecord:
    cut: CutSpec
    kept_vertices: int
    raw_facets: int
    true_facets: int
    classes: int
    payload: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not (self.classes <= self.true_facets <= self.raw_facets):
            raise ValueError("need classes <= true_facets <= raw_facets")

    def counts(self) -> dict:
        return {"name": self.cut.name, "kept_vertices": self.kept_vertices,
                "raw_facets": self.raw_facets, "true_facets": self.true_facets,
                "classes": self.classes}


def merge_runs(runs: Sequence[RunRecord], s: Optional[Scenario] = None) -> FacetCatalog:
    """Equivalence classes over the union of all runs, each tagged with the runs that found it."""
    if not runs and s is None:
        raise ValueError("nothing to merge")
    s = s or runs[0].cut.scenario
    ineqs, sources = [], []
    for r in runs:
        if r.cut.scenario != s:
            raise ValueError(f"run {r.cut.name} is in {r.cut.scenario}, not {s}")
        for q in r.payload:
            ineqs.append(Inequality(q.coeffs, q.bound, s))
            sources.append(r.cut.name)
    keys = canonical_keys(ineqs, s)
    members: dict = {}
    found: dict = {}
    for q, k, src in zip(ineqs, keys, sources):
        members.setdefault(k, set()).add(q.key())
        found.setdefault(k, set()).add(src)
    classes = []
    for cid, k in enumerate(sorted(members)):
        rep = Inequality(k[:-1], k[-1], s)
        classes.append(FacetClass(cid, rep, orbit_size(rep, s), len(members[k]), found[k]))
    return FacetCatalog(s, classes)


# ---------------------------------------------------------------------------
# persisted runs


def _write_json(path: Path, data):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=1))
    os.replace(tmp, path)


def _ineq_rows(ineqs) -> list:
    return [{"coeffs": list(q.coeffs), "bound": q.bound} for q in ineqs]


def _read_rows(path: Path, s: Scenario) -> list:
    data = json.loads(path.read_text())
    return [Inequality(tuple(r["coeffs"]), r["bound"], s) for r in data["rows"]]


def run_cut(cut: CutSpec, results: Optional[str] = None, **dd_options) -> RunRecord:
    """Cut, solve, filter and reduce, persisting each stage under ``results``.

    Re-running with the same directory skips stages whose output exists and
    resumes the double description from its checkpoint.
    """
    from .symmetry import reduce_to_classes

    s = cut.scenario
    V = vertex_matrix(s)
    out = Path(results) if results else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        spec_file = out / "cut.json"
        if spec_file.exists() and json.loads(spec_file.read_text()) != cut.to_json():
            raise ValueError(f"{out} holds a different cut")
        _write_json(spec_file, cut.to_json())

    def stage(name):
        return out / name if out is not None else None

    p = stage("kept.json")
    if p is not None and p.exists():
        kept = np.array(json.loads(p.read_text())["indices"], dtype=np.int64)
    else:
        kept = cut_vertices(V, cut)
        if p is not None:
            _write_json(p, {"indices": kept.tolist()})

    p = stage("candidates.json")
    space = {"X": s.X, "Y": s.Y, "comm": s.comm}
    if p is not None and p.exists():
        candidates = _read_rows(p, s)
    else:
        ck = stage("dd_checkpoint.npz")
        if ck is not None:
            dd_options.setdefault("checkpoint", str(ck))
            if ck.exists() and "resume" not in dd_options:
                dd_options["resume"] = str(ck)
        sub = VRep(V[kept])
        if not sub.full_dimensional:
            raise ValueError(f"cut polytope has dimension {sub.dim} < {sub.ambient_dim}")
        candidates = [Inequality(f.ineq.coeffs, f.ineq.bound, s)
                      for f in enumerate_facets(sub, **dd_options)]
        if p is not None:
            _write_json(p, {"space": space, "rows": _ineq_rows(candidates)})
            if ck.exists():
                ck.unlink()

    p = stage("facets.json")
    if p is not None and p.exists():
        facets = _read_rows(p, s)
    else:
        facets = filter_true_facets(candidates, V, s)
        if p is not None:
            _write_json(p, {"space": space, "rows": _ineq_rows(facets)})

    catalog = reduce_to_classes(facets, s, [cut.name] * len(facets))
    record = RunRecord(cut, len(kept), len(candidates), len(facets), len(catalog), facets)
    if out is not None:
        _write_json(stage("classes.json"), catalog.to_json())
        _write_json(stage("record.json"), record.counts())
    log.info("cut %s: %s", cut.name, record.counts())
    return record


def load_run(results: str) -> RunRecord:
    """RunRecord from a finished results directory."""
    out = Path(results)
    cut = CutSpec.from_json(json.loads((out / "cut.json").read_text()))
    s = cut.scenario
    counts = json.loads((out / "record.json").read_text())
    facets = _read_rows(out / "facets.json", s)
    return RunRecord(cut, counts["kept_vertices"], counts["raw_facets"], counts["true_facets"],
                     counts["classes"], facets)
