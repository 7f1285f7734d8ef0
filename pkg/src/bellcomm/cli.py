"""Command line entry point.

Every command writes JSON or CSV and a manifest (tool version, config hash,
wall time) next to its output. Exit codes: 0 success, 2 budget exceeded
(checkpoint written), 3 validation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import io as bio
from .bridge import named, ns_project, orthogonal_extension
from .cutting import CutSpec, cut_vertices, filter_true_facets, load_run, merge_runs, run_cut
from .linalg import Inequality
from .polytope import BudgetExceeded, VRep, enumerate_facets
from .quantum import SeesawConfig, bounds_report, quantum_value
from .scenario import Scenario, vertex_matrix
from .symmetry import Relabeling, reduce_to_classes

log = logging.getLogger("bellcomm")

EXIT_OK = 0
EXIT_BUDGET = 2
EXIT_INVALID = 3


class ValidationError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _scenario(args) -> Scenario:
    return Scenario(args.X, args.Y, 1 if args.comm else 0)


def _load_ineqs(ref: str, scenario=None) -> tuple:
    """A file path or a named inequality."""
    if Path(ref).exists():
        return bio.read_inequalities(ref)
    try:
        q = named(ref, scenario)
    except KeyError as exc:
        raise ValidationError(f"{ref}: no such file or named inequality") from exc
    return [q], q.scenario


def _emit(args, data, text=None):
    """Write JSON (or raw text) to --output, else print it."""
    payload = text if text is not None else json.dumps(data, indent=1)
    if getattr(args, "output", None):
        Path(args.output).write_text(payload + ("" if payload.endswith("\n") else "\n"))
    else:
        print(payload)


def _write_manifest(args, wall: float, status: int):
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    blob = json.dumps(config, sort_keys=True, default=str)
    manifest = {"tool": "bellcomm", "version": __version__, "command": args.command,
                "config": json.loads(blob),
                "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
                "wall_time": round(wall, 3), "exit_code": status}
    target = getattr(args, "output", None) or getattr(args, "results", None)
    if target:
        path = Path(str(target).rstrip("/") + ".manifest.json")
    else:
        path = Path(f"{args.command}.manifest.json")
    if args.manifest:
        path = Path(args.manifest)
    if args.no_manifest:
        return
    path.write_text(json.dumps(manifest, indent=1) + "\n")


def _print_pretty(ineqs):
    for q in ineqs:
        print(bio.pretty(q))
        print()


# ---------------------------------------------------------------------------
# commands


def cmd_vertices(args):
    s = _scenario(args)
    V = vertex_matrix(s)
    if args.output:
        bio.write_vertices(args.output, V, s)
    print(len(V))


def cmd_facets(args):
    V, s = bio.read_vertices(args.vertices)
    facets = enumerate_facets(VRep(V), ordering=args.ordering, max_rays=args.max_rays,
                              time_limit=args.time_limit, checkpoint=args.checkpoint,
                              resume=args.resume, seed=args.seed)
    ineqs = [Inequality(f.ineq.coeffs, f.ineq.bound, s) for f in facets]
    _emit(args, {"space": bio.scenario_json(s), "rows": bio.inequality_rows(ineqs)})
    if args.pretty:
        _print_pretty(ineqs)
    print(f"{len(ineqs)} facets", file=sys.stderr)


def _cut_spec(args, s) -> CutSpec:
    gens, _ = _load_ineqs(args.generator, s.local())
    if len(gens) != 1:
        raise ValidationError("the generator file must hold one inequality")
    gen = Inequality(gens[0].coeffs, gens[0].bound, s.local())
    rel = None
    if args.relabeling:
        src = Path(args.relabeling)
        rel = Relabeling.from_json(json.loads(src.read_text() if src.exists() else args.relabeling))
    return CutSpec(gen, rel, Fraction(args.shift), s, args.strict, args.name or args.generator)


def cmd_cut(args):
    V, s = bio.read_vertices(args.vertices)
    if not s.comm:
        raise ValidationError("cuts act on one-bit vertex sets")
    cut = _cut_spec(args, s)
    kept = cut_vertices(V, cut)
    facets = enumerate_facets(VRep(V[kept]), ordering=args.ordering, max_rays=args.max_rays,
                              time_limit=args.time_limit, checkpoint=args.checkpoint,
                              resume=args.resume)
    ineqs = [Inequality(f.ineq.coeffs, f.ineq.bound, s) for f in facets]
    _emit(args, {"space": bio.scenario_json(s), "cut": cut.to_json(),
                 "kept_vertices": len(kept), "rows": bio.inequality_rows(ineqs)})
    print(f"{len(kept)} vertices kept, {len(ineqs)} candidates", file=sys.stderr)


def cmd_filter(args):
    cands, s = bio.read_inequalities(args.candidates)
    V, vs = bio.read_vertices(args.vertices)
    if vs != s:
        raise ValidationError(f"candidates are in {s}, vertices in {vs}")
    facets = filter_true_facets(cands, V, s)
    _emit(args, {"space": bio.scenario_json(s), "rows": bio.inequality_rows(facets)})
    print(f"{len(facets)} of {len(cands)} candidates are facets", file=sys.stderr)


def cmd_classes(args):
    ineqs, sources, s = [], [], None
    for path in args.facets:
        qs, qs_s = bio.read_inequalities(path)
        if s is not None and qs_s != s:
            raise ValidationError("facet files from different scenarios")
        s = qs_s
        ineqs += qs
        sources += [Path(path).stem] * len(qs)
    cat = reduce_to_classes(ineqs, s, sources)
    _emit(args, cat.to_json())
    if args.pretty:
        _print_pretty(cat.representatives())
    print(f"{len(cat)} classes", file=sys.stderr)


def _transform(args, fn):
    ineqs, s = _load_ineqs(args.inequality)
    out = [fn(q) for q in ineqs]
    _emit(args, {"space": bio.scenario_json(out[0].scenario), "rows": bio.inequality_rows(out)})
    if args.pretty:
        _print_pretty(out)


def cmd_project(args):
    def fn(q):
        if not q.scenario.comm:
            raise ValidationError("project needs one-bit inequalities")
        return ns_project(q)
    _transform(args, fn)


def cmd_extend(args):
    def fn(q):
        if q.scenario.comm:
            raise ValidationError("extend needs Bell inequalities")
        return orthogonal_extension(q)
    _transform(args, fn)


def _cfg(args) -> SeesawConfig:
    return SeesawConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)


def cmd_quantum(args):
    ineqs, _ = _load_ineqs(args.inequality)
    rows = []
    for q in ineqs:
        res = quantum_value(q, _cfg(args))
        rows.append({"Q": res.value, "converged": res.converged, "model": res.model.to_json()})
    _emit(args, rows)


def _bounds_row(q, cfg):
    r = bounds_report(q, cfg)
    row = r.row()
    row["model"] = r.model.to_json()
    return row


def _bounds_rows(ineqs, cfg, jobs):
    if jobs > 1 and len(ineqs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bounds_row, ineqs, [cfg] * len(ineqs)))
    return [_bounds_row(q, cfg) for q in ineqs]


def cmd_bounds(args):
    ineqs, s = _load_ineqs(args.inequality)
    if not s.comm:
        raise ValidationError("bounds needs one-bit inequalities (use quantum for Bell inequalities)")
    rows = _bounds_rows(ineqs, _cfg(args), args.jobs)
    for i, r in enumerate(rows):
        r["class_id"] = i
    _emit(args, rows)
    if args.pretty:
        print(bio.report_csv(rows), file=sys.stderr)


def cmd_report(args):
    cat = bio.read_catalog(args.catalog)
    if not cat.scenario.comm:
        raise ValidationError("report needs a one-bit catalog")
    reps = cat.representatives()
    rows = _bounds_rows(reps, _cfg(args), args.jobs)
    for c, r in zip(cat.classes, rows):
        r["class_id"] = c.class_id
    _emit(args, None, bio.report_csv(rows))
    if args.pretty:
        for c, r in zip(cat.classes, rows):
            print(f"class {c.class_id}: L={r['L']} C={r['C']} Q={r['Q']:.4f}", file=sys.stderr)
            print(bio.pretty(c.representative), file=sys.stderr)


def _run_job(job_path, results, ordering, time_limit):
    cut = CutSpec.from_json(json.loads(Path(job_path).read_text()))
    budgets = json.loads(Path(job_path).read_text()).get("budgets", {})
    out = Path(results) / cut.name
    rec = run_cut(cut, str(out), ordering=ordering,
                  time_limit=budgets.get("time", time_limit),
                  max_rays=budgets.get("rays"))
    return rec.counts()


def cmd_run(args):
    """Full cut pipelines from job files, one results subdirectory per job."""
    if args.jobs > 1 and len(args.job) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_run_job, j, args.results, args.ordering, args.time_limit)
                       for j in args.job]
            counts = [f.result() for f in futures]
    else:
        counts = [_run_job(j, args.results, args.ordering, args.time_limit) for j in args.job]
    for c in counts:
        print(json.dumps(c))


def cmd_merge(args):
    runs = [load_run(d) for d in args.runs]
    cat = merge_runs(runs)
    _emit(args, cat.to_json())
    print(f"{len(cat)} classes", file=sys.stderr)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellcomm", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--manifest", help="manifest path (default: next to the output)")
        sp.add_argument("--no-manifest", action="store_true")
        return sp

    def dd_flags(sp):
        sp.add_argument("--ordering", default="lex",
                        choices=["lex", "lexmin", "random", "maxcutoff", "mincutoff"])
        sp.add_argument("--max-rays", type=int)
        sp.add_argument("--time-limit", type=float, help="seconds")
        sp.add_argument("--checkpoint", help="checkpoint file written on budget exhaustion")
        sp.add_argument("--resume", help="checkpoint file to resume from")

    def seesaw_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--restarts", type=int, default=50)
        sp.add_argument("--max-iters", type=int, default=1000)

    sp = add("vertices", cmd_vertices, "deterministic strategies of a scenario")
    sp.add_argument("X", type=int)
    sp.add_argument("Y", type=int)
    sp.add_argument("--comm", action="store_true", help="one bit from Alice to Bob")
    sp.add_argument("-o", "--output")

    sp = add("facets", cmd_facets, "all facets of a vertex file")
    sp.add_argument("vertices")
    sp.add_argument("-o", "--output")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--pretty", action="store_true")
    dd_flags(sp)

    sp = add("cut", cmd_cut, "facets of the polytope cut out by an extended Bell inequality")
    sp.add_argument("vertices")
    sp.add_argument("generator", help="named inequality or file")
    sp.add_argument("--relabeling", help="JSON string or file")
    sp.add_argument("--shift", default="0")
    sp.add_argument("--strict", action="store_true", help="keep only violating vertices")
    sp.add_argument("--name")
    sp.add_argument("-o", "--output")
    dd_flags(sp)

    sp = add("filter", cmd_filter, "keep candidates that are facets of the full polytope")
    sp.add_argument("candidates")
    sp.add_argument("vertices")
    sp.add_argument("-o", "--output")

    sp = add("classes", cmd_classes, "reduce facet files to relabeling classes")
    sp.add_argument("facets", nargs="+")
    sp.add_argument("-o", "--output")
    sp.add_argument("--pretty", action="store_true")

    for name, func, help_ in [("project", cmd_project, "intersect one-bit inequalities with NS"),
                              ("extend", cmd_extend, "orthogonal extension of Bell inequalities")]:
        sp = add(name, func, help_)
        sp.add_argument("inequality", help="named inequality or file")
        sp.add_argument("-o", "--output")
        sp.add_argument("--pretty", action="store_true")

    sp = add("quantum", cmd_quantum, "see-saw quantum value")
    sp.add_argument("inequality")
    sp.add_argument("-o", "--output")
    seesaw_flags(sp)

    sp = add("bounds", cmd_bounds, "L, C, Q, merit and noise resistance")
    sp.add_argument("inequality")
    sp.add_argument("-o", "--output")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--pretty", action="store_true")
    seesaw_flags(sp)

    sp = add("report", cmd_report, "CSV of bounds for every class of a catalog")
    sp.add_argument("catalog")
    sp.add_argument("-o", "--output")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--pretty", action="store_true")
    seesaw_flags(sp)

    sp = add("run", cmd_run, "cut pipelines from JSON job files")
    sp.add_argument("job", nargs="+")
    sp.add_argument("--results", required=True)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--ordering", default="lex")
    sp.add_argument("--time-limit", type=float)

    sp = add("merge", cmd_merge, "merge finished run directories into one catalog")
    sp.add_argument("runs", nargs="+")
    sp.add_argument("-o", "--output")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    t0 = time.monotonic()
    status = EXIT_OK
    try:
        args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc} (checkpoint: {exc.checkpoint})", file=sys.stderr)
        status = EXIT_BUDGET
    except (ValidationError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        status = EXIT_INVALID
    _write_manifest(args, time.monotonic() - t0, status)
    return status


if __name__ == "__main__":
    sys.exit(main())
