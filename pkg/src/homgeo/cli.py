"""Command-line entry point.

    homgeo run --config job.json [--out report.json]
    homgeo validate --config job.json
    homgeo reproduce-examples [--out DIR]

Exit status: 0 success, 1 computation failure, 2 config error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .catalog import catalog, check_entry
from .config import ConfigError, JobConfig, dumps, load_config, parse_config, to_jsonable
from .geodesics import (GeodesicSolverError, berwald_check, biinvariance_defect,
                        find_geodesic_vectors, geodesic_residual)
from .lie import jacobi_defect
from .orbits import find_orbit_critical_points
from .riemann import milnor_lemma_check, ricci

log = logging.getLogger("homgeo")

EXIT_OK, EXIT_COMPUTE, EXIT_CONFIG = 0, 1, 2


def _geodesic_vectors(job: JobConfig) -> dict:
    rep = find_geodesic_vectors(job.algebra, job.norm, job.solver)
    return {
        "solutions": rep.solutions,
        "residuals": rep.residuals,
        "components": [{"type": c.kind, "dim": c.dim, "basis": c.basis,
                        "verification_residual": c.verification_residual}
                       for c in rep.components],
        "solver_stats": rep.solver_stats,
    }


def _berwald(job: JobConfig) -> dict:
    L, F = job.algebra, job.norm
    rep = berwald_check(L, F)
    out = {"skew_defect": rep.skew_defect, "derived_pairing_defect": rep.derived_pairing_defect,
           "is_berwald": rep.is_berwald}
    if np.any(F.drift):
        out["drift_residual"] = geodesic_residual(L, F, F.drift).norm
        out["drift_ricci"] = ricci(L, F.a, F.drift)
    return out


def _biinvariance(job: JobConfig) -> dict:
    d = biinvariance_defect(job.algebra, job.norm, job.samples, rng=job.seed)
    return {"defect": d, "samples": job.samples}


def _ricci(job: JobConfig) -> dict:
    return {"vector": job.vector, "ricci": ricci(job.algebra, job.norm.a, job.vector)}


def _milnor(job: JobConfig) -> dict:
    rep = milnor_lemma_check(job.algebra, job.norm.a, job.vector)
    return {"orthogonal_to_derived": rep.orthogonal_to_derived, "ricci": rep.ricci,
            "skew_defect": rep.skew_defect, "verdict": rep.verdict}


def _orbit(job: JobConfig) -> dict:
    rep = find_orbit_critical_points(job.algebra, job.norm, job.vector, job.solver)
    return {
        "base": rep.base,
        "count": rep.count,
        "degenerate_constant": rep.degenerate_constant,
        "trivial_orbit": rep.trivial_orbit,
        "critical_points": [{"point": c.point, "Q": c.value, "first_variation": c.first_variation,
                             "geodesic_residual": c.geodesic_residual,
                             "is_geodesic_vector": c.is_geodesic_vector}
                            for c in rep.critical_points],
        "stats": rep.stats,
    }


def _classify(job: JobConfig) -> dict:
    out = {"jacobi_defect": jacobi_defect(job.algebra), "berwald": _berwald(job),
           "biinvariance": _biinvariance(job), "geodesic_vectors": _geodesic_vectors(job)}
    if job.vector is not None:
        out["ricci"] = _ricci(job)
        out["milnor_lemma"] = _milnor(job)
    return out


COMMANDS = {
    "geodesic-vectors": _geodesic_vectors,
    "berwald": _berwald,
    "biinvariance": _biinvariance,
    "ricci": _ricci,
    "milnor-lemma": _milnor,
    "orbit-critical": _orbit,
    "classify": _classify,
}


def run(config) -> dict:
    """Execute one job and return its report as a plain dictionary.

    ``config`` may be a raw mapping or an already parsed :class:`JobConfig`.
    """
    job = config if isinstance(config, JobConfig) else parse_config(config)
    start = time.perf_counter()
    results = COMMANDS[job.command](job)
    return {
        "command": job.command,
        "config": job.raw,
        "config_hash": job.config_hash,
        "seed": job.seed,
        "results": results,
        "warnings": list(job.warnings),
        "wall_time": time.perf_counter() - start,
    }


def reproduce_examples() -> dict:
    """Run every catalog job and compare against its expected outcome."""
    entries = []
    for entry in catalog():
        try:
            report = run(entry.config)
            diffs = check_entry(entry, to_jsonable(report["results"]))
        except (GeodesicSolverError, ConfigError) as exc:
            report, diffs = None, [f"{type(exc).__name__}: {exc}"]
        entries.append({"name": entry.name, "passed": not diffs, "diff": diffs,
                        "note": entry.note, "report": report})
    return {"command": "reproduce-examples", "entries": entries,
            "passed": all(e["passed"] for e in entries)}


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="homgeo", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p_run = sub.add_parser("run", help="run one job from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_val = sub.add_parser("validate", help="validate a JSON config without computing")
    p_val.add_argument("--config", required=True)
    p_rep = sub.add_parser("reproduce-examples", help="run the built-in example catalog")
    p_rep.add_argument("--out", default=None, help="directory for per-entry reports")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    if args.cmd == "validate":
        try:
            job = load_config(args.config)
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"ok: {job.command} on {job.algebra!r}, config hash {job.config_hash}")
        for w in job.warnings:
            print(f"warning: {w}")
        return EXIT_OK

    if args.cmd == "run":
        try:
            job = load_config(args.config)
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            report = run(job)
        except Exception as exc:  # reported with context, exit status 1
            print(f"computation failed ({job.command}): {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        _write(dumps(report), args.out or job.output)
        return EXIT_OK

    summary = reproduce_examples()
    for e in summary["entries"]:
        status = "PASS" if e["passed"] else "FAIL"
        print(f"[{status}] {e['name']}" + (f"  ({e['note']})" if e["note"] else ""))
        for d in e["diff"]:
            print(f"        {d}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for e in summary["entries"]:
            (outdir / f"{e['name']}.json").write_text(dumps(e) + "\n", encoding="utf-8")
        (outdir / "summary.json").write_text(
            dumps({"passed": summary["passed"],
                   "entries": [{k: e[k] for k in ("name", "passed", "diff", "note")}
                               for e in summary["entries"]]}) + "\n", encoding="utf-8")
    return EXIT_OK if summary["passed"] else EXIT_COMPUTE


if __name__ == "__main__":
    raise SystemExit(main())
