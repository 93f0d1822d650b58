"""Command line front end: classify, simulate, atoms, verify, list."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import catalogue
from .experiment import (THREADS_ENV, SpecError, analyze, build_objects,
                         load_spec, run, sample_pool)
from .functionals import SamplePool
from .quadrature import NumericsError
from .stats import detect_atoms, emit_histogram


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="levyint",
        description="Integral functionals of Levy processes: simulate pools, "
                    "classify their laws analytically, test them empirically.",
        epilog=f"Set {THREADS_ENV} to parallelise sampling across threads; "
               "pools are identical for any thread count.")
    p.add_argument("--catalogue", metavar="DIR", default=None,
                   help="directory of user density files to register")
    sub = p.add_subparsers(dest="command", required=True)

    def spec_command(name: str, summary: str) -> argparse.ArgumentParser:
        c = sub.add_parser(name, help=summary)
        c.add_argument("spec", help="experiment spec file (.toml or .json)")
        c.add_argument("--seed", type=int, default=None,
                       help="override the sampler seed in the spec")
        return c

    spec_command("classify", "analytic checks only; report on stdout")
    c = spec_command("simulate", "draw the Monte Carlo pool, write pool.csv")
    c.add_argument("--out", metavar="DIR", default=None,
                   help="artifact directory (default: spec output.dir, "
                        "else <spec>.out)")
    c = spec_command("verify", "full pipeline: classify, simulate, test")
    c.add_argument("--out", metavar="DIR", default=None,
                   help="artifact directory (default: spec output.dir, "
                        "else <spec>.out)")

    a = sub.add_parser("atoms", help="scan a pool CSV for atoms")
    a.add_argument("pool", help="pool CSV written by simulate or verify")
    a.add_argument("--resolution", type=float, default=None,
                   help="atom scan radius (default: 10x the pool's "
                        "tail tolerance from its metadata)")

    sub.add_parser("list", help="print the catalogue of built-in names")
    return p


def _default_out(args) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    spec_path = Path(args.spec)
    return spec_path.parent / (spec_path.stem + ".out")


def _cmd_classify(args) -> int:
    spec = load_spec(args.spec)
    report = {"title": spec.title, "kind": spec.kind}
    report.update(analyze(spec, build_objects(spec)))
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_simulate(args) -> int:
    spec = load_spec(args.spec)
    if args.seed is not None:
        from dataclasses import replace
        spec = replace(spec, seed=args.seed)
    pool = sample_pool(spec, build_objects(spec))
    out = spec.output_dir if args.out is None and spec.output_dir else _default_out(args)
    out.mkdir(parents=True, exist_ok=True)
    pool_path = out / "pool.csv"
    pool.save(pool_path)
    emit_histogram(pool, out / "histogram.csv", bins=spec.histogram_bins)
    partial = pool.meta.get("partial_count", 0)
    print(f"wrote {pool_path} ({pool.n} samples, {partial} partial)")
    return 0


def _cmd_atoms(args) -> int:
    pool = SamplePool.load(args.pool)
    resolution = args.resolution
    if resolution is None:
        tol = (pool.meta.get("policy") or {}).get("tail_tolerance")
        if tol is None:
            raise ValueError(
                "pool has no tolerance metadata; pass --resolution")
        resolution = 10.0 * float(tol)
    report = detect_atoms(pool, resolution)
    out = report.to_dict()
    out["resolution"] = resolution
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def _summary_lines(report: dict) -> list[str]:
    lines = []
    if report.get("title"):
        lines.append(f"title: {report['title']}")
    conv = report.get("convergence")
    if conv:
        lines.append(f"convergence: {conv['verdict']}")
    cls = report.get("classification")
    if cls:
        k = f" (k = {cls['k']:g})" if cls.get("k") is not None else ""
        lines.append(f"classification: {cls['verdict']}{k}")
    sim = report.get("simulation", {})
    if sim.get("skipped"):
        lines.append(f"simulation: skipped ({sim['reason']})")
    elif sim:
        lines.append(f"simulation: n = {sim['n']}, "
                     f"{sim['partial_count']} partial")
    atoms = report.get("atoms")
    if atoms:
        heaviest = max((c["mass_estimate"] for c in atoms["candidates"]),
                       default=0.0)
        lines.append(f"atoms: {atoms['verdict']}, "
                     f"{len(atoms['candidates'])} candidate(s), "
                     f"heaviest mass {heaviest:.4f}")
    ks = report.get("ks")
    if ks:
        word = "pass" if ks["pass"] else "FAIL"
        lines.append(f"ks[{ks['oracle']}]: p = {ks['p_value']:.4g} ({word})")
    fp = report.get("fixed_point")
    if fp:
        good = sum(1 for item in fp if item["pass"])
        lines.append(f"fixed_point: {good}/{len(fp)} pass")
    contra = report.get("contradiction", {})
    lines.append("contradiction: " + ("YES, " + contra["detail"]
                                      if contra.get("flag") else "none"))
    return lines


def _cmd_verify(args) -> int:
    out = None if getattr(args, "out", None) is None else Path(args.out)
    spec = load_spec(args.spec)
    if out is None and spec.output_dir is None:
        out = _default_out(args)
    result = run(spec, seed=args.seed, out_dir=out)
    for line in _summary_lines(result.report):
        print(line)
    if "report" in result.artifacts:
        print(f"report: {result.artifacts['report']}")
    return result.exit_code


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.catalogue:
            catalogue.load_user_dir(args.catalogue)
        if args.command == "list":
            print(catalogue.listing())
            return 0
        if args.command == "classify":
            return _cmd_classify(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "atoms":
            return _cmd_atoms(args)
        return _cmd_verify(args)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, NumericsError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
