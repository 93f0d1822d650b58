"""Run every bundled spec and print a one-line verdict table.

Artifacts land under --out/<spec stem>/ when --out is given; otherwise the
runs are in-memory only.  Exits 1 if any spec errors, 2 if any spec ends in
an analytic/empirical contradiction.
"""
import argparse
import sys
import time
from pathlib import Path

from levyint.experiment import SpecError, run

ROOT = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--specs", default=ROOT / "specs", type=Path,
                        help="directory of spec files (default: bundled)")
    parser.add_argument("--out", default=None, type=Path,
                        help="write per-spec artifact directories here")
    parser.add_argument("--seed", default=None, type=int,
                        help="override every spec's sampler seed")
    args = parser.parse_args(argv)

    paths = sorted(args.specs.glob("*.toml")) + sorted(args.specs.glob("*.json"))
    if not paths:
        print(f"no spec files under {args.specs}", file=sys.stderr)
        return 1

    worst = 0
    for path in paths:
        out_dir = args.out / path.stem if args.out else None
        started = time.perf_counter()
        try:
            result = run(path, seed=args.seed, out_dir=out_dir)
        except (SpecError, ValueError) as exc:
            print(f"{path.stem:24s} ERROR  {exc}")
            worst = max(worst, 1)
            continue
        elapsed = time.perf_counter() - started
        report = result.report
        conv = (report.get("convergence") or {}).get("verdict", "-")
        cls = (report.get("classification") or {}).get("verdict", "-")
        atoms = (report.get("atoms") or {}).get("verdict", "-")
        sim = report["simulation"]
        samples = "skipped" if sim.get("skipped") else f"n={sim['n']}"
        mark = "CONTRADICTION" if result.exit_code == 2 else "ok"
        print(f"{path.stem:24s} {mark:13s} conv={conv:12s} cls={cls:20s} "
              f"atoms={atoms:16s} {samples:10s} {elapsed:5.1f}s")
        worst = max(worst, result.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
