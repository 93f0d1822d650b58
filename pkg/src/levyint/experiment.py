"""Spec-file driven experiments: load, validate, run, report.

A spec file describes one functional (an exponential pair or a g-integral),
the sampler settings, the analyses to run and where to write artifacts.
TOML is the primary encoding; the identical structure is accepted as JSON.
Validation errors carry the dotted path of the offending field.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:      # Python 3.10
    import tomli as tomllib

from . import catalogue
from .criteria import (check_convergence, classify_exponential,
                       classify_g_integral)
from .functionals import (DEFAULT_POLICY, HorizonPolicy, SamplePool,
                          sample_exponential_functional, sample_g_functional)
from .path_sim import DEFAULT_SIM, SimConfig
from .stats import detect_atoms, emit_histogram, fixed_point_test, ks_test

THREADS_ENV = "LEVYINT_THREADS"
SIGNIFICANCE = 0.01

_ATOMIC_VERDICTS = ("ConstantAtom", "HasAtoms")


class SpecError(ValueError):
    """Schema violation in a spec file; .field is the dotted path."""

    def __init__(self, field_path: str, message: str) -> None:
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


@dataclass(frozen=True)
class ExperimentSpec:
    """One validated experiment: processes, functional, sampler, analyses.

    Builder tables are kept as plain dicts ({"name": ..., params...}) so a
    spec can round-trip to TOML/JSON; objects are built at run time.
    """

    kind: str                                  # "exponential" | "g"
    pair: dict | None = None                   # exponential pair table
    process: dict | None = None                # xi table for g-integrals
    g: dict | None = None
    y: dict | None = None
    n: int = 1000
    seed: int = 0
    policy: HorizonPolicy = DEFAULT_POLICY
    sim: SimConfig = DEFAULT_SIM
    classify: bool = True
    atoms: bool = True
    resolution: float | None = None            # atom scan radius
    ks: dict | None = None                     # oracle table, optional
    fixed_point: tuple[float, ...] = ()
    output_dir: Path | None = None
    histogram_bins: int = 64
    title: str = ""
    catalogue_dir: Path | None = None
    source: Path | None = None

    @property
    def atom_resolution(self) -> float:
        # one order above the truncation tolerance: coarse enough to be
        # insensitive to horizon error, fine enough to isolate point masses
        if self.resolution is not None:
            return self.resolution
        return 10.0 * self.policy.tail_tolerance


@dataclass
class RunResult:
    exit_code: int            # 0 ok, 2 analytic/empirical contradiction
    report: dict
    artifacts: dict[str, Path] = field(default_factory=dict)


# -- parsing and validation -----------------------------------------------------


def _expect_table(data: dict, key: str, *, required: bool = False) -> dict | None:
    value = data.get(key)
    if value is None:
        if required:
            raise SpecError(key, "required table is missing")
        return None
    if not isinstance(value, dict):
        raise SpecError(key, "expected a table")
    return value


def _num(tbl: dict, base: str, key: str, default, *, integer: bool = False,
         positive: bool = False, nonneg: bool = False):
    value = tbl.get(key, default)
    path = f"{base}.{key}"
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecError(path, "expected a number")
    if integer and not isinstance(value, int):
        raise SpecError(path, "expected an integer")
    if positive and value <= 0:
        raise SpecError(path, "must be positive")
    if nonneg and value < 0:
        raise SpecError(path, "must not be negative")
    return value


def _bool(tbl: dict, base: str, key: str, default: bool) -> bool:
    value = tbl.get(key, default)
    if not isinstance(value, bool):
        raise SpecError(f"{base}.{key}", "expected true or false")
    return value


def _builder_table(data: dict, key: str, registry: str, *,
                   required: bool = False) -> dict | None:
    tbl = _expect_table(data, key, required=required)
    if tbl is None:
        return None
    name = tbl.get("name")
    if not isinstance(name, str):
        raise SpecError(f"{key}.name", "expected a catalogue name string")
    names = catalogue.known(registry)
    if name not in names:
        raise SpecError(f"{key}.name",
                        f"unknown {registry} {name!r}; "
                        f"available: {', '.join(sorted(names))}")
    for sub, value in tbl.items():
        if isinstance(value, dict):
            sub_name = value.get("name", value.get("process"))
            if not isinstance(sub_name, str):
                raise SpecError(f"{key}.{sub}.name",
                                "expected a catalogue name string")
            if sub_name not in catalogue.known("process"):
                raise SpecError(f"{key}.{sub}.name",
                                f"unknown process {sub_name!r}")
    return dict(tbl)


def load_spec(path: str | Path) -> ExperimentSpec:
    """Parse and validate a spec file; TOML by default, JSON by suffix."""
    path = Path(path)
    if not path.is_file():
        raise SpecError(str(path), "spec file not found")
    raw = path.read_text()
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise SpecError(path.name, f"invalid JSON: {exc}") from exc
    else:
        try:
            data = tomllib.loads(raw)
        except tomllib.TOMLDecodeError as exc:
            raise SpecError(path.name, f"invalid TOML: {exc}") from exc
    return parse_spec(data, source=path)


def parse_spec(data: dict, *, source: Path | None = None) -> ExperimentSpec:
    if not isinstance(data, dict):
        raise SpecError("spec", "top level must be a table")
    allowed = {"title", "functional", "pair", "process", "g", "y",
               "sampler", "analyses", "output", "catalogue"}
    for key in data:
        if key not in allowed:
            raise SpecError(key, "unknown key; expected one of "
                            + ", ".join(sorted(allowed)))

    title = data.get("title", "")
    if not isinstance(title, str):
        raise SpecError("title", "expected a string")

    cat_tbl = _expect_table(data, "catalogue")
    catalogue_dir: Path | None = None
    if cat_tbl is not None:
        loc = cat_tbl.get("dir")
        if not isinstance(loc, str):
            raise SpecError("catalogue.dir", "expected a directory path string")
        base = source.parent if source is not None else Path.cwd()
        catalogue_dir = (base / loc).resolve()
        if not catalogue_dir.is_dir():
            raise SpecError("catalogue.dir", f"not a directory: {catalogue_dir}")
        catalogue.load_user_dir(catalogue_dir)   # names resolve below

    functional = _expect_table(data, "functional", required=True)
    kind = functional.get("kind")
    if kind not in ("exponential", "g"):
        raise SpecError("functional.kind",
                        f"must be 'exponential' or 'g', got {kind!r}")

    pair = process = g_tbl = y_tbl = None
    if kind == "exponential":
        for stray in ("process", "g", "y"):
            if stray in data:
                raise SpecError(stray,
                                "not used when functional.kind = 'exponential'")
        pair = _builder_table(data, "pair", "pair", required=True)
    else:
        if "pair" in data:
            raise SpecError("pair", "not used when functional.kind = 'g'")
        process = _builder_table(data, "process", "process", required=True)
        g_tbl = _builder_table(data, "g", "g", required=True)
        y_tbl = _builder_table(data, "y", "y") or {"name": "identity"}

    sampler = _expect_table(data, "sampler") or {}
    n = _num(sampler, "sampler", "n", 1000, integer=True, positive=True)
    seed = _num(sampler, "sampler", "seed", 0, integer=True, nonneg=True)
    sim = SimConfig(
        eps=float(_num(sampler, "sampler", "epsilon", DEFAULT_SIM.eps,
                       positive=True)),
        max_step=float(_num(sampler, "sampler", "max_step",
                            DEFAULT_SIM.max_step, positive=True)),
    )
    policy = HorizonPolicy(
        tail_tolerance=float(_num(sampler, "sampler", "tail_tolerance",
                                  DEFAULT_POLICY.tail_tolerance, positive=True)),
        min_horizon=float(_num(sampler, "sampler", "min_horizon",
                               DEFAULT_POLICY.min_horizon, positive=True)),
        max_horizon=float(_num(sampler, "sampler", "max_horizon",
                               DEFAULT_POLICY.max_horizon, positive=True)),
        growth=float(_num(sampler, "sampler", "growth",
                          DEFAULT_POLICY.growth, positive=True)),
        margin_factor=float(_num(sampler, "sampler", "margin_factor",
                                 DEFAULT_POLICY.margin_factor, positive=True)),
    )

    analyses = _expect_table(data, "analyses") or {}
    do_classify = _bool(analyses, "analyses", "classify", True)
    do_atoms = _bool(analyses, "analyses", "atoms", True)
    resolution = analyses.get("resolution")
    if resolution is not None:
        resolution = float(_num(analyses, "analyses", "resolution", resolution,
                                positive=True))
    ks_tbl = None
    if "ks" in analyses:
        ks_tbl = _builder_table(analyses, "ks", "oracle", required=True)
        below = ks_tbl.get("strictly_below")
        if below is not None and (isinstance(below, bool)
                                  or not isinstance(below, (int, float))):
            raise SpecError("analyses.ks.strictly_below", "expected a number")
    fp_raw = analyses.get("fixed_point", [])
    if not isinstance(fp_raw, list):
        raise SpecError("analyses.fixed_point", "expected an array of times")
    fixed_point = []
    for i, t in enumerate(fp_raw):
        if isinstance(t, bool) or not isinstance(t, (int, float)) or t <= 0:
            raise SpecError(f"analyses.fixed_point[{i}]",
                            "expected a positive time")
        fixed_point.append(float(t))
    if fixed_point and kind != "exponential":
        raise SpecError("analyses.fixed_point",
                        "only defined for the exponential functional")

    output = _expect_table(data, "output") or {}
    out_dir = output.get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise SpecError("output.dir", "expected a directory path string")
    bins = _num(output, "output", "histogram_bins", 64, integer=True,
                positive=True)
    output_dir = None
    if out_dir is not None:
        base = source.parent if source is not None else Path.cwd()
        output_dir = (base / out_dir).resolve()

    return ExperimentSpec(
        kind=kind, pair=pair, process=process, g=g_tbl, y=y_tbl,
        n=int(n), seed=int(seed), policy=policy, sim=sim,
        classify=do_classify, atoms=do_atoms, resolution=resolution,
        ks=ks_tbl, fixed_point=tuple(fixed_point), output_dir=output_dir,
        histogram_bins=int(bins), title=title, catalogue_dir=catalogue_dir,
        source=source,
    )


# -- pipeline --------------------------------------------------------------------


def _pop_name(tbl: dict) -> tuple[str, dict]:
    params = dict(tbl)
    return params.pop("name"), params


def build_objects(spec: ExperimentSpec) -> dict:
    """Resolve every catalogue reference of a spec into live objects."""
    if spec.catalogue_dir is not None:
        catalogue.load_user_dir(spec.catalogue_dir)
    if spec.kind == "exponential":
        name, params = _pop_name(spec.pair)
        return {"pair": catalogue.build_pair(name, **params)}
    name, params = _pop_name(spec.process)
    objs = {"process": catalogue.build_process(name, **params)}
    name, params = _pop_name(spec.g)
    objs["g"] = catalogue.build_g(name, **params)
    name, params = _pop_name(spec.y)
    objs["y"] = catalogue.build_y(name, **params)
    return objs


def thread_count() -> int:
    """Worker count for data-parallel sampling, from the environment."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _merge_pools(pools: list[SamplePool], n: int, threads: int) -> SamplePool:
    values = np.sort(np.concatenate([p.values for p in pools]))
    meta = dict(pools[0].meta)
    meta["n"] = n
    meta["stream_start"] = 0
    meta["threads"] = threads
    meta["partial_count"] = int(sum(p.meta.get("partial_count", 0)
                                    for p in pools))
    summaries = [p.meta.get("truncation_times") for p in pools]
    summaries = [s for s in summaries if s]
    if summaries:
        # min and max are exact; the median is a median of chunk medians
        meta["truncation_times"] = {
            "min": min(s["min"] for s in summaries),
            "median": float(np.median([s["median"] for s in summaries])),
            "max": max(s["max"] for s in summaries),
        }
    reasons: dict[str, int] = {}
    for p in pools:
        for key, count in (p.meta.get("stop_reasons") or {}).items():
            reasons[key] = reasons.get(key, 0) + count
    if reasons:
        meta["stop_reasons"] = reasons
    return SamplePool(values=values, meta=meta)


def sample_pool(spec: ExperimentSpec, objs: dict) -> SamplePool:
    """Draw the spec's pool; sample i always uses stream (seed, i), so the
    values are byte-identical for any worker count."""
    if spec.kind == "exponential":
        def chunk(count: int, start: int) -> SamplePool:
            return sample_exponential_functional(
                objs["pair"], count, spec.policy, spec.seed,
                config=spec.sim, stream_start=start)
    else:
        def chunk(count: int, start: int) -> SamplePool:
            return sample_g_functional(
                objs["process"], objs["g"], objs["y"], count, spec.policy,
                spec.seed, config=spec.sim, stream_start=start)

    threads = thread_count()
    if threads <= 1 or spec.n < 2 * threads:
        return chunk(spec.n, 0)
    bounds = np.linspace(0, spec.n, threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(chunk, int(hi - lo), int(lo))
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        chunks = [f.result() for f in futures]
    return _merge_pools(chunks, spec.n, threads)


def analyze(spec: ExperimentSpec, objs: dict) -> dict:
    """Analytic half of the pipeline: convergence and classification."""
    report: dict = {}
    if spec.kind == "exponential":
        conv = check_convergence(objs["pair"])
        report["convergence"] = conv.to_dict()
        if spec.classify:
            report["classification"] = classify_exponential(objs["pair"]).to_dict()
    elif spec.classify:
        report["classification"] = classify_g_integral(
            objs["process"], objs["g"], objs["y"]).to_dict()
    return report


def _ks_section(spec: ExperimentSpec, pool: SamplePool) -> dict:
    name, params = _pop_name(spec.ks)
    below = params.pop("strictly_below", None)
    oracle = catalogue.build_oracle(name, **params)
    target = pool
    if below is not None:
        kept = pool.values[pool.values < float(below)]
        target = SamplePool(values=kept, meta=dict(pool.meta))
    stat, p = ks_test(target, oracle.cdf)
    out = {"oracle": name, "n_used": target.n, "statistic": stat,
           "p_value": p, "pass": bool(p > SIGNIFICANCE)}
    if below is not None:
        out["strictly_below"] = float(below)
    return out


def run(spec: ExperimentSpec | str | Path, *, seed: int | None = None,
        out_dir: str | Path | None = None) -> RunResult:
    """Full pipeline: classify analytically, simulate, test empirically.

    Exit code 0 on success, 2 when the atom detector contradicts the
    analytic verdict; errors raise and the CLI maps them to exit 1.
    """
    if not isinstance(spec, ExperimentSpec):
        spec = load_spec(spec)
    if seed is not None:
        spec = replace(spec, seed=int(seed))

    objs = build_objects(spec)
    report: dict = {
        "title": spec.title,
        "kind": spec.kind,
        "seed": spec.seed,
        "source": str(spec.source) if spec.source else None,
    }
    report.update(analyze(spec, objs))

    conv_verdict = report.get("convergence", {}).get("verdict")
    pool = None
    if spec.kind == "exponential" and conv_verdict != "Converges":
        report["simulation"] = {
            "skipped": True,
            "reason": f"convergence verdict is {conv_verdict}; "
                      "the functional has no finite limit to sample",
        }
    else:
        pool = sample_pool(spec, objs)
        report["simulation"] = {
            "skipped": False,
            "n": pool.n,
            "partial_count": pool.meta.get("partial_count", 0),
            "truncation_times": pool.meta.get("truncation_times"),
        }

    if pool is not None:
        if spec.atoms:
            report["atoms"] = detect_atoms(pool, spec.atom_resolution).to_dict()
            report["atoms"]["resolution"] = spec.atom_resolution
        if spec.ks is not None:
            report["ks"] = _ks_section(spec, pool)
        if spec.fixed_point:
            section = []
            for t in spec.fixed_point:
                p = fixed_point_test(objs["pair"], t, spec.n, spec.seed,
                                     policy=spec.policy, config=spec.sim)
                section.append({"t": t, "p_value": p,
                                "pass": bool(p > SIGNIFICANCE)})
            report["fixed_point"] = section

    flag, detail = _contradiction(report)
    report["contradiction"] = {"flag": flag, "detail": detail}

    artifacts = _write_artifacts(spec, report, pool, out_dir)
    return RunResult(exit_code=2 if flag else 0, report=report,
                     artifacts=artifacts)


def _contradiction(report: dict) -> tuple[bool, str]:
    cls = report.get("classification")
    atoms = report.get("atoms")
    if not cls or not atoms:
        return False, "classifier and detector did not both run"
    verdict = cls["verdict"]
    if verdict == "Unknown":
        return False, "no applicable analytic rule; nothing to contradict"
    expected = verdict in _ATOMIC_VERDICTS
    found = atoms["verdict"] == "AtomsFound"
    if expected == found:
        return False, (f"classifier {verdict} and detector {atoms['verdict']} "
                       "agree")
    return True, (f"classifier says {verdict} but the detector reports "
                  f"{atoms['verdict']}")


def _write_artifacts(spec: ExperimentSpec, report: dict,
                     pool: SamplePool | None,
                     out_dir: str | Path | None) -> dict[str, Path]:
    target = Path(out_dir) if out_dir is not None else spec.output_dir
    if target is None:
        return {}
    target.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, Path] = {}
    if pool is not None:
        pool_path = target / "pool.csv"
        pool.save(pool_path)
        artifacts["pool"] = pool_path
        artifacts["pool_meta"] = Path(str(pool_path) + ".meta.json")
        hist_path = target / "histogram.csv"
        emit_histogram(pool, hist_path, bins=spec.histogram_bins)
        artifacts["histogram"] = hist_path
    report_path = target / "report.json"
    report = dict(report)
    report["artifacts"] = {k: str(v) for k, v in artifacts.items()}
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    artifacts["report"] = report_path
    return artifacts
