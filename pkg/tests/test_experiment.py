"""Spec parsing, validation errors, and the run() pipeline."""
import json
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from levyint import catalogue, experiment
from levyint.experiment import (ExperimentSpec, SpecError, build_objects,
                                load_spec, parse_spec, run, sample_pool)

DEGENERATE = {
    "title": "unit constant",
    "functional": {"kind": "exponential"},
    "pair": {"name": "curve_degenerate", "k": 1.5,
             "eta": {"name": "cpp", "rate": 3.0, "jump": "uniform",
                     "lo": 0.1, "hi": 0.9}},
    "sampler": {"n": 120, "seed": 5, "tail_tolerance": 1e-8},
}

DEGENERATE_TOML = """\
title = "unit constant"

[functional]
kind = "exponential"

[pair]
name = "curve_degenerate"
k = 1.5

[pair.eta]
name = "cpp"
rate = 3.0
jump = "uniform"
lo = 0.1
hi = 0.9

[sampler]
n = 120
seed = 5
tail_tolerance = 1e-8
"""


def deep_copy(data):
    return json.loads(json.dumps(data))


# -- parsing ---------------------------------------------------------------------


def test_toml_and_json_specs_parse_identically(tmp_path):
    toml_path = tmp_path / "spec.toml"
    toml_path.write_text(DEGENERATE_TOML)
    json_path = tmp_path / "spec.json"
    json_path.write_text(json.dumps(DEGENERATE))

    a = load_spec(toml_path)
    b = load_spec(json_path)
    assert a.source == toml_path and b.source == json_path
    assert replace(a, source=None) == replace(b, source=None)


def test_parsed_spec_fields():
    spec = parse_spec(deep_copy(DEGENERATE))
    assert spec.kind == "exponential"
    assert spec.pair["name"] == "curve_degenerate"
    assert spec.n == 120 and spec.seed == 5
    assert spec.policy.tail_tolerance == 1e-8
    # default scan radius sits one order above the truncation tolerance
    assert spec.atom_resolution == pytest.approx(1e-7)
    assert replace(spec, resolution=0.25).atom_resolution == 0.25
    assert spec.classify and spec.atoms
    assert spec.fixed_point == () and spec.ks is None
    assert spec.output_dir is None


@pytest.mark.parametrize("mutate, field, fragment", [
    (lambda d: d.__setitem__("functional", {"kind": "both"}),
     "functional.kind", "must be 'exponential' or 'g'"),
    (lambda d: d.pop("functional"), "functional", "required table is missing"),
    (lambda d: d.pop("pair"), "pair", "required table is missing"),
    (lambda d: d["sampler"].__setitem__("n", 0), "sampler.n", "must be positive"),
    (lambda d: d["sampler"].__setitem__("n", 2.5),
     "sampler.n", "expected an integer"),
    (lambda d: d["sampler"].__setitem__("seed", -1),
     "sampler.seed", "must not be negative"),
    (lambda d: d["pair"].__setitem__("name", "warp_pair"),
     "pair.name", "unknown pair"),
    (lambda d: d["pair"]["eta"].__setitem__("name", "warp_drive"),
     "pair.eta.name", "unknown process"),
    (lambda d: d.__setitem__("banner", "x"), "banner", "unknown key"),
    (lambda d: d.__setitem__("g", {"name": "indicator"}),
     "g", "not used when functional.kind = 'exponential'"),
    (lambda d: d.__setitem__("analyses", {"classify": "yes"}),
     "analyses.classify", "expected true or false"),
    (lambda d: d.__setitem__("analyses", {"fixed_point": [1.0, -2.0]}),
     "analyses.fixed_point[1]", "positive time"),
    (lambda d: d.__setitem__("analyses", {"fixed_point": 1.0}),
     "analyses.fixed_point", "expected an array"),
    (lambda d: d.__setitem__("analyses", {"resolution": -0.5}),
     "analyses.resolution", "must be positive"),
    (lambda d: d.__setitem__("catalogue", {"dir": "no/such/dir"}),
     "catalogue.dir", "not a directory"),
    (lambda d: d.__setitem__("output", {"dir": 7}),
     "output.dir", "expected a directory path string"),
])
def test_spec_errors_carry_dotted_field_paths(mutate, field, fragment):
    data = deep_copy(DEGENERATE)
    mutate(data)
    with pytest.raises(SpecError) as exc:
        parse_spec(data)
    assert exc.value.field == field
    assert fragment in str(exc.value)
    assert str(exc.value).startswith(field + ":")


def test_g_spec_field_errors():
    base = {
        "functional": {"kind": "g"},
        "process": {"name": "cpp", "rate": 1.0},
        "g": {"name": "indicator", "lo": 0.0, "hi": 1.0},
    }

    data = deep_copy(base)
    data["process"]["name"] = "warp_drive"
    with pytest.raises(SpecError) as exc:
        parse_spec(data)
    assert exc.value.field == "process.name"
    assert "unknown process 'warp_drive'" in str(exc.value)
    assert "available" in str(exc.value)

    data = deep_copy(base)
    data["pair"] = {"name": "independent"}
    with pytest.raises(SpecError) as exc:
        parse_spec(data)
    assert exc.value.field == "pair"

    data = deep_copy(base)
    data["analyses"] = {"fixed_point": [1.0]}
    with pytest.raises(SpecError) as exc:
        parse_spec(data)
    assert exc.value.field == "analyses.fixed_point"
    assert "exponential" in str(exc.value)

    spec = parse_spec(deep_copy(base))
    assert spec.kind == "g"
    assert spec.y == {"name": "identity"}      # default integrator


def test_load_spec_file_errors(tmp_path):
    missing = tmp_path / "nope.toml"
    with pytest.raises(SpecError) as exc:
        load_spec(missing)
    assert exc.value.field == str(missing)
    assert "not found" in str(exc.value)

    bad_toml = tmp_path / "bad.toml"
    bad_toml.write_text("functional = {kind = ")
    with pytest.raises(SpecError) as exc:
        load_spec(bad_toml)
    assert exc.value.field == "bad.toml"
    assert "invalid TOML" in str(exc.value)

    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{not json")
    with pytest.raises(SpecError) as exc:
        load_spec(bad_json)
    assert "invalid JSON" in str(exc.value)


def test_catalogue_dir_resolves_relative_to_spec_file(tmp_path):
    cat = tmp_path / "cat"
    cat.mkdir()
    (cat / "wedge.json").write_text(json.dumps({
        "name": "wedge_user_exp", "x": [1.0, 2.0, 3.0],
        "density": [0.0, 1.0, 0.0], "drift": 0.25}))
    spec_path = tmp_path / "spec.toml"
    spec_path.write_text("""\
[catalogue]
dir = "cat"

[functional]
kind = "g"

[process]
name = "wedge_user_exp"

[g]
name = "indicator"
""")
    spec = load_spec(spec_path)
    assert spec.catalogue_dir == (tmp_path / "cat").resolve()
    objs = build_objects(spec)
    assert objs["process"].gamma == pytest.approx(0.25)   # no mass inside [-1, 1]


# -- pipeline --------------------------------------------------------------------


@pytest.fixture(scope="module")
def degenerate_result(tmp_path_factory):
    out = tmp_path_factory.mktemp("degenerate_out")
    spec = parse_spec(deep_copy(DEGENERATE))
    return run(spec, out_dir=out), out


def test_run_report_structure(degenerate_result):
    result, _ = degenerate_result
    assert result.exit_code == 0
    report = result.report
    assert set(report) >= {"title", "kind", "seed", "convergence",
                           "classification", "simulation", "atoms",
                           "contradiction"}
    assert report["title"] == "unit constant"
    assert report["kind"] == "exponential" and report["seed"] == 5
    assert report["convergence"]["verdict"] == "Converges"
    assert report["classification"]["verdict"] == "ConstantAtom"
    sim = report["simulation"]
    assert sim["skipped"] is False and sim["n"] == 120
    atoms = report["atoms"]
    assert atoms["verdict"] == "AtomsFound"
    assert len(atoms["candidates"]) == 1
    cand = atoms["candidates"][0]
    assert cand["location"] == pytest.approx(1.5, abs=1e-6)
    assert cand["mass_estimate"] == 1.0
    assert report["contradiction"]["flag"] is False
    assert "agree" in report["contradiction"]["detail"]


def test_run_writes_artifacts(degenerate_result):
    result, out = degenerate_result
    expected = {"pool": out / "pool.csv",
                "pool_meta": out / "pool.csv.meta.json",
                "histogram": out / "histogram.csv",
                "report": out / "report.json"}
    assert result.artifacts == expected
    for path in expected.values():
        assert path.is_file()
    on_disk = json.loads(expected["report"].read_text())
    assert on_disk["contradiction"]["flag"] is False
    assert set(on_disk["artifacts"]) == {"pool", "pool_meta", "histogram"}
    meta = json.loads(expected["pool_meta"].read_text())
    assert meta["n"] == 120


def test_run_skips_simulation_when_divergent():
    spec = parse_spec({
        "functional": {"kind": "exponential"},
        "pair": {"name": "independent",
                 "xi": {"name": "drift", "rate": -1.0},
                 "eta": {"name": "cpp", "rate": 1.0}},
        "sampler": {"n": 50},
    })
    result = run(spec)
    assert result.exit_code == 0
    report = result.report
    assert report["convergence"]["verdict"] == "Diverges"
    assert report["simulation"]["skipped"] is True
    assert "no finite limit" in report["simulation"]["reason"]
    assert "atoms" not in report
    assert report["contradiction"]["flag"] is False
    assert "did not both run" in report["contradiction"]["detail"]


def test_run_ks_and_fixed_point_sections():
    spec = parse_spec({
        "functional": {"kind": "exponential"},
        "pair": {"name": "independent",
                 "xi": {"name": "brownian_drift", "mu": 1.0, "sigma2": 2.0},
                 "eta": {"name": "drift", "rate": 1.0}},
        "sampler": {"n": 200, "seed": 1},
        "analyses": {"ks": {"name": "dufresne_inverse_gamma",
                            "sigma2": 2.0, "mu": 1.0},
                     "fixed_point": [1.0]},
    })
    result = run(spec)
    assert result.exit_code == 0
    ks = result.report["ks"]
    assert ks["oracle"] == "dufresne_inverse_gamma"
    assert ks["n_used"] == 200
    assert ks["p_value"] > 0.1 and ks["pass"] is True
    (fp,) = result.report["fixed_point"]
    assert fp["t"] == 1.0
    assert fp["p_value"] > 0.1 and fp["pass"] is True


def test_run_seed_override():
    spec = parse_spec(deep_copy(DEGENERATE))
    result = run(spec, seed=11)
    assert result.report["seed"] == 11


def test_contradiction_exit_code(monkeypatch):
    class Blind:
        def to_dict(self):
            return {"verdict": "NoAtomsDetected", "candidates": []}

    monkeypatch.setattr(experiment, "detect_atoms", lambda pool, res: Blind())
    result = run(parse_spec(deep_copy(DEGENERATE)))
    assert result.exit_code == 2
    flag = result.report["contradiction"]
    assert flag["flag"] is True
    assert "ConstantAtom" in flag["detail"]
    assert "NoAtomsDetected" in flag["detail"]


def test_contradiction_ignores_unknown_verdict():
    flag, detail = experiment._contradiction({
        "classification": {"verdict": "Unknown"},
        "atoms": {"verdict": "AtomsFound"},
    })
    assert flag is False and "nothing to contradict" in detail
    flag, detail = experiment._contradiction({
        "classification": {"verdict": "HasAtoms"},
        "atoms": {"verdict": "AtomsFound"},
    })
    assert flag is False and "agree" in detail
    flag, _ = experiment._contradiction({
        "classification": {"verdict": "NoAtoms"},
        "atoms": {"verdict": "AtomsFound"},
    })
    assert flag is True


# -- threaded sampling -----------------------------------------------------------


def pool_with_threads(monkeypatch, threads: int):
    monkeypatch.setenv(experiment.THREADS_ENV, str(threads))
    spec = parse_spec(deep_copy(DEGENERATE))
    spec = replace(spec, n=16, seed=9)
    return sample_pool(spec, build_objects(spec))


def test_thread_count_parsing(monkeypatch):
    monkeypatch.delenv(experiment.THREADS_ENV, raising=False)
    assert experiment.thread_count() == 1
    monkeypatch.setenv(experiment.THREADS_ENV, "4")
    assert experiment.thread_count() == 4
    monkeypatch.setenv(experiment.THREADS_ENV, "0")
    assert experiment.thread_count() == 1
    monkeypatch.setenv(experiment.THREADS_ENV, "soon")
    assert experiment.thread_count() == 1


def test_threaded_sampling_matches_serial(monkeypatch):
    serial = pool_with_threads(monkeypatch, 1)
    threaded = pool_with_threads(monkeypatch, 4)
    assert np.array_equal(serial.values, threaded.values)
    assert threaded.meta["threads"] == 4
    assert threaded.meta["n"] == 16
    assert threaded.meta["partial_count"] == serial.meta["partial_count"]
    ts, tt = serial.meta["truncation_times"], threaded.meta["truncation_times"]
    assert tt["min"] == ts["min"] and tt["max"] == ts["max"]
