"""Named builders: registry behavior, parameter validation, user densities."""
import json
import math

import numpy as np
import pytest

from levyint.catalogue import (build_g, build_oracle, build_pair,
                               build_process, build_y, known, listing,
                               load_user_dir, resolve_process)

E_INV = 0.36787944117144233  # e^{-1}


def test_listing_mentions_core_names():
    text = listing()
    for name in ("brownian_drift", "cpp", "stable_tail_alpha",
                 "curve_degenerate", "indicator", "dufresne_inverse_gamma"):
        assert name in text


def test_known_registries():
    assert "drift" in known("process")
    assert "independent" in known("pair")
    assert "bump" in known("g")
    assert "identity" in known("y")
    assert "uniform" in known("oracle")
    with pytest.raises(ValueError):
        known("shapes")


def test_unknown_name_lists_alternatives():
    with pytest.raises(ValueError) as err:
        build_process("warp_drive")
    msg = str(err.value)
    assert "warp_drive" in msg and "available" in msg and "cpp" in msg


def test_resolve_process_accepts_both_key_spellings():
    a = resolve_process({"name": "drift", "rate": 2.0})
    b = resolve_process({"process": "drift", "rate": 2.0})
    assert a.gamma == b.gamma == 2.0
    with pytest.raises(ValueError, match="name"):
        resolve_process({"rate": 2.0})


def test_builder_parameter_validation():
    with pytest.raises(ValueError):
        build_process("cpp", rate=0.0)
    with pytest.raises(ValueError):
        build_process("cpp", jump="uniform", lo=-1.0, hi=1.0)
    with pytest.raises(ValueError):
        build_process("stable_tail_alpha", alpha=2.5)
    with pytest.raises(ValueError):
        build_process("power_tail", alpha=-1.0)
    with pytest.raises(ValueError):
        build_process("power_tail", side="sideways")
    with pytest.raises(ValueError):
        build_g("indicator", lo=1.0, hi=0.0)
    with pytest.raises(ValueError):
        build_g("bump", radius=-1.0)
    with pytest.raises(ValueError):
        build_y("power_time", p=0.0)
    with pytest.raises(ValueError):
        build_oracle("uniform", lo=1.0, hi=0.0)


def test_power_tail_sides():
    pos = build_process("power_tail", alpha=1.0, side="positive")
    neg = build_process("power_tail", alpha=1.0, side="negative")
    assert pos.measure.has_positive_part() and not pos.measure.has_negative_part()
    assert neg.measure.has_negative_part() and not neg.measure.has_positive_part()


def test_dufresne_oracle_frozen_point():
    # sigma2=2, mu=1 gives inverse-gamma(1, scale 1): cdf(x) = e^{-1/x}
    dist = build_oracle("dufresne_inverse_gamma", sigma2=2.0, mu=1.0)
    assert dist.cdf(1.0) == pytest.approx(E_INV, rel=1e-12)
    assert dist.cdf(2.0) == pytest.approx(math.exp(-0.5), rel=1e-12)


def test_truncated_exponential_oracle_caps_at_one():
    dist = build_oracle("truncated_exponential", scale=1.0, hi=1.0)
    assert dist.cdf(1.0) == pytest.approx(1.0, rel=1e-12)
    # renormalised exponential below the cap
    want = (1.0 - math.exp(-0.5)) / (1.0 - math.exp(-1.0))
    assert dist.cdf(0.5) == pytest.approx(want, rel=1e-12)


def test_exponential_oracle_frozen_point():
    dist = build_oracle("exponential", scale=2.0)
    assert dist.cdf(2.0) == pytest.approx(1.0 - E_INV, rel=1e-12)


def test_load_user_dir_registers_density(tmp_path):
    spec = {"name": "tent_user", "x": [1.0, 2.0, 3.0],
            "density": [0.0, 1.0, 0.0], "drift": 0.25}
    (tmp_path / "tent.json").write_text(json.dumps(spec))
    names = load_user_dir(tmp_path)
    assert names == ["tent_user"]
    tri = build_process("tent_user")
    # total mass 1, all above the truncation cut at |z| <= 1 except nothing
    mass = tri.measure.diffuse_tail_up(np.asarray(1.0))
    assert float(mass) == pytest.approx(1.0, rel=1e-8)
    assert "tent_user" in listing()


def test_load_user_dir_rejects_bad_tables(tmp_path):
    (tmp_path / "bad.json").write_text(json.dumps(
        {"name": "b", "x": [1.0], "density": [1.0]}))
    with pytest.raises(ValueError, match="bad.json"):
        load_user_dir(tmp_path)
    (tmp_path / "bad.json").write_text(json.dumps(
        {"name": "b", "x": [-1.0, 1.0], "density": [1.0, 1.0]}))
    with pytest.raises(ValueError, match="straddle"):
        load_user_dir(tmp_path)


def test_load_user_dir_missing_is_noop(tmp_path):
    assert load_user_dir(tmp_path / "absent") == []
    before = known("process")
    assert load_user_dir(tmp_path) == []
    assert known("process") == before
