"""Analytic criteria: convergence, degeneracy recovery, rule tables."""
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as hst

from levyint.catalogue import build_g, build_pair, build_process, build_y
from levyint.criteria import (check_convergence, check_degenerate,
                              classify_exponential, classify_g_integral,
                              degeneracy_report)
from levyint.functionals import GDescriptor
from levyint.measures import LevyMeasure1D, ProductIndependent
from levyint.triplets import LevyTriplet1D, LevyTriplet2D, doleans_xi_from_eta

TWO_OVER_E = 0.7357588823428847  # int_e^inf log(y) / y^2 dy


def indep(xi: dict, eta: dict) -> LevyTriplet2D:
    return build_pair("independent", xi=xi, eta=eta)


def curve_pair(k: float):
    return build_pair("curve_degenerate",
                      eta={"name": "cpp", "rate": 3.0, "jump": "uniform",
                           "lo": 0.1, "hi": 0.9},
                      k=k)


# -- convergence ---------------------------------------------------------------


def test_convergence_power_tail_example():
    rep = check_convergence(indep({"name": "drift", "rate": 1.0},
                                  {"name": "power_tail", "alpha": 1.0,
                                   "mass": 1.0}))
    assert rep.verdict == "Converges"
    assert rep.xi_drifts_to_infinity == "yes"
    assert rep.eta_log_integral == pytest.approx(TWO_OVER_E, rel=1e-6)


def test_convergence_sparse_atoms_diverge():
    rep = check_convergence(indep({"name": "drift", "rate": 1.0},
                                  {"name": "sparse_log_atoms"}))
    assert rep.verdict == "Diverges"
    assert rep.eta_log_integral == math.inf


def test_convergence_negative_drift_diverges():
    rep = check_convergence(indep({"name": "drift", "rate": -1.0},
                                  {"name": "power_tail", "alpha": 1.0,
                                   "mass": 1.0}))
    assert rep.verdict == "Diverges"
    assert rep.xi_drifts_to_infinity == "no"
    assert rep.eta_log_integral is None
    assert any("skipped" in n for n in rep.notes)


def cauchy_like_xi() -> LevyMeasure1D:
    def tp(z):
        return 1.0 / np.asarray(z, dtype=float)

    return LevyMeasure1D(tail_plus=tp, tail_minus=tp, activity="infinite",
                         variation="infinite", skip_checks=True)


def test_convergence_undecidable_drift_is_inconclusive():
    eta = build_process("power_tail", alpha=3.0, mass=1.0)
    pair = LevyTriplet2D((0.0, 0.0), np.zeros((2, 2)),
                         ProductIndependent(cauchy_like_xi(), eta.measure))
    rep = check_convergence(pair)
    assert rep.verdict == "Inconclusive"
    assert rep.xi_drifts_to_infinity == "unknown"
    assert math.isfinite(rep.eta_log_integral)


def test_convergence_eta_alone_can_force_divergence():
    eta = build_process("sparse_log_atoms")
    pair = LevyTriplet2D((0.0, 0.0), np.zeros((2, 2)),
                         ProductIndependent(cauchy_like_xi(), eta.measure))
    rep = check_convergence(pair)
    assert rep.verdict == "Diverges"
    assert rep.eta_log_integral == math.inf
    assert any("forced" in n for n in rep.notes)


# -- degeneracy ----------------------------------------------------------------


def test_degeneracy_gaussian_doleans():
    pair = doleans_xi_from_eta(build_process("brownian_drift", mu=0.0,
                                             sigma2=1.0), 2.0)
    rep = degeneracy_report(pair)
    assert rep.degenerate
    assert rep.k == pytest.approx(2.0, rel=1e-12)
    assert rep.sigma_residual == 0.0
    assert rep.curve_residual == 0.0
    assert rep.claim_residual <= 1e-10


def test_degeneracy_curve_pair_recovers_k():
    for k in (1.5, -2.0):
        eta_jumps = ({"name": "cpp", "rate": 3.0, "jump": "uniform",
                      "lo": 0.1, "hi": 0.9} if k > 0 else
                     {"name": "cpp", "rate": 3.0, "jump": "uniform",
                      "lo": 0.8 * k, "hi": 0.2 * k})
        pair = build_pair("curve_degenerate", eta=eta_jumps, k=k)
        rep = check_degenerate(pair)
        assert rep is not None
        assert rep.k == pytest.approx(k, rel=1e-9)
        assert rep.claim_residual <= 1e-8


def test_degeneracy_sigma_pattern_failure():
    meas = ProductIndependent(LevyMeasure1D(), LevyMeasure1D())
    pair = LevyTriplet2D((1.0, 0.0),
                         np.asarray([[1.0, 0.5], [0.5, 1.0]]), meas)
    rep = degeneracy_report(pair)
    assert rep.failed_clause == "sigma_pattern"
    assert rep.k == pytest.approx(0.5)
    assert check_degenerate(pair) is None


def test_degeneracy_independent_jumps_have_no_curve():
    pair = indep({"name": "cpp", "rate": 1.0, "jump": "fixed", "size": 1.0},
                 {"name": "cpp", "rate": 1.0, "jump": "fixed", "size": 0.5})
    rep = degeneracy_report(pair)
    assert rep.k is None
    assert rep.failed_clause == "curve_support"


def test_degeneracy_independent_brownian_has_no_probe():
    pair = indep({"name": "brownian_drift", "mu": 1.0, "sigma2": 1.0},
                 {"name": "drift", "rate": 1.0})
    rep = degeneracy_report(pair)
    assert rep.k is None
    assert rep.failed_clause == "no_probe"


def test_degeneracy_broken_drift_identity():
    pair = curve_pair(1.5)
    bent = LevyTriplet2D((pair.gamma[0] + 0.1, pair.gamma[1]),
                         pair.sigma, pair.measure)
    rep = degeneracy_report(bent)
    assert rep.failed_clause == "drift_claim"
    assert rep.claim_residual == pytest.approx(0.1, abs=1e-7)


@settings(max_examples=15, deadline=None)
@given(k=hst.one_of(hst.floats(min_value=0.5, max_value=5.0),
                    hst.floats(min_value=-5.0, max_value=-0.5)),
       rate=hst.floats(min_value=0.5, max_value=4.0))
def test_degeneracy_round_trip_property(k, rate):
    lo, hi = (0.1 * k, 0.9 * k) if k > 0 else (0.9 * k, 0.1 * k)
    pair = build_pair("curve_degenerate",
                      eta={"name": "cpp", "rate": rate, "jump": "uniform",
                           "lo": lo, "hi": hi},
                      k=k)
    rep = check_degenerate(pair)
    assert rep is not None
    assert rep.k == pytest.approx(k, rel=1e-9)
    assert rep.claim_residual <= 1e-8


# -- exponential classifier ----------------------------------------------------


def test_classify_pure_drifts_give_the_ratio_atom():
    cls = classify_exponential(indep({"name": "drift", "rate": 2.0},
                                     {"name": "drift", "rate": 3.0}))
    assert cls.verdict == "ConstantAtom"
    assert cls.k == pytest.approx(1.5)
    assert [r.rule for r in cls.trace if r.passed][-1] == "deterministic_drift_pair"


def test_classify_degenerate_curve_gives_atom_at_k():
    cls = classify_exponential(curve_pair(1.5))
    assert cls.verdict == "ConstantAtom"
    assert cls.k == pytest.approx(1.5, rel=1e-9)
    assert any(r.rule == "degenerate_curve_pair" and r.passed for r in cls.trace)


def test_classify_spectrally_negative_gets_density():
    cls = classify_exponential(indep({"name": "brownian_drift", "mu": 1.0,
                                      "sigma2": 1.0},
                                     {"name": "drift", "rate": 1.0}))
    assert cls.verdict == "LebesgueDensity"
    assert any(r.rule == "self_decomposable_density" and r.passed
               for r in cls.trace)


def test_classify_positive_xi_jumps_fall_back_to_no_atoms():
    cls = classify_exponential(indep({"name": "cpp", "rate": 1.0,
                                      "jump": "fixed", "size": 1.0,
                                      "drift": 1.0},
                                     {"name": "power_tail", "alpha": 1.0,
                                      "mass": 1.0}))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "nondegenerate_continuous" and r.passed
               for r in cls.trace)


def test_classify_divergent_pair_is_unknown():
    cls = classify_exponential(indep({"name": "drift", "rate": -1.0},
                                     {"name": "drift", "rate": 1.0}))
    assert cls.verdict == "Unknown"
    assert cls.trace[0].rule == "convergence_gate"
    assert not cls.trace[0].passed
    assert any("Diverges" in w for w in cls.warnings)


# -- g classifier --------------------------------------------------------------

RULES = ("cpp_holding_times", "cpp_drift_flat_window", "subordinator_passage",
         "occupation_no_atoms", "regular_origin", "drift_minus_subordinator",
         "level_shift_absolute_continuity", "level_shift_no_atoms",
         "small_jump_level_shift_ac", "small_jump_level_shift_no_atoms")


def classify_g(xi, g, y=None):
    return classify_g_integral(xi, g, y if y is not None else build_y("identity"))


def test_g_trace_covers_the_rule_table_in_order():
    cls = classify_g(build_process("brownian_drift", mu=1.0, sigma2=1.0),
                     build_g("zero"))
    assert tuple(r.rule for r in cls.trace) == RULES
    assert cls.verdict == "Unknown"


def test_g_cpp_holding_times_rule():
    xi = build_process("cpp", rate=1.0, jump="fixed", size=1.0)
    cls = classify_g(xi, build_g("exp_decay", rate=1.0))
    assert cls.verdict == "LebesgueDensity"
    assert cls.trace[0].rule == "cpp_holding_times" and cls.trace[0].passed


def test_g_cpp_drift_window_rule():
    xi = build_process("cpp", rate=1.0, jump="fixed", size=1.0, drift=-2.0)
    cls = classify_g(xi, build_g("indicator", lo=0.0, hi=1.0))
    assert cls.verdict == "HasAtoms"
    assert any(r.rule == "cpp_drift_flat_window" and r.passed for r in cls.trace)


def test_g_subordinator_passage_rule():
    xi = build_process("stable_tail_alpha", alpha=0.5)
    cls = classify_g(xi, build_g("indicator", lo=0.0, hi=1.0))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "subordinator_passage" and r.passed for r in cls.trace)


def test_g_occupation_rule_infinite_variation():
    xi = build_process("brownian_drift", mu=1.0, sigma2=1.0)
    cls = classify_g(xi, build_g("bump", radius=1.0))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "occupation_no_atoms" and r.passed for r in cls.trace)


def test_g_occupation_rule_finite_variation_zero_drift():
    xi = build_process("stable_tail_alpha", alpha=0.5)
    cls = classify_g(xi, build_g("bump", radius=1.0))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "occupation_no_atoms" and r.passed for r in cls.trace)


def test_g_regular_origin_rule():
    xi = build_process("brownian_drift", mu=1.0, sigma2=1.0)
    g = GDescriptor(fn=lambda x: np.exp(-np.asarray(x, dtype=float) ** 2),
                    name="wide", positive_near_0=True)
    cls = classify_g(xi, g)
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "regular_origin" and r.passed for r in cls.trace)


def drift_minus_subordinator_xi() -> LevyTriplet1D:
    # positive drift against infinitely many small negative jumps
    def tm(m):
        return np.asarray(m, dtype=float) ** -0.5

    meas = LevyMeasure1D(tail_minus=tm, activity="infinite",
                         variation="finite", skip_checks=True)
    return LevyTriplet1D(0.5, 0.0, meas)


def test_g_drift_minus_subordinator_rule():
    g = GDescriptor(fn=lambda x: np.exp(-np.asarray(x, dtype=float) ** 2),
                    name="wide", positive_near_0=True)
    cls = classify_g(drift_minus_subordinator_xi(), g)
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "drift_minus_subordinator" and r.passed
               for r in cls.trace)


def level_shift_xi():
    return build_process("cpp", rate=1.0, jump="uniform", lo=0.5, hi=1.5,
                         drift=1.0)


def test_g_level_shift_ac_rule():
    y = build_y("subordinator",
                process={"name": "cpp", "rate": 1.0, "jump": "uniform",
                         "lo": 0.1, "hi": 1.0, "drift": 0.5},
                ac_density_nonvanishing=True)
    cls = classify_g(level_shift_xi(),
                     build_g("gaussian", width=1.0, window=(0.5, 1.5, 0.0)), y)
    assert cls.verdict == "AbsolutelyContinuous"
    assert any(r.rule == "level_shift_absolute_continuity" and r.passed
               for r in cls.trace)


def test_g_level_shift_no_atoms_rule():
    cls = classify_g(level_shift_xi(),
                     build_g("gaussian", width=1.0, window=(0.5, 1.5, 0.0)))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "level_shift_no_atoms" and r.passed for r in cls.trace)


def test_g_small_jump_ac_rule():
    y = build_y("subordinator",
                process={"name": "cpp", "rate": 1.0, "jump": "uniform",
                         "lo": 0.1, "hi": 1.0, "drift": 0.5},
                ac_density_nonvanishing=True)
    cls = classify_g(build_process("stable_tail_alpha", alpha=0.5),
                     build_g("gaussian", width=1.0), y)
    assert cls.verdict == "AbsolutelyContinuous"
    assert any(r.rule == "small_jump_level_shift_ac" and r.passed
               for r in cls.trace)


def test_g_small_jump_no_atoms_rule():
    cls = classify_g(build_process("stable_tail_alpha", alpha=0.5),
                     build_g("gaussian", width=1.0))
    assert cls.verdict == "NoAtoms"
    assert any(r.rule == "small_jump_level_shift_no_atoms" and r.passed
               for r in cls.trace)


def test_g_recurrent_warning():
    cls = classify_g(build_process("brownian_drift", mu=0.0, sigma2=1.0),
                     build_g("bump", radius=1.0))
    assert cls.verdict == "Unknown"
    assert any("recurrent" in w for w in cls.warnings)


def test_g_flag_contradictions_raise():
    with pytest.raises(ValueError, match="indicator_of"):
        classify_g(level_shift_xi(),
                   GDescriptor(fn=lambda x: np.asarray(x, dtype=float),
                               indicator_of=(0.0, 1.0)))
    with pytest.raises(ValueError, match="g0_nonzero"):
        classify_g(level_shift_xi(),
                   GDescriptor(fn=lambda x: np.zeros(np.shape(x)),
                               g0_nonzero=True))
    with pytest.raises(ValueError, match="nonneg"):
        classify_g(level_shift_xi(),
                   GDescriptor(fn=lambda x: -np.ones(np.shape(x)),
                               nonneg=True))
    with pytest.raises(ValueError, match="compact_support"):
        classify_g(level_shift_xi(),
                   GDescriptor(fn=lambda x: np.ones(np.shape(x)),
                               compact_support=(-1.0, 1.0)))


def test_g_dt_rules_require_identity_integrator():
    # with a subordinator integrator the time-process rules must not fire
    xi = build_process("cpp", rate=1.0, jump="fixed", size=1.0)
    y = build_y("subordinator",
                process={"name": "cpp", "rate": 1.0, "jump": "uniform",
                         "lo": 0.1, "hi": 1.0, "drift": 0.5})
    cls = classify_g(xi, build_g("exp_decay", rate=1.0), y)
    holding = next(r for r in cls.trace if r.rule == "cpp_holding_times")
    assert not holding.passed
