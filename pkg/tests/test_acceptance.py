"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Every test prints "[criterion N] <name>: PASS/FAIL (<detail>)" before
asserting, so the -rA summary doubles as the acceptance report.  Runtime
budgets are part of the criteria and are asserted alongside the substance.
"""
import time
from pathlib import Path

import numpy as np

from levyint.catalogue import (build_g, build_oracle, build_pair,
                               build_process, build_y, known)
from levyint.criteria import (check_convergence, classify_g_integral,
                              degeneracy_report)
from levyint.experiment import parse_spec, run
from levyint.functionals import (HorizonPolicy, SamplePool,
                                 sample_exponential_functional,
                                 sample_g_functional)
from levyint.path_sim import SimConfig
from levyint.stats import detect_atoms, fixed_point_test, ks_test

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"
SIGNIFICANCE = 0.01


def _report(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_degenerate_constant():
    start = time.perf_counter()
    pair = build_pair("curve_degenerate", k=1.0,
                      eta={"name": "cpp", "rate": 1.0, "jump": "uniform",
                           "lo": 0.0, "hi": 0.5})
    policy = HorizonPolicy(tail_tolerance=1e-8)
    pool = sample_exponential_functional(pair, 1000, policy, seed=0)
    worst = float(np.max(np.abs(pool.values - 1.0)))
    atoms = detect_atoms(pool, resolution=1e-7)
    elapsed = time.perf_counter() - start
    ok = (worst <= 1e-3
          and atoms.verdict == "AtomsFound"
          and len(atoms.candidates) == 1
          and atoms.candidates[0].mass_estimate == 1.0
          and elapsed < 30.0)
    _report(1, "degenerate pair collapses to the constant 1", ok,
            f"max |v-1| = {worst:.2e}, atoms = {len(atoms.candidates)} "
            f"with mass {atoms.candidates[0].mass_estimate:.3f}, "
            f"{elapsed:.1f}s")


def test_criterion_2_degeneracy_round_trip():
    start = time.perf_counter()
    rng = np.random.default_rng(20260814)
    worst_k, worst_claim = 0.0, 0.0
    for _ in range(50):
        k = float(rng.uniform(0.1, 5.0) * rng.choice([-1.0, 1.0]))
        rate = float(rng.uniform(0.5, 4.0))
        lo, hi = (0.1 * k, 0.9 * k) if k > 0 else (0.8 * k, 0.2 * k)
        pair = build_pair("curve_degenerate", k=k,
                          eta={"name": "cpp", "rate": rate, "jump": "uniform",
                               "lo": lo, "hi": hi})
        rep = degeneracy_report(pair)
        assert rep.degenerate, f"clause {rep.failed_clause} failed at k={k}"
        worst_k = max(worst_k, abs(rep.k - k) / abs(k))
        worst_claim = max(worst_claim, rep.claim_residual)
    elapsed = time.perf_counter() - start
    ok = worst_k <= 1e-9 and worst_claim <= 1e-8 and elapsed < 10.0
    _report(2, "curve parameter recovery over 50 randomized pairs", ok,
            f"max rel k error = {worst_k:.2e}, "
            f"max drift-claim residual = {worst_claim:.2e}, {elapsed:.1f}s")


def test_criterion_3_drifting_cpp_over_flat_window():
    start = time.perf_counter()
    xi = build_process("cpp", rate=1.0, jump="fixed", size=1.0, drift=1.0)
    g = build_g("indicator", lo=0.0, hi=1.0)
    pool = sample_g_functional(xi, g, build_y("identity"), 10_000,
                               HorizonPolicy(), seed=0)
    atoms = detect_atoms(pool, resolution=1e-6)
    at_one = [c for c in atoms.candidates if abs(c.location - 1.0) <= 1e-5]
    mass = at_one[0].mass_estimate if at_one else 0.0
    below = pool.values[pool.values < 1.0 - 1e-9]
    sub_pool = SamplePool(values=below, meta=dict(pool.meta))
    oracle = build_oracle("truncated_exponential", scale=1.0, hi=1.0)
    stat, p = ks_test(sub_pool, oracle.cdf)
    elapsed = time.perf_counter() - start
    ok = (abs(mass - 0.3679) <= 0.015 and p > SIGNIFICANCE and elapsed < 60.0)
    _report(3, "occupation of [0,1] is min(first jump, 1)", ok,
            f"atom mass at 1 = {mass:.4f} (target 0.3679 +- 0.015), "
            f"sub-1 KS p = {p:.3f}, {elapsed:.1f}s")


def test_criterion_4_stable_passage_time_has_no_atoms():
    start = time.perf_counter()
    spec = parse_spec({
        "functional": {"kind": "g"},
        "process": {"name": "stable_tail_alpha", "alpha": 0.5},
        "g": {"name": "indicator", "lo": 0.0, "hi": 1.0},
        "sampler": {"n": 10_000, "seed": 0,
                    "epsilon": 0.01, "max_step": 0.02},
    })
    result = run(spec)
    report = result.report
    rules = [r["rule"] for r in report["classification"]["trace"]
             if r["passed"]]
    elapsed = time.perf_counter() - start
    ok = (report["atoms"]["verdict"] == "NoAtomsDetected"
          and report["classification"]["verdict"] == "NoAtoms"
          and "subordinator_passage" in rules
          and result.exit_code == 0
          and elapsed < 120.0)
    _report(4, "stable subordinator passage time shows no atoms", ok,
            f"detector = {report['atoms']['verdict']}, classifier = "
            f"{report['classification']['verdict']} via {rules}, "
            f"exit = {result.exit_code}, {elapsed:.1f}s")


def test_criterion_5_dufresne_oracle():
    start = time.perf_counter()
    pair = build_pair("independent",
                      xi={"name": "brownian_drift", "mu": 1.0, "sigma2": 2.0},
                      eta={"name": "drift", "rate": 1.0})
    oracle = build_oracle("dufresne_inverse_gamma", sigma2=2.0, mu=1.0)
    p_values = []
    for seed in range(5):
        pool = sample_exponential_functional(pair, 10_000, HorizonPolicy(),
                                             seed=seed)
        p_values.append(ks_test(pool, oracle.cdf)[1])
    passes = sum(1 for p in p_values if p > SIGNIFICANCE)
    elapsed = time.perf_counter() - start
    ok = passes >= 3 and elapsed < 300.0
    _report(5, "Brownian exponential functional matches inverse gamma", ok,
            f"KS p > 0.01 on {passes}/5 seeds "
            f"(p = {', '.join(f'{p:.3f}' for p in p_values)}), {elapsed:.1f}s")


def test_criterion_6_convergence_checker_trio():
    start = time.perf_counter()
    two_over_e = 2.0 / np.e

    conv1 = check_convergence(build_pair(
        "independent", xi={"name": "drift", "rate": 1.0},
        eta={"name": "power_tail", "alpha": 1.0}))
    conv2 = check_convergence(build_pair(
        "independent", xi={"name": "drift", "rate": 1.0},
        eta={"name": "sparse_log_atoms"}))
    conv3 = check_convergence(build_pair(
        "independent", xi={"name": "drift", "rate": -1.0},
        eta={"name": "power_tail", "alpha": 1.0}))

    integral_err = abs(conv1.eta_log_integral - two_over_e)
    elapsed = time.perf_counter() - start
    ok = (conv1.verdict == "Converges" and integral_err <= 1e-6
          and conv2.verdict == "Diverges"
          and np.isinf(conv2.eta_log_integral)
          and conv3.verdict == "Diverges"
          and elapsed < 1.0)
    _report(6, "convergence trio: Converges / Diverges / Diverges", ok,
            f"verdicts = {conv1.verdict}/{conv2.verdict}/{conv3.verdict}, "
            f"|integral - 2/e| = {integral_err:.1e}, {elapsed:.2f}s")


def test_criterion_7_fixed_point_identity():
    start = time.perf_counter()
    pair = build_pair("independent",
                      xi={"name": "brownian_drift", "mu": 1.0, "sigma2": 2.0},
                      eta={"name": "drift", "rate": 1.0})
    outcomes = []
    for t in (0.5, 1.0, 2.0):
        for seed in range(3):
            p = fixed_point_test(pair, t, 10_000, seed)
            outcomes.append((t, seed, p))
    passes = sum(1 for _, _, p in outcomes if p > SIGNIFICANCE)
    elapsed = time.perf_counter() - start
    ok = passes >= 8 and elapsed < 300.0
    detail = ", ".join(f"t={t:g}/s{seed}: {p:.3f}" for t, seed, p in outcomes)
    _report(7, "law equals head plus discounted fresh copy", ok,
            f"{passes}/9 pass ({detail}), {elapsed:.0f}s")


def test_criterion_8_corpus_never_contradicts():
    start = time.perf_counter()
    spec_paths = sorted(SPEC_DIR.glob("*.toml"))
    assert len(spec_paths) >= 10, "bundled corpus is too small"
    exits = {}
    fired = set()
    for path in spec_paths:
        result = run(path)
        exits[path.stem] = result.exit_code
        cls = result.report.get("classification")
        if cls:
            fired.update(r["rule"] for r in cls["trace"] if r["passed"])
    required = {"cpp_holding_times", "cpp_drift_flat_window",
                "subordinator_passage", "occupation_no_atoms",
                "small_jump_level_shift_ac"}
    missing = required - fired
    contradicted = [name for name, code in exits.items() if code == 2]
    elapsed = time.perf_counter() - start
    ok = not contradicted and not missing and elapsed < 900.0
    _report(8, "verify exits cleanly across the bundled corpus", ok,
            f"{len(spec_paths)} specs, exit codes "
            f"{sorted(set(exits.values()))}, contradictions = "
            f"{contradicted or 'none'}, rules missing = "
            f"{missing or 'none'}, {elapsed:.0f}s")
