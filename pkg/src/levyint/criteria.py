"""Analytic checkers on characteristic pairs and structural classifiers.

check_convergence decides almost-sure convergence of the exponential
integral from the characteristic data alone; check_degenerate recovers the
constant-limit parameter k when the pair is an exponential-transform image
of a single process; classify_exponential and classify_g_integral turn
structural premises into distributional verdicts, recording every premise
they evaluated in an auditable trace.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.interpolate import PchipInterpolator

from .functionals import GDescriptor, YProcessSpec
from .measures import (CurveSupported, Interval, JointAtoms, LevyMeasure1D,
                       ProductIndependent, integrate_against)
from .quadrature import DEFAULT_QUAD, NumericsError, QuadratureConfig, integrate_interval
from .triplets import (LevyTriplet1D, LevyTriplet2D, curve_ball_interval,
                       exp_residual)

Verdict = Literal["ConstantAtom", "HasAtoms", "NoAtoms",
                  "AbsolutelyContinuous", "LebesgueDensity", "Unknown"]

TOL_SIGMA = 1e-10
TOL_CURVE = 1e-9
TOL_CLAIM = 1e-8

_E = math.e


def _jsonable(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
    return x


# -- report types -------------------------------------------------------------


@dataclass(frozen=True)
class RuleCheck:
    """One evaluated rule: its premises with pass/fail and the overall result."""

    rule: str
    description: str
    premises: tuple[tuple[str, bool], ...]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "description": self.description,
            "premises": [{"statement": s, "holds": bool(h)} for s, h in self.premises],
            "passed": bool(self.passed),
        }


@dataclass(frozen=True)
class Classification:
    """Distributional verdict plus the audit trail that produced it."""

    verdict: Verdict
    k: float | None = None
    trace: tuple[RuleCheck, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.verdict != "Unknown" and not any(r.passed for r in self.trace):
            raise ValueError("non-Unknown verdict requires a fully passed rule")

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "k": _jsonable(self.k) if self.k is not None else None,
            "trace": [r.to_dict() for r in self.trace],
            "warnings": list(self.warnings),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class ConvergenceReport:
    """Outcome of the two-part convergence test for the exponential integral."""

    xi_drifts_to_infinity: Literal["yes", "no", "unknown"]
    xi_mean: float
    eta_log_integral: float | None
    verdict: Literal["Converges", "Diverges", "Inconclusive"]
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "xi_drifts_to_infinity": self.xi_drifts_to_infinity,
            "xi_mean": _jsonable(self.xi_mean),
            "eta_log_integral": (None if self.eta_log_integral is None
                                 else _jsonable(self.eta_log_integral)),
            "verdict": self.verdict,
            "notes": list(self.notes),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class DegeneracyCheck:
    """Candidate curve parameter with the three clause residuals."""

    k: float | None
    sigma_residual: float
    curve_residual: float
    claim_residual: float
    failed_clause: str | None = None

    @property
    def degenerate(self) -> bool:
        return self.failed_clause is None and self.k is not None

    def to_dict(self) -> dict:
        return {
            "k": _jsonable(self.k) if self.k is not None else None,
            "sigma_residual": _jsonable(self.sigma_residual),
            "curve_residual": _jsonable(self.curve_residual),
            "claim_residual": _jsonable(self.claim_residual),
            "failed_clause": self.failed_clause,
        }


# -- convergence --------------------------------------------------------------


def _log_normalizer(xi: LevyTriplet1D, cfg: QuadratureConfig) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised y -> 1 + int_1^y Pi_xi((z, inf)) dz on [1, 710].

    Exact for purely atomic measures; otherwise tabulated once on a graded
    grid and interpolated monotonically (the normaliser is concave
    increasing, which PCHIP preserves).
    """
    meas = xi.measure
    if meas.is_zero or not meas.has_positive_part():
        return lambda yv: np.ones_like(np.asarray(yv, dtype=float))
    diffuse = (meas.density is not None or meas.tail_plus is not None
               or meas.tail_minus is not None)
    if not diffuse:
        locs = np.asarray([loc for loc, _ in meas.atoms if loc > 0.0])
        masses = np.asarray([m for loc, m in meas.atoms if loc > 0.0])

        def exact(yv):
            yv = np.asarray(yv, dtype=float)
            seg = np.clip(np.minimum(yv[..., None], locs) - 1.0, 0.0, None)
            return 1.0 + np.sum(masses * seg, axis=-1)

        return exact

    knots = np.concatenate([[1.0], 1.0 + np.geomspace(1e-4, 709.0, 200)])
    breakpoints = sorted(loc for loc, _ in meas.atoms if loc > 1.0)
    vals = np.empty(knots.size)
    vals[0] = 1.0
    for i in range(1, knots.size):
        pts = [p for p in breakpoints if knots[i - 1] < p < knots[i]]
        inc = integrate_interval(
            lambda z: float(meas.tail_up(np.asarray(z))),
            float(knots[i - 1]), float(knots[i]), points=pts, cfg=cfg)
        vals[i] = vals[i - 1] + inc
    interp = PchipInterpolator(knots, vals, extrapolate=False)

    def tabulated(yv):
        yv = np.clip(np.asarray(yv, dtype=float), 1.0, knots[-1])
        return np.asarray(interp(yv), dtype=float)

    return tabulated


def check_convergence(triplet2: LevyTriplet2D, *,
                      cfg: QuadratureConfig = DEFAULT_QUAD) -> ConvergenceReport:
    """Decide a.s. convergence of int_0^inf e^{-xi_{s-}} d eta_s.

    Convergence holds exactly when xi drifts to +infinity and the heavy part
    of eta's jumps, damped by the log-normaliser of xi, integrates finitely.
    The drift question is answered through the mean when it exists; a mean
    that is undefined (both tails non-integrable) leaves the report
    Inconclusive unless the eta integral alone already forces divergence.
    """
    xi = triplet2.marginal_triplet(0)
    eta = triplet2.marginal_triplet(1)
    notes: list[str] = []

    try:
        mean = xi.mean
        drift = xi.drifts_to_plus_infinity()
    except NumericsError as exc:
        return ConvergenceReport("unknown", math.nan, None, "Inconclusive",
                                 (f"xi mean unresolved: {exc}",))

    if drift == "no":
        notes.append("xi does not drift to +infinity; eta tail integral skipped")
        return ConvergenceReport(drift, mean, None, "Diverges", tuple(notes))
    if drift == "unknown":
        notes.append("xi mean undefined: both jump tails are non-integrable")

    try:
        normalizer = _log_normalizer(xi, cfg)

        def damped_log(y):
            y = np.asarray(y, dtype=float)
            ly = np.log(np.abs(y))
            return ly / normalizer(ly)

        log_integral = integrate_against(
            eta.measure, damped_log,
            [Interval(-math.inf, -_E), Interval(_E, math.inf)], cfg=cfg)
    except NumericsError as exc:
        notes.append(f"eta tail integral unresolved: {exc}")
        return ConvergenceReport(drift, mean, None, "Inconclusive", tuple(notes))

    if math.isinf(log_integral):
        if drift == "unknown":
            notes.append("divergence forced by the eta integral alone")
        return ConvergenceReport(drift, mean, log_integral, "Diverges", tuple(notes))
    if drift == "yes":
        return ConvergenceReport(drift, mean, log_integral, "Converges", tuple(notes))
    return ConvergenceReport(drift, mean, log_integral, "Inconclusive", tuple(notes))


# -- degeneracy ---------------------------------------------------------------


def _candidate_k(triplet2: LevyTriplet2D) -> tuple[float | None, str | None]:
    # k = 0 can never satisfy the drift identity (it divides by k), so a
    # zero reading is treated as "this probe sees no curve" rather than a
    # candidate; eta-independent-of-xi pairs land here.
    sigma = triplet2.sigma
    if sigma[0][0] > 0.0 and sigma[0][1] != 0.0:
        return sigma[0][1] / sigma[0][0], None
    meas = triplet2.measure
    if isinstance(meas, CurveSupported) and not meas.is_zero and meas.k != 0.0:
        return meas.k, None
    if not meas.is_zero and not isinstance(meas, CurveSupported):
        probes = meas.support_probes(24)
        for x, y in probes:
            denom = -math.expm1(-x)
            if abs(denom) > 1e-12:
                k = y / denom
                if k != 0.0 and math.isfinite(k):
                    return k, None
        return None, "curve_support"
    return None, "no_probe"


def _claim_integral(meas, k: float, cfg: QuadratureConfig) -> float:
    """int over the unit ball of (e^{-x} - 1 + x) against the jump measure,
    read off the curve parametrisation."""
    if meas.is_zero:
        return 0.0
    if isinstance(meas, JointAtoms):
        tot = 0.0
        for (x, y), mass in meas.atoms:
            if math.hypot(x, y) <= 1.0:
                tot += float(exp_residual(x)) * mass
        return tot
    if isinstance(meas, CurveSupported):
        x_lo, x_hi = curve_ball_interval(k)
        return integrate_against(
            meas.base, exp_residual,
            Interval(x_lo, x_hi, closed_lo=True, closed_hi=True), cfg=cfg)
    raise NumericsError("claim integral needs curve-compatible support")


def degeneracy_report(triplet2: LevyTriplet2D, *,
                      tol_sigma: float = TOL_SIGMA,
                      tol_curve: float = TOL_CURVE,
                      tol_claim: float = TOL_CLAIM,
                      cfg: QuadratureConfig = DEFAULT_QUAD) -> DegeneracyCheck:
    """Evaluate the three degeneracy clauses, stopping at the first failure.

    Clause order: (a) the Gaussian block carries the rank-one pattern
    sigma^2 [[1, k], [k, k^2]]; (b) all jump mass sits on the curve
    y = k(1 - e^{-x}); (c) the drift identity
    gamma_1 - gamma_2/k = sigma^2/2 + int_ball (e^{-x} - 1 + x) dPi holds.
    """
    k, failure = _candidate_k(triplet2)
    if k is None:
        return DegeneracyCheck(None, math.nan, math.nan, math.nan, failure)

    sigma = np.asarray(triplet2.sigma, dtype=float)
    s2 = float(sigma[0, 0])
    pattern = s2 * np.array([[1.0, k], [k, k * k]])
    sigma_res = float(np.max(np.abs(sigma - pattern)))
    if sigma_res > tol_sigma:
        return DegeneracyCheck(k, sigma_res, math.nan, math.nan, "sigma_pattern")

    meas = triplet2.measure
    curve_res = 0.0
    if not meas.is_zero:
        probes = np.asarray(meas.support_probes(48), dtype=float)
        if probes.size:
            xs, ys = probes[:, 0], probes[:, 1]
            curve_res = float(np.max(np.abs(ys - k * (-np.expm1(-xs)))))
    if curve_res > tol_curve:
        return DegeneracyCheck(k, sigma_res, curve_res, math.nan, "curve_support")

    try:
        ball = _claim_integral(meas, k, cfg)
    except NumericsError:
        return DegeneracyCheck(k, sigma_res, curve_res, math.nan, "drift_claim")
    g1, g2 = triplet2.gamma
    claim_res = abs(g1 - g2 / k - 0.5 * s2 - ball)
    if not claim_res <= tol_claim:
        return DegeneracyCheck(k, sigma_res, curve_res, claim_res, "drift_claim")
    return DegeneracyCheck(k, sigma_res, curve_res, claim_res, None)


def check_degenerate(triplet2: LevyTriplet2D, *,
                     cfg: QuadratureConfig = DEFAULT_QUAD) -> DegeneracyCheck | None:
    """The recovered curve parameter with residuals, or None when any clause fails."""
    report = degeneracy_report(triplet2, cfg=cfg)
    return report if report.degenerate else None


# -- exponential-integral classifier ------------------------------------------


def classify_exponential(triplet2: LevyTriplet2D, *,
                         cfg: QuadratureConfig = DEFAULT_QUAD) -> Classification:
    """Classify the law of the converged exponential integral.

    Rule order: a deterministic drift pair or an exponential-transform image
    collapses to a point mass; any other convergent pair is continuous; a
    spectrally negative xi with a log-integrable eta tail upgrades the
    verdict to a genuine Lebesgue density (self-decomposable limit law).
    """
    trace: list[RuleCheck] = []
    warnings: list[str] = []

    conv = check_convergence(triplet2, cfg=cfg)
    gate = RuleCheck(
        "convergence_gate",
        "the exponential integral converges almost surely",
        (("drift of xi to +infinity is established", conv.xi_drifts_to_infinity == "yes"),
         ("damped log tail integral of eta is finite",
          conv.eta_log_integral is not None and math.isfinite(conv.eta_log_integral))),
        conv.verdict == "Converges")
    trace.append(gate)
    if conv.verdict != "Converges":
        warnings.append(f"convergence check returned {conv.verdict}")
        warnings.extend(conv.notes)
        return Classification("Unknown", None, tuple(trace), tuple(warnings))

    sigma = np.asarray(triplet2.sigma, dtype=float)
    g1, g2 = triplet2.gamma
    pure_drift = bool(np.all(sigma == 0.0)) and triplet2.measure.is_zero
    drift_rule = RuleCheck(
        "deterministic_drift_pair",
        "both components are deterministic drifts, so the integral is the "
        "constant gamma_2/gamma_1",
        (("no Gaussian part and no jumps", pure_drift),
         ("xi drift is nonzero", g1 != 0.0)),
        pure_drift and g1 != 0.0)
    trace.append(drift_rule)
    if drift_rule.passed:
        return Classification("ConstantAtom", g2 / g1, tuple(trace), tuple(warnings))

    probe = degeneracy_report(triplet2, cfg=cfg)
    degen_rule = RuleCheck(
        "degenerate_curve_pair",
        "eta is the exponential-transform image of xi with parameter k, so "
        "the integral is the constant k",
        (("a candidate curve parameter exists", probe.k is not None),
         ("Gaussian block has the rank-one pattern",
          probe.failed_clause not in ("sigma_pattern",) and probe.k is not None),
         ("jump support lies on the curve y = k(1 - e^{-x})",
          probe.k is not None and probe.failed_clause not in ("sigma_pattern", "curve_support")),
         ("drift identity holds", probe.degenerate)),
        probe.degenerate)
    trace.append(degen_rule)
    if degen_rule.passed:
        return Classification("ConstantAtom", probe.k, tuple(trace), tuple(warnings))

    continuous_rule = RuleCheck(
        "nondegenerate_continuous",
        "a convergent integral that is not almost surely constant has a "
        "continuous distribution",
        (("pair is not a deterministic drift pair", not drift_rule.passed),
         ("pair is not an exponential-transform image", not probe.degenerate)),
        True)
    trace.append(continuous_rule)

    xi = triplet2.marginal_triplet(0)
    spectrally_negative = not xi.has_positive_jumps()
    log_tail_finite = (conv.eta_log_integral is not None
                       and math.isfinite(conv.eta_log_integral))
    density_rule = RuleCheck(
        "self_decomposable_density",
        "with no positive xi jumps the limit law is self-decomposable, hence "
        "unimodal with a Lebesgue density",
        (("xi has no positive jumps", spectrally_negative),
         ("log tail integral of eta is finite", log_tail_finite)),
        spectrally_negative and log_tail_finite)
    trace.append(density_rule)
    if density_rule.passed:
        return Classification("LebesgueDensity", None, tuple(trace), tuple(warnings))
    return Classification("NoAtoms", None, tuple(trace), tuple(warnings))


# -- g-integral classifier -----------------------------------------------------


def _flag_error(name: str, detail: str) -> ValueError:
    return ValueError(f"declared g-flag {name!r} contradicts the function: {detail}")


def _spot_check_flags(g: GDescriptor) -> None:
    """Numeric spot checks of the declared flags; contradictions are errors."""
    if g.indicator_of is not None:
        lo, hi = g.indicator_of
        if not lo < hi:
            raise _flag_error("indicator_of", "empty interval")
        span = hi - lo
        inside = np.asarray([lo + 0.25 * span, lo + 0.5 * span, lo + 0.75 * span])
        if np.max(np.abs(g(inside) - 1.0)) > 1e-9:
            raise _flag_error("indicator_of", "g is not 1 inside the interval")
        outside = np.asarray([hi + 0.05 * span, hi + 1.0, lo - 0.05 * span, lo - 1.0])
        if np.max(np.abs(g(outside))) > 1e-12:
            raise _flag_error("indicator_of", "g does not vanish outside")
    if g.compact_support is not None:
        a, b = g.compact_support
        if not a < b:
            raise _flag_error("compact_support", "empty interval")
        gap = 0.05 * (b - a)
        outside = np.asarray([a - gap, a - 1.0, b + gap, b + 1.0])
        if np.max(np.abs(g(outside))) > 1e-12:
            raise _flag_error("compact_support", "g does not vanish outside")
    if g.g0_nonzero and float(g(0.0)) == 0.0:
        raise _flag_error("g0_nonzero", "g(0) = 0")
    if g.support_interior_contains_0 and g.compact_support is not None:
        a, b = g.compact_support
        if not a < 0.0 < b:
            raise _flag_error("support_interior_contains_0",
                              "support interval does not straddle 0")
    if g.nonneg:
        a, b = g.compact_support if g.compact_support is not None else (-10.0, 10.0)
        grid = np.linspace(a, b, 64)
        if float(np.min(g(grid))) < -1e-12:
            raise _flag_error("nonneg", "g takes negative values")
    if g.positive_on_interior:
        if g.compact_support is None:
            raise _flag_error("positive_on_interior",
                              "needs a declared compact support")
        a, b = g.compact_support
        pad = 0.02 * (b - a)
        grid = np.linspace(a + pad, b - pad, 17)
        if float(np.min(g(grid))) <= 0.0:
            raise _flag_error("positive_on_interior", "g is not positive inside")
    if g.positive_near_0:
        probes = np.asarray([1e-8, -1e-8, 1e-7, -1e-7])
        if float(np.min(g(probes))) <= 0.0:
            raise _flag_error("positive_near_0", "g is not positive near 0")
    if g.strictly_monotone_near_0:
        radius = g.level_set_near_0 if g.level_set_near_0 else 1e-4
        grid = np.linspace(-radius, radius, 33)
        diffs = np.diff(g(grid))
        if not (np.all(diffs > 0.0) or np.all(diffs < 0.0)):
            raise _flag_error("strictly_monotone_near_0",
                              "g is not strictly monotone near 0")
    if g.level_set_window is not None:
        j_lo, j_hi, t0 = g.level_set_window
        if not j_lo < j_hi:
            raise _flag_error("level_set_window", "empty jump window")
        span = 4.0
        if g.compact_support is not None:
            span = max(span, g.compact_support[1] - t0 + 2.0)
        _overlay_check(g, "level_set_window",
                       j_lo + (j_hi - j_lo) * (np.arange(64) + 0.5) / 64.0,
                       t0, span)
    if g.level_set_near_0 is not None and not g.strictly_monotone_near_0:
        eps = g.level_set_near_0
        if not 0.0 < eps:
            raise _flag_error("level_set_near_0", "radius must be positive")
        zs = np.concatenate([eps * (np.arange(32) + 0.5) / 32.0,
                             -eps * (np.arange(32) + 0.5) / 32.0])
        _overlay_check(g, "level_set_near_0", zs, 0.0, 1.0)


def _overlay_check(g: GDescriptor, flag: str, zs: np.ndarray,
                   t0: float, span: float) -> None:
    # shifted copies of g must differ on essentially all of the window
    ts = t0 + np.linspace(0.0, span, 257)
    base = g(ts)
    for z in zs:
        frac = float(np.mean(g(ts + z) == base))
        if frac > 0.01:
            raise _flag_error(flag,
                              f"g(t + {z:.6g}) agrees with g(t) on "
                              f"{100 * frac:.1f}% of the checked window")


def _region_mass(measure: LevyMeasure1D, iv: Interval,
                 cfg: QuadratureConfig) -> float:
    return integrate_against(measure, lambda z: np.ones_like(np.asarray(z, dtype=float)),
                             iv, cfg=cfg)


def _drift_is_zero(triplet: LevyTriplet1D) -> bool:
    # drift_bv carries quadrature error for diffuse measures; one order above
    # the relative integration tolerance separates "zero" from "chosen drift"
    d = triplet.drift_bv
    return d is not None and abs(d) <= 1e-7 * max(1.0, abs(triplet.gamma))


def classify_g_integral(triplet: LevyTriplet1D, g: GDescriptor, y: YProcessSpec, *,
                        cfg: QuadratureConfig = DEFAULT_QUAD) -> Classification:
    """Classify the law of int_0^inf g(xi_{t-}) dY_t, first matching rule wins.

    Finiteness of the integral is the caller's assertion; the report only
    warns when the transience check cannot back it up.
    """
    _spot_check_flags(g)

    warnings: list[str] = []
    transient = triplet.is_transient()
    if transient == "no":
        warnings.append("xi is recurrent by the zero-mean test; the integral "
                        "may fail to be finite")
    elif transient == "unknown":
        warnings.append("transience undecided (mean undefined); finiteness "
                        "rests on the caller's assertion")

    trace: list[RuleCheck] = []
    time_integrator = y.kind == "identity"
    drift = triplet.drift_bv
    zero_drift = _drift_is_zero(triplet)
    finite_activity = not triplet.infinite_activity
    has_jumps = not triplet.measure.is_zero

    def conclude(verdict: Verdict) -> Classification:
        return Classification(verdict, None, tuple(trace), tuple(warnings))

    # holding times of a driftless compound Poisson path are exponential,
    # and the very first one enters the integral scaled by g(0)
    is_cpp = triplet.sigma2 == 0.0 and finite_activity and has_jumps
    rule = RuleCheck(
        "cpp_holding_times",
        "a driftless compound Poisson xi spends an exponential holding time "
        "at 0 weighted by g(0), which smooths the law",
        (("xi is compound Poisson without drift", is_cpp and zero_drift),
         ("g(0) is nonzero", g.g0_nonzero),
         ("integrator is the time process", time_integrator)),
        is_cpp and zero_drift and g.g0_nonzero and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("LebesgueDensity")

    rule = RuleCheck(
        "cpp_drift_flat_window",
        "between jumps a compound Poisson path with drift traverses the "
        "support of g deterministically, leaving point masses",
        (("xi is compound Poisson with nonzero drift",
          is_cpp and drift is not None and not zero_drift),
         ("xi drifts to plus or minus infinity", transient == "yes"),
         ("g is integrable with compact support",
          g.integrable and g.compact_support is not None),
         ("integrator is the time process", time_integrator)),
        is_cpp and drift is not None and not zero_drift and transient == "yes"
        and g.integrable and g.compact_support is not None and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("HasAtoms")

    indicator_from_0 = (g.indicator_of is not None
                        and g.indicator_of[0] == 0.0 and g.indicator_of[1] > 0.0)
    rule = RuleCheck(
        "subordinator_passage",
        "for an increasing xi the integral is the passage time across the "
        "indicator level, which has a continuous law",
        (("xi is a subordinator", triplet.is_subordinator()),
         ("jump measure is infinite or the drift is zero",
          triplet.infinite_activity or zero_drift),
         ("g is the indicator of an interval [0, x]", indicator_from_0),
         ("integrator is the time process", time_integrator)),
        triplet.is_subordinator()
        and (triplet.infinite_activity or zero_drift)
        and indicator_from_0 and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    shape_ok = (g.nonneg and g.compact_support is not None
                and g.support_interior_contains_0 and g.positive_on_interior)
    case_iv = triplet.infinite_variation and g.boundary == "finite"
    case_fv = (not triplet.infinite_variation and zero_drift
               and g.boundary in ("finite", "countable"))
    rule = RuleCheck(
        "occupation_no_atoms",
        "the integral is an occupation-type functional of a transient path; "
        "the support boundary is too small to carry mass",
        (("xi is transient", transient == "yes"),
         ("g is nonnegative, compactly supported around 0 and positive inside",
          shape_ok),
         ("path regularity matches the boundary size", case_iv or case_fv),
         ("integrator is the time process", time_integrator)),
        transient == "yes" and shape_ok and (case_iv or case_fv) and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    origin_regular = (triplet.sigma2 > 0.0
                      or (triplet.infinite_variation
                          and not triplet.has_positive_jumps()))
    rule = RuleCheck(
        "regular_origin",
        "when 0 is regular for itself the occupation weight near the start "
        "has a diffuse law",
        (("xi is transient", transient == "yes"),
         ("origin is regular for itself (Gaussian part, or infinite "
          "variation without positive jumps)", origin_regular),
         ("g is positive near 0", g.positive_near_0),
         ("integrator is the time process", time_integrator)),
        transient == "yes" and origin_regular and g.positive_near_0
        and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    drift_minus_sub = (triplet.sigma2 == 0.0
                       and not triplet.has_positive_jumps()
                       and triplet.has_negative_jumps()
                       and triplet.infinite_activity
                       and not triplet.infinite_variation
                       and drift is not None and drift > 0.0)
    rule = RuleCheck(
        "drift_minus_subordinator",
        "a positive drift minus a driftless subordinator with infinite jump "
        "measure creeps without lattice structure",
        (("xi is a positive drift minus a driftless infinite-activity "
          "subordinator", drift_minus_sub),
         ("drift differs from the mean jump rate", transient == "yes"),
         ("g is positive near 0", g.positive_near_0),
         ("integrator is the time process", time_integrator)),
        drift_minus_sub and transient == "yes" and g.positive_near_0
        and time_integrator)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    window_declared = g.level_set_window is not None
    window_mass = 0.0
    if window_declared:
        j_lo, j_hi, _ = g.level_set_window
        try:
            window_mass = _region_mass(triplet.measure, Interval(j_lo, j_hi), cfg)
        except NumericsError:
            window_mass = math.inf
    level_base = (("xi is transient", transient == "yes"),
                  ("g level sets shift nondegenerately over the jump window",
                   window_declared),
                  ("the jump window carries positive xi measure", window_mass > 0.0))
    level_ok = transient == "yes" and window_declared and window_mass > 0.0

    rule = RuleCheck(
        "level_shift_absolute_continuity",
        "jumps in the window move g off its level sets and the integrator "
        "spreads the shift with a nonvanishing density",
        level_base + (("integrator has a nonvanishing density", y.ac_density_nonvanishing),),
        level_ok and y.ac_density_nonvanishing)
    trace.append(rule)
    if rule.passed:
        return conclude("AbsolutelyContinuous")

    rule = RuleCheck(
        "level_shift_no_atoms",
        "jumps in the window move g off its level sets along a strictly "
        "increasing integrator",
        level_base + (("integrator is strictly increasing", bool(y.strictly_increasing)),
                      ("g has countably many discontinuities",
                       g.countable_discontinuities)),
        level_ok and bool(y.strictly_increasing) and g.countable_discontinuities)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    near0 = g.level_set_near_0 is not None or g.strictly_monotone_near_0
    small_base = (("jump measure of xi is infinite", triplet.infinite_activity),
                  ("g level sets shift nondegenerately near 0", near0))
    small_ok = triplet.infinite_activity and near0

    rule = RuleCheck(
        "small_jump_level_shift_ac",
        "infinitely many small jumps move g off its level sets and the "
        "integrator spreads the shift with a nonvanishing density",
        small_base + (("integrator has a nonvanishing density", y.ac_density_nonvanishing),),
        small_ok and y.ac_density_nonvanishing)
    trace.append(rule)
    if rule.passed:
        return conclude("AbsolutelyContinuous")

    rule = RuleCheck(
        "small_jump_level_shift_no_atoms",
        "infinitely many small jumps move g off its level sets along a "
        "strictly increasing integrator",
        small_base + (("integrator is strictly increasing", bool(y.strictly_increasing)),
                      ("g has countably many discontinuities",
                       g.countable_discontinuities)),
        small_ok and bool(y.strictly_increasing) and g.countable_discontinuities)
    trace.append(rule)
    if rule.passed:
        return conclude("NoAtoms")

    return conclude("Unknown")
