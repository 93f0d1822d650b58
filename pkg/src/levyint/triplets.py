"""Characteristic triplets and the structural operations built on them.

Triplets use the truncation function 1_{|z| <= 1}; for bivariate triplets
|z| is the Euclidean norm on R^2, so marginalising a bivariate triplet
requires a drift correction between the two truncation conventions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from .measures import (
    EMPTY_MEASURE,
    CurveSupported,
    Interval,
    JointAtoms,
    LevyMeasure1D,
    LevyMeasure2D,
    ProductIndependent,
    integrate_against,
)
from .quadrature import DEFAULT_QUAD, QuadratureConfig, integrate_interval

DriftVerdict = Literal["yes", "no", "unknown"]


def exp_residual(x):
    """e^{-x} - 1 + x, the compensator gap of the curve jump map; >= 0."""
    x = np.asarray(x, dtype=float)
    return np.expm1(-x) + x


@dataclass(frozen=True)
class LevyTriplet1D:
    """(gamma, sigma2, measure) of a one-dimensional Levy process."""

    gamma: float
    sigma2: float
    measure: LevyMeasure1D = EMPTY_MEASURE

    def __post_init__(self) -> None:
        if self.sigma2 < 0.0 or not math.isfinite(self.sigma2):
            raise ValueError("sigma2 must be finite and nonnegative")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if self.gamma == 0.0 and self.sigma2 == 0.0 and self.measure.is_zero:
            raise ValueError("the zero process is excluded")

    # -- pathwise structure ------------------------------------------------

    @cached_property
    def small_jump_mean(self) -> float:
        """Integral of z over 0 < |z| <= 1; NaN when the variation is infinite."""
        if self.measure.is_zero:
            return 0.0
        if self.measure.variation_kind == "infinite":
            return math.nan
        return integrate_against(
            self.measure, lambda z: np.asarray(z),
            Interval(-1.0, 1.0, closed_lo=True, closed_hi=True))

    @property
    def drift_bv(self) -> float | None:
        """True drift for finite-variation processes, else None."""
        if self.sigma2 > 0.0:
            return None
        if not self.measure.is_zero and self.measure.variation_kind == "infinite":
            return None
        return self.gamma - self.small_jump_mean

    @cached_property
    def mean(self) -> float:
        """E Z_1 = gamma + int_{|z|>1} z dPi; +-inf allowed, NaN when undefined."""
        if self.measure.is_zero:
            return self.gamma
        pos = integrate_against(self.measure, lambda z: np.asarray(z),
                                Interval(1.0, math.inf))
        neg = integrate_against(self.measure, lambda z: np.asarray(z),
                                Interval(-math.inf, -1.0))
        if math.isinf(pos) and math.isinf(neg):
            return math.nan
        return self.gamma + pos + neg

    def drifts_to_plus_infinity(self) -> DriftVerdict:
        """Decided through the mean; undecidable when both heavy tails are infinite."""
        m = self.mean
        if math.isnan(m):
            return "unknown"
        return "yes" if m > 0.0 else "no"

    def is_transient(self) -> DriftVerdict:
        m = self.mean
        if math.isnan(m):
            return "unknown"
        return "yes" if m != 0.0 else "no"

    # -- jump structure predicates -------------------------------------------

    def has_positive_jumps(self) -> bool:
        return self.measure.has_positive_part()

    def has_negative_jumps(self) -> bool:
        return self.measure.has_negative_part()

    @property
    def infinite_variation(self) -> bool:
        if self.sigma2 > 0.0:
            return True
        return (not self.measure.is_zero
                and self.measure.variation_kind == "infinite")

    @property
    def infinite_activity(self) -> bool:
        return not self.measure.is_zero and self.measure.activity_kind == "infinite"

    def is_subordinator(self) -> bool:
        if self.sigma2 > 0.0 or self.has_negative_jumps():
            return False
        d = self.drift_bv
        return d is not None and d >= -1e-12


@dataclass(frozen=True)
class LevyTriplet2D:
    """(gamma, Sigma, measure) of a bivariate Levy process (xi, eta)."""

    gamma: tuple[float, float]
    sigma: np.ndarray
    measure: LevyMeasure2D

    def __post_init__(self) -> None:
        sig = np.asarray(self.sigma, dtype=float)
        if sig.shape != (2, 2):
            raise ValueError("sigma must be a 2x2 matrix")
        if not np.allclose(sig, sig.T, atol=1e-12):
            raise ValueError("sigma must be symmetric")
        eig = np.linalg.eigvalsh(sig)
        if eig.min() < -1e-10 * max(1.0, eig.max()):
            raise ValueError("sigma must be positive semidefinite")
        object.__setattr__(self, "sigma", sig)

    def marginal_triplet(self, axis: int) -> LevyTriplet1D:
        """1D triplet of one coordinate, converting the truncation convention.

        The Euclidean ball {x^2 + y^2 <= 1} sits inside the marginal slab
        {|z_axis| <= 1}, so the marginal drift gains the coordinate's mass
        in the slab outside the ball.
        """
        g = self.gamma[axis]
        correction = _truncation_correction(self.measure, axis)
        return LevyTriplet1D(
            gamma=g + correction,
            sigma2=float(self.sigma[axis, axis]),
            measure=self.measure.marginal(axis),
        )


def _truncation_correction(measure: LevyMeasure2D, axis: int) -> float:
    """int z_axis over the slab-minus-ball region of the support."""
    if isinstance(measure, ProductIndependent):
        return 0.0  # axis-supported: the Euclidean norm equals the coordinate
    if isinstance(measure, JointAtoms):
        total = 0.0
        for (x, y), mass in measure.atoms:
            v = (x, y)[axis]
            in_slab = abs(v) <= 1.0
            in_ball = x * x + y * y <= 1.0
            if in_slab and not in_ball:
                total += v * mass
        return total
    if isinstance(measure, CurveSupported):
        x_lo, x_hi = curve_ball_interval(measure.k)
        if axis == 0:
            coord = lambda x: np.asarray(x, dtype=float)
            a, b = -1.0, 1.0
        else:
            coord = measure.curve_y
            a, b = _coord_slab_in_x(measure.k)
        # ball pulls back to [x_lo, x_hi], strictly inside the slab [a, b];
        # the difference region stays away from 0 so the integral is finite
        left = Interval(a, x_lo, closed_lo=True, closed_hi=False)
        right = Interval(x_hi, b, closed_lo=False, closed_hi=True)
        return (integrate_against(measure.base, coord, left)
                + integrate_against(measure.base, coord, right))
    raise TypeError(f"unknown bivariate measure {type(measure)!r}")


def _coord_slab_in_x(k: float) -> tuple[float, float]:
    """x-interval where |k(1 - e^{-x})| <= 1."""
    kk = abs(k)
    lo = -math.log1p(1.0 / kk)
    hi = math.inf if kk <= 1.0 else -math.log1p(-1.0 / kk)
    return lo, hi


def a_xi(triplet: LevyTriplet1D, y: float, *,
         cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """1 + int_1^y Pi((z, inf)) dz, the normaliser applied to log-jumps
    of the driving integrator in the convergence criterion."""
    if y < 1.0:
        raise ValueError("a_xi is defined for y >= 1")
    if y == 1.0 or triplet.measure.is_zero:
        return 1.0
    measure = triplet.measure
    pts = [loc for loc, _ in measure.atoms if 1.0 < loc < y]
    val = integrate_interval(
        lambda z: float(measure.tail_up(np.asarray(z))), 1.0, y,
        points=pts, cfg=cfg)
    return 1.0 + val


def curve_ball_interval(k: float) -> tuple[float, float]:
    """x-range where the curve point (x, k(1-e^{-x})) lies in the unit ball."""
    if k == 0.0:
        raise ValueError("k must be nonzero")

    def h(x: float) -> float:
        return x * x + (k * -math.expm1(-x)) ** 2 - 1.0

    # h is increasing in |x|, h(0) = -1 < 0 <= h(+-1)
    hi = brentq(h, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16)
    lo = brentq(h, -1.0, 0.0, xtol=1e-15, rtol=8.9e-16)
    return float(lo), float(hi)


def doleans_xi_from_eta(eta: LevyTriplet1D, k: float, *,
                        cfg: QuadratureConfig = DEFAULT_QUAD) -> LevyTriplet2D:
    """Construct the pair (xi, eta) with e^{-xi} equal to the stochastic
    exponential of -eta/k.

    The jump map Delta xi = -log(1 - Delta eta / k) requires the eta jumps
    to satisfy y/k < 1; mass at or beyond k is a domain error.  The Gaussian
    part obeys sigma_xi^2 = sigma_eta^2 / k^2 and the xi drift is pinned by
    the compensator identity of the pair.
    """
    if k == 0.0 or not math.isfinite(k):
        raise ValueError("k must be finite and nonzero")
    _require_jumps_below_k(eta.measure, k)

    base = _inverse_curve_image(eta.measure, k)
    sigma_xi2 = eta.sigma2 / (k * k)
    sigma = sigma_xi2 * np.asarray([[1.0, k], [k, k * k]])
    measure2 = CurveSupported(k=k, base=base)

    x_lo, x_hi = curve_ball_interval(k)

    # eta drift converted to the Euclidean-ball convention: subtract the
    # eta-coordinate mass in the slab |y| <= 1 outside the ball (the ball's
    # y-shadow [y_lo, y_hi] sits strictly inside [-1, 1])
    y_lo, y_hi = sorted([k * -math.expm1(-x_lo), k * -math.expm1(-x_hi)])
    ident = lambda y: np.asarray(y, dtype=float)
    outside = (
        integrate_against(eta.measure, ident,
                          Interval(-1.0, y_lo, closed_lo=True, closed_hi=False),
                          cfg=cfg)
        + integrate_against(eta.measure, ident,
                            Interval(y_hi, 1.0, closed_lo=False, closed_hi=True),
                            cfg=cfg))
    gamma2 = eta.gamma - outside

    gap = integrate_against(
        base, exp_residual,
        Interval(x_lo, x_hi, closed_lo=True, closed_hi=True), cfg=cfg)
    gamma1 = gamma2 / k + sigma_xi2 / 2.0 + gap

    return LevyTriplet2D(gamma=(gamma1, gamma2), sigma=sigma, measure=measure2)


def _require_jumps_below_k(measure: LevyMeasure1D, k: float) -> None:
    bad = [loc for loc, _ in measure.atoms if loc / k >= 1.0]
    if bad:
        raise ValueError(
            f"eta jumps {bad} land at or beyond k={k}; the pair construction "
            "needs zero eta-jump mass on {y : y/k >= 1}")
    if measure.density_support is not None:
        lo, hi = measure.density_support
        if (k > 0 and hi > k) or (k < 0 and lo < k):
            raise ValueError(f"eta density support reaches beyond k={k}")
    if measure.tails_only:
        # mass within a relative 1e-12 of k is treated as sitting at k
        probe = abs(k) * (1.0 - 1e-12)
        tail = measure.tail_up if k > 0 else measure.tail_down
        if float(tail(np.asarray(probe))) > 0.0:
            raise ValueError(f"declared eta tail carries mass at or beyond k={k}")


def _inverse_curve_image(meas: LevyMeasure1D, k: float) -> LevyMeasure1D:
    """Image of the eta measure under y -> -log(1 - y/k): the xi jump measure."""
    inv = lambda y: -np.log1p(-np.asarray(y, dtype=float) / k)
    fwd = lambda x: k * -np.expm1(-np.asarray(x, dtype=float))

    atoms = tuple((float(inv(y)), m) for y, m in meas.atoms)

    density = None
    support = None
    if meas.density is not None:
        dens = meas._dens_vec

        def density(x, _dens=dens, _fwd=fwd, _k=k):
            x = np.asarray(x, dtype=float)
            return _dens(_fwd(x)) * np.abs(_k) * np.exp(-x)

        lo, hi = meas.density_support
        ends = sorted([float(inv(lo)), float(inv(hi))])
        support = (ends[0], ends[1])

    # declared tails and inverses transfer exactly through the monotone map
    declare = (meas.density is not None or meas.tail_plus is not None
               or meas.tail_minus is not None)

    def tail_plus(z, _m=meas, _k=k):
        z = np.asarray(z, dtype=float)
        if _k > 0:
            return _m.tail_up(_k * -np.expm1(-z))
        return _m.tail_down(np.abs(_k) * -np.expm1(-z))

    def tail_minus(z, _m=meas, _k=k):
        z = np.asarray(z, dtype=float)
        if _k > 0:
            return _m.tail_down(_k * np.expm1(z))
        return _m.tail_up(np.abs(_k) * np.expm1(z))

    def tail_plus_inverse(mass, _m=meas, _k=k):
        mass = np.asarray(mass, dtype=float)
        if _k > 0:
            w = _m._invert_diffuse(mass, True, 1e-300)
            return -np.log1p(-w / _k)
        w = _m._invert_diffuse(mass, False, 1e-300)
        return -np.log1p(-w / np.abs(_k))

    def tail_minus_inverse(mass, _m=meas, _k=k):
        mass = np.asarray(mass, dtype=float)
        if _k > 0:
            w = _m._invert_diffuse(mass, False, 1e-300)
            return np.log1p(w / _k)
        w = _m._invert_diffuse(mass, True, 1e-300)
        return np.log1p(w / np.abs(_k))

    return LevyMeasure1D(
        atoms=atoms,
        density=density,
        density_support=support,
        tail_plus=tail_plus if declare else None,
        tail_minus=tail_minus if declare else None,
        tail_plus_inverse=tail_plus_inverse if declare else None,
        tail_minus_inverse=tail_minus_inverse if declare else None,
        activity=meas.activity_kind,
        variation=meas.variation_kind,
        skip_checks=True,
    )
