"""Quadrature helpers for integrals against jump measures.

Finite intervals go through QUADPACK with breakpoint hints.  Improper
integrals are resolved by a geometric truncation sweep whose partial sums
either stabilise (value returned) or keep growing monotonically, in which
case a signed infinity is returned as an honest divergence sentinel.
Integration against a bare tail function (no density available) uses an
adaptive Riemann-Stieltjes rule driven by the mass of each subinterval.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _si


class NumericsError(ArithmeticError):
    """Raised when an integral cannot be resolved to a value or a signed infinity."""


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    divergence_threshold: float = 1e12
    max_doublings: int = 1100
    stable_windows: int = 6
    stieltjes_max_depth: int = 60


DEFAULT_QUAD = QuadratureConfig()


def integrate_interval(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    points: Sequence[float] = (),
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """Integrate ``fn`` over the finite interval (lo, hi)."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("integrate_interval needs finite bounds")
    if hi <= lo:
        return 0.0
    pts = sorted(p for p in points if lo < p < hi)
    with warnings.catch_warnings():
        # the error estimate is checked explicitly below
        warnings.simplefilter("ignore", _si.IntegrationWarning)
        value, err = _si.quad(
            fn, lo, hi,
            points=pts or None,
            epsabs=cfg.abs_tol,
            epsrel=cfg.rel_tol,
            limit=400,
        )
    if not math.isfinite(value):
        raise NumericsError(f"quadrature returned {value} on ({lo}, {hi})")
    if err > 1e3 * max(cfg.abs_tol, cfg.rel_tol * abs(value), 1e-300):
        # QUADPACK could not meet the requested tolerance; keep the value but
        # only when the reported error is still small in absolute terms.
        if err > 1e-4 * max(1.0, abs(value)):
            raise NumericsError(
                f"quadrature error estimate {err:.3g} too large on ({lo}, {hi})"
            )
    return value


def sweep_improper(
    segment: Callable[[float, float], float],
    start: float,
    *,
    cfg: QuadratureConfig = DEFAULT_QUAD,
    residual: Callable[[float], float] | None = None,
) -> float:
    """Sum ``segment(a, b)`` over geometric windows (start, 2*start], ... .

    ``segment`` must return the integral over the window (a, b].  ``residual``
    maps a window edge w to a signed lower-bound estimate of the integral
    still beyond w; a negligible residual certifies convergence early, while
    a residual that stays bounded away from zero at the representable edge
    certifies divergence.  Returns the stabilised sum, or +/-inf when the
    partial sums grow monotonically past the divergence threshold or the
    representable range is exhausted without the contribution dying out.
    """
    if start <= 0.0:
        raise ValueError("sweep must start at a positive abscissa")
    total = 0.0
    edge = start
    recent: list[float] = []
    for _ in range(cfg.max_doublings):
        nxt = edge * 2.0
        if not math.isfinite(nxt):
            break
        inc = segment(edge, nxt)
        total += inc
        recent.append(inc)
        if len(recent) > cfg.stable_windows:
            recent.pop(0)
        edge = nxt
        scale = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if len(recent) == cfg.stable_windows and all(abs(i) <= scale for i in recent):
            rem = residual(edge) if residual is not None else 0.0
            if abs(rem) <= max(scale, cfg.abs_tol):
                return total
        if abs(total) > cfg.divergence_threshold:
            signs = {math.copysign(1.0, i) for i in recent if i != 0.0}
            if len(signs) == 1:
                return math.copysign(math.inf, total)
            raise NumericsError("oscillating partial sums past divergence threshold")
    # Window cap reached without stabilisation.
    rem = residual(edge) if residual is not None else 0.0
    scale = max(cfg.abs_tol, cfg.rel_tol * abs(total))
    nonzero = [i for i in recent if i != 0.0]
    signs = {math.copysign(1.0, i) for i in nonzero}
    if len(signs) > 1:
        raise NumericsError("oscillating partial sums at the representable edge")
    if nonzero and abs(nonzero[-1]) >= 0.5 * abs(nonzero[0]):
        # one-signed contributions that are not dying out
        return math.copysign(math.inf, nonzero[-1])
    if abs(rem) <= scale:
        return total
    if signs and math.copysign(1.0, rem) != next(iter(signs)):
        raise NumericsError("residual sign disagrees with the sweep")
    # The residual is a lower bound on the contribution beyond the edge.  A
    # residual that survives repeated log-scale halvings certifies that the
    # contribution never dies out; one that halves along with the scale is a
    # vanishing remainder that float range cut off before tolerance did.
    r_half = residual(math.sqrt(edge))
    r_quarter = residual(edge ** 0.25)
    if abs(rem) >= 0.7 * abs(r_half) and abs(r_half) >= 0.7 * abs(r_quarter):
        return math.copysign(math.inf, rem)
    if abs(rem) <= 0.01 * abs(total):
        return total
    raise NumericsError(
        "mass remains beyond the representable range; integral unresolved"
    )


def sweep_to_zero(
    segment: Callable[[float, float], float],
    start: float,
    *,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """Sum ``segment(a, b)`` over shells (start/2, start], (start/4, start/2], ...

    Descending counterpart of :func:`sweep_improper`, used for integrands on
    supports that touch the origin.  Stabilised sums are returned; monotone
    growth yields a signed infinity.
    """
    if start <= 0.0:
        raise ValueError("sweep must start at a positive abscissa")
    total = 0.0
    edge = start
    recent: list[float] = []
    for _ in range(cfg.max_doublings):
        nxt = edge * 0.5
        if nxt < 1e-290:
            break
        inc = segment(nxt, edge)
        total += inc
        recent.append(inc)
        if len(recent) > cfg.stable_windows:
            recent.pop(0)
        edge = nxt
        scale = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if len(recent) == cfg.stable_windows and all(abs(i) <= scale for i in recent):
            return total
        if abs(total) > cfg.divergence_threshold:
            signs = {math.copysign(1.0, i) for i in recent if i != 0.0}
            if len(signs) == 1:
                return math.copysign(math.inf, total)
            raise NumericsError("oscillating partial sums past divergence threshold")
    signs = {math.copysign(1.0, i) for i in recent if i != 0.0}
    if len(signs) == 1:
        return math.copysign(math.inf, next(iter(signs)))
    if not signs:
        return total
    raise NumericsError("shell sweep toward zero did not stabilise")


def _eval_vec(fn: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate ``fn`` on an array, falling back to a scalar loop."""
    if x.size > 1:
        try:
            out = np.asarray(fn(x), dtype=float)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
    return np.fromiter((float(fn(float(v))) for v in x), dtype=float,
                       count=x.size).reshape(x.shape)


def stieltjes_decreasing(
    fn: Callable,
    tail: Callable,
    lo: float,
    hi: float,
    *,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """Integrate ``fn`` on (lo, hi] against the measure with tail function ``tail``.

    ``tail`` is nonincreasing and the measure of (a, b] is tail(a) - tail(b).
    Subintervals are refined until the two-point estimate agrees with the
    one-point estimate in proportion to the mass they carry; this localises
    atoms without needing their positions.  ``fn`` and ``tail`` may be
    vectorised; refinement proceeds one level at a time so vectorised handles
    are evaluated in batches.
    """
    t_lo = float(tail(np.asarray(lo)))
    t_hi = float(tail(np.asarray(hi)))
    total_mass = t_lo - t_hi
    if total_mass <= 0.0:
        return 0.0

    def midpoint(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # geometric midpoints keep wide windows resolvable in log scale;
        # sqrt(a)*sqrt(b) avoids overflow of the plain product near float max
        ratio = np.divide(b, a, out=np.full_like(b, np.inf), where=a > 0.0)
        geo = (a > 0.0) & (ratio > 8.0)
        safe_a = np.where(geo, a, 1.0)
        return np.where(geo, np.sqrt(safe_a) * np.sqrt(b), a + 0.5 * (b - a))

    total = 0.0
    a = np.array([lo])
    b = np.array([hi])
    ta = np.array([t_lo])
    tb = np.array([t_hi])
    for depth in range(cfg.stieltjes_max_depth + 1):
        mass = ta - tb
        live = mass > 0.0
        if not np.any(live):
            break
        a, b, ta, tb, mass = a[live], b[live], ta[live], tb[live], mass[live]
        m = midpoint(a, b)
        tm = _eval_vec(tail, m)
        coarse = _eval_vec(fn, m) * mass
        refined = (_eval_vec(fn, midpoint(a, m)) * (ta - tm)
                   + _eval_vec(fn, midpoint(m, b)) * (tm - tb))
        scale = max(cfg.abs_tol,
                    cfg.rel_tol * (abs(total) + float(np.abs(refined).sum())))
        budget = np.maximum(scale * (mass / total_mass), 1e-300)
        done = (np.abs(refined - coarse) <= budget)
        if depth == cfg.stieltjes_max_depth:
            done = np.ones_like(done)
        total += float(refined[done].sum())
        keep = ~done
        if not np.any(keep):
            break
        a, b, ta, tb, m, tm = (a[keep], b[keep], ta[keep], tb[keep],
                               m[keep], tm[keep])
        a = np.concatenate([a, m])
        b = np.concatenate([m, b])
        ta = np.concatenate([ta, tm])
        tb = np.concatenate([tm, tb])
    return total


def bisect_decreasing(
    fn: Callable[[np.ndarray], np.ndarray],
    targets: np.ndarray,
    lo: float,
    hi: float,
    *,
    iterations: int = 80,
) -> np.ndarray:
    """Vectorised bisection: smallest z in [lo, hi] with fn(z) <= target.

    ``fn`` is nonincreasing and vectorised.  Used to invert tail functions
    when no analytic inverse is available; flat stretches resolve to their
    left edge which is the correct generalised inverse for sampling.
    """
    targets = np.asarray(targets, dtype=float)
    a = np.full(targets.shape, lo, dtype=float)
    b = np.full(targets.shape, hi, dtype=float)
    for _ in range(iterations):
        m = 0.5 * (a + b)
        high = fn(m) > targets
        a = np.where(high, m, a)
        b = np.where(high, b, m)
    return b
