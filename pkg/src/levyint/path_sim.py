"""Exact-jump simulation of Levy paths on adaptive grids.

Jumps beyond the truncation radius are placed at their Poisson times;
smaller jumps are dropped together with their in-ball compensator, which
keeps the triplet drift gamma unchanged while restricting the measure.
Each step records its Gaussian increments separately from drift and jumps
so integrators can apply exact exponential identities stepwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .measures import (
    CurveSupported,
    Interval,
    JointAtoms,
    LevyMeasure1D,
    LevyMeasure2D,
    ProductIndependent,
    integrate_against,
)
from .quadrature import NumericsError
from .rng import RngStream
from .triplets import LevyTriplet1D, LevyTriplet2D, curve_ball_interval

from scipy.optimize import brentq


@dataclass(frozen=True)
class SimConfig:
    """Discretisation controls shared by all samplers."""

    eps: float = 1e-4        # jump truncation radius (Euclidean, 2D)
    max_step: float = 0.01   # upper bound on grid spacing
    max_poisson: float = 2e7  # refuse chunks with more expected jumps

    def __post_init__(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")


DEFAULT_SIM = SimConfig()


@dataclass(frozen=True)
class SimMeta:
    """Effective simulation coefficients of a truncated pair."""

    b1: float        # xi drift after folding in the truncation compensator
    b2: float        # eta drift, same convention
    c: float         # Gaussian regression slope of eta on xi
    sigma11: float
    sigma22: float
    eps: float


@dataclass
class PathGrid:
    """A simulated pair path; index 0 is the origin (t=0, values 0).

    xi_left[j] is the left limit at times[j]; xi[j] includes the jump
    placed there.  The per-step arrays (length len(times) - 1) carry the
    Gaussian increments of step (times[j], times[j+1]].
    """

    times: np.ndarray
    xi: np.ndarray
    xi_left: np.ndarray
    eta: np.ndarray
    eta_left: np.ndarray
    jump_xi: np.ndarray
    jump_eta: np.ndarray
    dxi_gauss: np.ndarray
    deta_gauss: np.ndarray
    meta: SimMeta

    @property
    def n_steps(self) -> int:
        return self.times.size - 1

    def dt(self) -> np.ndarray:
        return np.diff(self.times)

    def dxi_cont(self) -> np.ndarray:
        return self.meta.b1 * self.dt() + self.dxi_gauss

    def deta_cont(self) -> np.ndarray:
        return self.meta.b2 * self.dt() + self.deta_gauss


@dataclass(frozen=True)
class _JumpSource:
    rate: float
    sample: Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class _SimPlan:
    b1: float
    b2: float
    c: float
    sigma11: float
    sigma22: float
    mode: str                    # "none" | "rank1" | "eta_only" | "full"
    chol: np.ndarray | None
    sources: tuple[_JumpSource, ...]
    eps: float

    def meta(self) -> SimMeta:
        return SimMeta(self.b1, self.b2, self.c, self.sigma11,
                       self.sigma22, self.eps)

    def sample_gauss(self, rng: np.random.Generator,
                     dt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        m = dt.size
        if self.mode == "none":
            z = np.zeros(m)
            return z, z.copy()
        sd = np.sqrt(dt)
        if self.mode == "rank1":
            dxi = math.sqrt(self.sigma11) * sd * rng.standard_normal(m)
            return dxi, self.c * dxi
        if self.mode == "eta_only":
            return np.zeros(m), math.sqrt(self.sigma22) * sd * rng.standard_normal(m)
        z = rng.standard_normal((2, m))
        inc = (self.chol @ z) * sd
        return inc[0], inc[1]


def sym_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root; tiny negative eigenvalues are clipped."""
    w, v = np.linalg.eigh(np.asarray(mat, dtype=float))
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def curve_radius_interval(k: float, r: float) -> tuple[float, float]:
    """x-range where the curve point has Euclidean norm <= r (0 < r <= 1)."""
    if not 0.0 < r <= 1.0:
        raise ValueError("radius must lie in (0, 1]")

    def h(x: float) -> float:
        return x * x + (k * -math.expm1(-x)) ** 2 - r * r

    # |z(x)| >= |x| so the roots lie inside [-r, r]
    hi = brentq(h, 0.0, r, xtol=1e-15, rtol=8.9e-16)
    lo = brentq(h, -r, 0.0, xtol=1e-15, rtol=8.9e-16)
    return float(lo), float(hi)


_IDENT = lambda z: np.asarray(z, dtype=float)


def _finite_rate(lam: float) -> float:
    if not math.isfinite(lam):
        raise NumericsError(
            "jump rate is infinite at the truncation radius; increase eps")
    return lam


def _axis_sources(measure: LevyMeasure1D, eps: float, axis: int) -> list[_JumpSource]:
    out: list[_JumpSource] = []
    for positive in (True, False):
        tail = measure.tail_up if positive else measure.tail_down
        lam = _finite_rate(float(tail(np.asarray(eps))))
        if lam <= 0.0:
            continue
        sign = 1.0 if positive else -1.0

        def sample(rng, n, _m=measure, _p=positive, _s=sign, _e=eps, _ax=axis):
            d = _s * _m.sample_magnitudes(rng, n, _p, _e)
            z = np.zeros(n)
            return (d, z) if _ax == 0 else (z, d)

        out.append(_JumpSource(rate=lam, sample=sample))
    return out


def _curve_sources(measure: CurveSupported, eps: float) -> list[_JumpSource]:
    k, base = measure.k, measure.base
    x_lo, x_hi = curve_radius_interval(k, eps)
    out: list[_JumpSource] = []
    for positive, thresh in ((True, x_hi), (False, -x_lo)):
        tail = base.tail_up if positive else base.tail_down
        lam = _finite_rate(float(tail(np.asarray(thresh))))
        if lam <= 0.0:
            continue
        sign = 1.0 if positive else -1.0

        def sample(rng, n, _b=base, _p=positive, _s=sign, _t=thresh, _k=k):
            x = _s * _b.sample_magnitudes(rng, n, _p, _t)
            return x, _k * -np.expm1(-x)

        out.append(_JumpSource(rate=lam, sample=sample))
    return out


def _atom_source(measure: JointAtoms) -> list[_JumpSource]:
    xs = np.asarray([xy[0] for xy, _ in measure.atoms])
    ys = np.asarray([xy[1] for xy, _ in measure.atoms])
    masses = np.asarray([m for _, m in measure.atoms])
    total = float(masses.sum())
    if total <= 0.0:
        return []
    probs = masses / total

    def sample(rng, n, _xs=xs, _ys=ys, _p=probs):
        idx = rng.choice(_p.size, size=n, p=_p)
        return _xs[idx], _ys[idx]

    return [_JumpSource(rate=total, sample=sample)]


def _compensation_1d(measure: LevyMeasure1D, eps: float) -> float:
    """int z over {eps < |z| <= 1}, the drift folded back by truncation."""
    if measure.is_zero or eps >= 1.0:
        return 0.0
    region = [Interval(eps, 1.0, closed_hi=True),
              Interval(-1.0, -eps, closed_lo=True)]
    return integrate_against(measure, _IDENT, region)


def _plan_gauss(sigma11: float, sigma12: float, sigma22: float):
    if sigma11 <= 0.0 and sigma22 <= 0.0:
        return "none", 0.0, None
    scale = max(sigma11, sigma22) ** 2
    if sigma11 > 0.0 and abs(sigma12 * sigma12 - sigma11 * sigma22) <= 1e-12 * scale:
        return "rank1", sigma12 / sigma11, None
    if sigma11 <= 0.0:
        return "eta_only", 0.0, None
    return "full", sigma12 / sigma11, sym_sqrt(
        np.asarray([[sigma11, sigma12], [sigma12, sigma22]]))


def make_plan(triplet: LevyTriplet1D | LevyTriplet2D,
              config: SimConfig = DEFAULT_SIM) -> _SimPlan:
    eps = config.eps
    if isinstance(triplet, LevyTriplet1D):
        b1 = triplet.gamma - _compensation_1d(triplet.measure, eps)
        sources = tuple(_axis_sources(triplet.measure, eps, 0))
        return _SimPlan(b1=b1, b2=0.0, c=0.0, sigma11=triplet.sigma2,
                        sigma22=0.0, mode=_plan_gauss(triplet.sigma2, 0.0, 0.0)[0],
                        chol=None, sources=sources, eps=eps)

    measure = triplet.measure
    s11 = float(triplet.sigma[0, 0])
    s12 = float(triplet.sigma[0, 1])
    s22 = float(triplet.sigma[1, 1])
    mode, c, chol = _plan_gauss(s11, s12, s22)

    if isinstance(measure, ProductIndependent):
        comp1 = _compensation_1d(measure.pi_xi, eps)
        comp2 = _compensation_1d(measure.pi_eta, eps)
        sources = (*_axis_sources(measure.pi_xi, eps, 0),
                   *_axis_sources(measure.pi_eta, eps, 1))
    elif isinstance(measure, JointAtoms):
        comp1 = comp2 = 0.0
        for (x, y), m in measure.atoms:
            if x * x + y * y <= 1.0:
                comp1 += x * m
                comp2 += y * m
        sources = tuple(_atom_source(measure))
    elif isinstance(measure, CurveSupported):
        k, base = measure.k, measure.base
        xlo_1, xhi_1 = curve_ball_interval(k)
        xlo_e, xhi_e = curve_radius_interval(k, eps)
        region = [Interval(xlo_1, xlo_e, closed_lo=True, closed_hi=False),
                  Interval(xhi_e, xhi_1, closed_lo=False, closed_hi=True)]
        comp1 = integrate_against(base, _IDENT, region)
        comp2 = integrate_against(
            base, lambda x: k * -np.expm1(-np.asarray(x, dtype=float)), region)
        sources = tuple(_curve_sources(measure, eps))
    else:
        raise TypeError(f"unknown bivariate measure {type(measure)!r}")

    return _SimPlan(b1=triplet.gamma[0] - comp1, b2=triplet.gamma[1] - comp2,
                    c=c, sigma11=s11, sigma22=s22, mode=mode, chol=chol,
                    sources=sources, eps=eps)


class PathBuilder:
    """Chunked path generator; each extension draws from a fresh substream
    so a path is reproducible for a fixed extension schedule."""

    def __init__(self, triplet: LevyTriplet1D | LevyTriplet2D,
                 stream: RngStream, config: SimConfig = DEFAULT_SIM):
        self._plan = make_plan(triplet, config)
        self._stream = stream
        self._cfg = config
        self._chunks: list[dict[str, np.ndarray]] = []
        self._chunk_idx = 0
        self.t_end = 0.0
        self.xi_end = 0.0
        self.eta_end = 0.0

    def extend(self, to_time: float, extra_times: Sequence[float] = ()) -> None:
        if to_time <= self.t_end:
            return
        t0, t1 = self.t_end, float(to_time)
        span = t1 - t0
        rng = self._stream.child(self._chunk_idx).generator()
        self._chunk_idx += 1

        jt_parts, jx_parts, jy_parts = [], [], []
        for src in self._plan.sources:
            lam = src.rate * span
            if lam > self._cfg.max_poisson:
                raise NumericsError(
                    f"expected {lam:.3g} jumps in one chunk; increase eps "
                    "or lower the horizon")
            n = int(rng.poisson(lam)) if lam > 0.0 else 0
            if n:
                jt_parts.append(rng.uniform(t0, t1, size=n))
                dx, dy = src.sample(rng, n)
                jx_parts.append(np.asarray(dx, dtype=float))
                jy_parts.append(np.asarray(dy, dtype=float))

        if jt_parts:
            jt = np.concatenate(jt_parts)
            jx = np.concatenate(jx_parts)
            jy = np.concatenate(jy_parts)
            jt, inverse = np.unique(jt, return_inverse=True)
            ax = np.zeros(jt.size)
            ay = np.zeros(jt.size)
            np.add.at(ax, inverse, jx)
            np.add.at(ay, inverse, jy)
        else:
            jt = np.empty(0)
            ax = np.empty(0)
            ay = np.empty(0)

        n_uniform = max(1, math.ceil(span / self._cfg.max_step))
        uniform = t0 + span * np.arange(1, n_uniform + 1) / n_uniform
        uniform[-1] = t1
        pts = np.union1d(uniform, jt)
        extra = np.asarray(list(extra_times), dtype=float)
        if extra.size:
            extra = extra[(extra > t0) & (extra <= t1)]
            if extra.size:
                pts = np.union1d(pts, extra)

        jump_xi = np.zeros(pts.size)
        jump_eta = np.zeros(pts.size)
        if jt.size:
            pos = np.searchsorted(pts, jt)
            jump_xi[pos] = ax
            jump_eta[pos] = ay

        dt = np.diff(pts, prepend=t0)
        dxi_g, deta_g = self._plan.sample_gauss(rng, dt)

        xi = self.xi_end + np.cumsum(self._plan.b1 * dt + dxi_g + jump_xi)
        eta = self.eta_end + np.cumsum(self._plan.b2 * dt + deta_g + jump_eta)

        self._chunks.append({
            "t": pts, "xi": xi, "eta": eta,
            "jx": jump_xi, "jy": jump_eta,
            "dxg": dxi_g, "deg": deta_g,
        })
        self.t_end = t1
        self.xi_end = float(xi[-1])
        self.eta_end = float(eta[-1])

    def grid(self) -> PathGrid:
        zero = np.zeros(1)

        def cat(key: str, lead: bool) -> np.ndarray:
            parts = [ch[key] for ch in self._chunks]
            if lead:
                parts = [zero] + parts
            return np.concatenate(parts) if parts else zero.copy()

        times = cat("t", True)
        xi = cat("xi", True)
        eta = cat("eta", True)
        jump_xi = cat("jx", True)
        jump_eta = cat("jy", True)
        return PathGrid(
            times=times, xi=xi, xi_left=xi - jump_xi,
            eta=eta, eta_left=eta - jump_eta,
            jump_xi=jump_xi, jump_eta=jump_eta,
            dxi_gauss=cat("dxg", False) if self._chunks else np.empty(0),
            deta_gauss=cat("deg", False) if self._chunks else np.empty(0),
            meta=self._plan.meta(),
        )


def simulate_path(triplet: LevyTriplet1D, horizon: float, stream: RngStream,
                  *, config: SimConfig = DEFAULT_SIM,
                  extra_times: Sequence[float] = ()) -> PathGrid:
    """Single 1D path on [0, horizon]; the eta arrays stay zero."""
    b = PathBuilder(triplet, stream, config)
    b.extend(horizon, extra_times)
    return b.grid()


def simulate_bivariate(triplet: LevyTriplet2D, horizon: float, stream: RngStream,
                       *, config: SimConfig = DEFAULT_SIM,
                       extra_times: Sequence[float] = ()) -> PathGrid:
    """Single correlated pair path on [0, horizon]."""
    b = PathBuilder(triplet, stream, config)
    b.extend(horizon, extra_times)
    return b.grid()


def write_csv(grid: PathGrid, fileobj) -> None:
    """Dump a path as time,xi_left,xi,eta_left,eta,dxi,deta rows."""
    dxi = np.diff(grid.xi, prepend=0.0)
    deta = np.diff(grid.eta, prepend=0.0)
    fileobj.write("time,xi_left,xi,eta_left,eta,dxi,deta\n")
    for row in zip(grid.times, grid.xi_left, grid.xi, grid.eta_left,
                   grid.eta, dxi, deta):
        fileobj.write(",".join(f"{v:.17g}" for v in row) + "\n")
