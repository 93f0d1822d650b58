"""Integrals of simulated paths and pooled sampling of their laws.

The exponential integral uses an exact stepwise identity: on each grid
step the eta increment is split into the component riding on the xi noise
(integrated in closed form through e^{-xi}) and an orthogonal remainder
(left-point Ito sum), so pairs whose eta is a deterministic functional of
xi integrate with no discretisation bias beyond float round-off.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal

import numpy as np

from .path_sim import DEFAULT_SIM, PathBuilder, PathGrid, SimConfig
from .quadrature import NumericsError
from .rng import RngStream
from .triplets import LevyTriplet1D, LevyTriplet2D

OVERFLOW_XI = -700.0


@dataclass(frozen=True)
class GDescriptor:
    """A real function g plus caller-declared structural properties.

    The flags are assertions, not derived facts; the classifier spot-checks
    them numerically where possible and the integrators use only fn,
    indicator_of and compact_support.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "g"
    nonneg: bool = False
    compact_support: tuple[float, float] | None = None
    support_interior_contains_0: bool = False
    positive_on_interior: bool = False
    boundary: Literal["finite", "countable", "unknown"] = "unknown"
    g0_nonzero: bool = False
    positive_near_0: bool = False
    countable_discontinuities: bool = False
    strictly_monotone_near_0: bool = False
    integrable: bool = False
    indicator_of: tuple[float, float] | None = None
    level_set_window: tuple[float, float, float] | None = None  # (J_lo, J_hi, t0)
    level_set_near_0: float | None = None                       # epsilon

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class YProcessSpec:
    """The integrator process Y of a g-integral, independent of xi."""

    kind: Literal["identity", "subordinator", "deterministic"] = "identity"
    triplet: LevyTriplet1D | None = None
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    strictly_increasing: bool | None = None
    ac_density_nonvanishing: bool = False

    def __post_init__(self) -> None:
        if self.kind == "subordinator":
            if self.triplet is None or not self.triplet.is_subordinator():
                raise ValueError("subordinator Y needs a subordinator triplet")
        if self.kind == "deterministic" and self.fn is None:
            raise ValueError("deterministic Y needs a function")
        if self.strictly_increasing is None:
            object.__setattr__(self, "strictly_increasing",
                               self._infer_strict())

    def _infer_strict(self) -> bool:
        if self.kind == "identity":
            return True
        if self.kind == "subordinator":
            d = self.triplet.drift_bv
            return (d is not None and d > 0.0) or self.triplet.infinite_activity
        return False


@dataclass(frozen=True)
class HorizonPolicy:
    """Adaptive-horizon controls for infinite upper integration limits."""

    tail_tolerance: float = 1e-8
    min_horizon: float = 5.0
    max_horizon: float = 5120.0
    growth: float = 2.0
    margin_factor: float = 10.0   # no-return margin in units of supp(g) spread

    def __post_init__(self) -> None:
        if self.growth <= 1.0:
            raise ValueError("growth must exceed 1")
        if self.min_horizon <= 0.0 or self.max_horizon < self.min_horizon:
            raise ValueError("horizons must satisfy 0 < min <= max")


DEFAULT_POLICY = HorizonPolicy()


@dataclass
class SamplePool:
    """Monte Carlo samples of one functional; values sorted, meta complete
    enough to regenerate the pool."""

    values: np.ndarray
    meta: dict

    @property
    def n(self) -> int:
        return int(self.values.size)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        with path.open("w") as fh:
            for v in self.values:
                fh.write(f"{v:.17g}\n")
        sidecar = Path(str(path) + ".meta.json")
        sidecar.write_text(json.dumps(self.meta, indent=2, sort_keys=True))

    @staticmethod
    def load(path: str | Path) -> "SamplePool":
        path = Path(path)
        raw = [line for line in path.read_text().splitlines() if line.strip()]
        values = np.asarray([float(v) for v in raw])
        sidecar = Path(str(path) + ".meta.json")
        meta = json.loads(sidecar.read_text()) if sidecar.exists() else {}
        return SamplePool(values=values, meta=meta)


def _phi(x: np.ndarray) -> np.ndarray:
    """(1 - e^{-x})/x extended continuously through 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 - xs / 2.0 + xs * xs / 6.0
    xl = x[~small]
    out[~small] = -np.expm1(-xl) / xl
    return out


def _check_overflow(grid: PathGrid) -> None:
    lo = float(min(grid.xi_left.min(), grid.xi.min()))
    if lo < OVERFLOW_XI:
        raise NumericsError(
            f"e^(-xi) overflows double range; excursion minimum {lo:.6g}")


def integrate_exponential(grid: PathGrid, *, cumulative: bool = False):
    """I_T = int_0^T e^{-xi_{s-}} d eta_s over the realised grid.

    Per step: the eta-on-xi Gaussian component integrates exactly through
    the exponential, the drift-like remainder uses the exponential-linear
    interpolant, jumps contribute e^{-xi_left} * jump_eta; with cumulative
    the running value at every grid time is returned.
    """
    _check_overflow(grid)
    m = grid.meta
    dt = grid.dt()
    w_start = np.exp(-grid.xi[:-1])          # e^{-xi} at step start
    w_end_left = np.exp(-grid.xi_left[1:])   # e^{-xi} just before step end
    dxc = m.b1 * dt + grid.dxi_gauss
    coeff = m.b2 + m.c * (m.sigma11 / 2.0 - m.b1)
    seg = (m.c * (w_start - w_end_left)
           + coeff * dt * w_start * _phi(dxc)
           + w_start * (grid.deta_gauss - m.c * grid.dxi_gauss))
    inc = seg + w_end_left * grid.jump_eta[1:]
    if cumulative:
        return np.concatenate(([0.0], np.cumsum(inc)))
    return float(inc.sum())


def _indicator_time(xl: np.ndarray, dxc: np.ndarray, dt: np.ndarray,
                    lo: float, hi: float) -> np.ndarray:
    """Per-step time the linear interpolant spends inside [lo, hi]."""
    out = np.zeros_like(dt)
    flat = dxc == 0.0
    inside = (xl >= lo) & (xl <= hi)
    out[flat & inside] = dt[flat & inside]
    mov = ~flat
    if np.any(mov):
        v = dxc[mov] / dt[mov]
        s1 = (lo - xl[mov]) / v
        s2 = (hi - xl[mov]) / v
        a = np.minimum(s1, s2)
        b = np.maximum(s1, s2)
        out[mov] = np.clip(np.minimum(b, dt[mov]) - np.maximum(a, 0.0),
                           0.0, None)
    return out


def _time_integral(grid: PathGrid, g: GDescriptor,
                   yfn: Callable | None = None) -> float:
    """int g(xi_t) dF(t) with F = id or a deterministic increasing warp."""
    dt = grid.dt()
    xl = grid.xi[:-1]
    dxc = grid.dxi_cont()
    if g.indicator_of is not None and yfn is None:
        lo, hi = g.indicator_of
        return float(_indicator_time(xl, dxc, dt, lo, hi).sum())
    df = dt if yfn is None else np.diff(np.asarray(yfn(grid.times), dtype=float))
    vals = 0.5 * (g(xl) + g(xl + dxc)) * df
    return float(vals.sum())


def _xi_before(grid: PathGrid, taus: np.ndarray) -> np.ndarray:
    """Left-limit interpolant of xi at interior times."""
    if taus.size == 0:
        return taus
    idx = np.searchsorted(grid.times, taus, side="left") - 1
    idx = np.clip(idx, 0, grid.n_steps - 1)
    dt = grid.times[idx + 1] - grid.times[idx]
    frac = np.where(dt > 0, (taus - grid.times[idx]) / np.where(dt > 0, dt, 1.0), 1.0)
    return grid.xi[idx] + frac * grid.dxi_cont()[idx]


def _integrate_with_y_grid(grid: PathGrid, g: GDescriptor,
                           ygrid: PathGrid) -> float:
    drift = ygrid.meta.b1
    total = drift * _time_integral(grid, g) if drift != 0.0 else 0.0
    jump_mask = ygrid.jump_xi != 0.0
    if np.any(jump_mask):
        taus = ygrid.times[jump_mask]
        sizes = ygrid.jump_xi[jump_mask]
        total += float((g(_xi_before(grid, taus)) * sizes).sum())
    return total


def integrate_g(path: PathGrid, g: GDescriptor, y: YProcessSpec,
                rng: RngStream | None = None, *,
                config: SimConfig = DEFAULT_SIM) -> float:
    """int_0^T g(xi_t) dY_t over the path horizon; Y is drawn here from
    its own stream when it is a subordinator."""
    if y.kind == "identity":
        return _time_integral(path, g)
    if y.kind == "deterministic":
        return _time_integral(path, g, yfn=y.fn)
    if rng is None:
        raise ValueError("subordinator Y requires an independent rng stream")
    yb = PathBuilder(y.triplet, rng, config)
    yb.extend(float(path.times[-1]))
    return _integrate_with_y_grid(path, g, yb.grid())


def _truncation_summary(times: list[float]) -> dict | None:
    if not times:
        return None
    arr = np.asarray(times)
    return {"min": float(arr.min()), "median": float(np.median(arr)),
            "max": float(arr.max())}


def _policy_meta(policy: HorizonPolicy, config: SimConfig) -> dict:
    return {
        "tail_tolerance": policy.tail_tolerance,
        "min_horizon": policy.min_horizon,
        "max_horizon": policy.max_horizon,
        "growth": policy.growth,
        "margin_factor": policy.margin_factor,
        "eps": config.eps,
        "max_step": config.max_step,
    }


def sample_exponential_functional(triplet2: LevyTriplet2D, n: int,
                                  policy: HorizonPolicy = DEFAULT_POLICY,
                                  seed: int = 0, *,
                                  config: SimConfig = DEFAULT_SIM,
                                  stream_start: int = 0) -> SamplePool:
    """n independent samples of the limit of I_t, each path extended until
    e^{-xi_T} < tail_tolerance and T >= min_horizon."""
    values = []
    trunc = []
    partial = 0
    thresh = -math.log(policy.tail_tolerance)
    for i in range(n):
        builder = PathBuilder(triplet2, RngStream(seed, stream_start + i), config)
        horizon = policy.min_horizon
        sample_partial = False
        while True:
            builder.extend(horizon)
            if builder.xi_end > thresh and builder.t_end >= policy.min_horizon:
                break
            if builder.t_end >= policy.max_horizon:
                sample_partial = True
                break
            horizon = min(horizon * policy.growth, policy.max_horizon)
        values.append(integrate_exponential(builder.grid()))
        trunc.append(builder.t_end)
        partial += sample_partial
    meta = {
        "kind": "exponential_functional",
        "n": n,
        "seed": seed,
        "stream_start": stream_start,
        "policy": _policy_meta(policy, config),
        "truncation_times": _truncation_summary(trunc),
        "partial_count": partial,
    }
    return SamplePool(values=np.sort(np.asarray(values)), meta=meta)


def _monotone_direction(triplet: LevyTriplet1D) -> int:
    """+1 for non-decreasing paths, -1 for non-increasing, 0 otherwise."""
    if triplet.sigma2 > 0.0:
        return 0
    d = triplet.drift_bv
    if d is None:
        return 0
    if d >= 0.0 and not triplet.has_negative_jumps():
        return 1
    if d <= 0.0 and not triplet.has_positive_jumps():
        return -1
    return 0


def sample_g_functional(triplet: LevyTriplet1D, g: GDescriptor,
                        y: YProcessSpec, n: int,
                        policy: HorizonPolicy = DEFAULT_POLICY,
                        seed: int = 0, *,
                        config: SimConfig = DEFAULT_SIM,
                        stream_start: int = 0) -> SamplePool:
    """n independent samples of int_0^inf g(xi_t) dY_t.

    Horizons grow geometrically; a path stops once it provably cannot
    contribute again (monotone past a compact support), once it has left a
    compact support by the no-return margin, or once two successive chunks
    changed the value by less than the tail tolerance.
    """
    support = g.compact_support or g.indicator_of
    mono = _monotone_direction(triplet)
    drift_verdict = triplet.drifts_to_plus_infinity()
    mean = triplet.mean
    values = []
    trunc = []
    partial = 0
    stop_reasons: dict[str, int] = {}

    for i in range(n):
        xi_stream = RngStream(seed, stream_start + i, (0,))
        y_stream = RngStream(seed, stream_start + i, (1,))
        builder = PathBuilder(triplet, xi_stream, config)
        ybuilder = (PathBuilder(y.triplet, y_stream, config)
                    if y.kind == "subordinator" else None)
        horizon = policy.min_horizon
        prev_val = None
        calm_chunks = 0
        value = 0.0
        reason = "max_horizon"
        sample_partial = False
        while True:
            builder.extend(horizon)
            grid = builder.grid()
            if ybuilder is not None:
                ybuilder.extend(horizon)
                value = _integrate_with_y_grid(grid, g, ybuilder.grid())
            elif y.kind == "deterministic":
                value = _time_integral(grid, g, yfn=y.fn)
            else:
                value = _time_integral(grid, g)

            end = builder.xi_end
            if support is not None:
                lo, hi = support
                if mono > 0 and end > hi:
                    reason = "monotone_exit"
                    break
                if mono < 0 and end < lo:
                    reason = "monotone_exit"
                    break
                margin = policy.margin_factor * (hi - lo)
                if builder.t_end >= policy.min_horizon:
                    if drift_verdict == "yes" and end > hi + margin:
                        reason = "margin_exit"
                        break
                    if (drift_verdict == "no" and not math.isnan(mean)
                            and mean < 0.0 and end < lo - margin):
                        reason = "margin_exit"
                        break
            if prev_val is not None:
                calm = abs(value - prev_val) <= policy.tail_tolerance * max(1.0, abs(value))
                calm_chunks = calm_chunks + 1 if calm else 0
                if calm_chunks >= 2 and builder.t_end >= policy.min_horizon:
                    reason = "stalled_increments"
                    break
            prev_val = value
            if builder.t_end >= policy.max_horizon:
                sample_partial = True
                break
            horizon = min(horizon * policy.growth, policy.max_horizon)
        values.append(value)
        trunc.append(builder.t_end)
        partial += sample_partial
        stop_reasons[reason] = stop_reasons.get(reason, 0) + 1

    meta = {
        "kind": "g_functional",
        "g": g.name,
        "y_kind": y.kind,
        "n": n,
        "seed": seed,
        "stream_start": stream_start,
        "policy": _policy_meta(policy, config),
        "truncation_times": _truncation_summary(trunc),
        "partial_count": partial,
        "stop_reasons": stop_reasons,
    }
    return SamplePool(values=np.sort(np.asarray(values)), meta=meta)


def sample_fixed_point_split(triplet2: LevyTriplet2D, t: float, n: int,
                             policy: HorizonPolicy = DEFAULT_POLICY,
                             seed: int = 0, *,
                             config: SimConfig = DEFAULT_SIM
                             ) -> tuple[SamplePool, SamplePool]:
    """Pools for both sides of the split identity at time t: the functional
    itself, and I_t + e^{-xi_t} * I' with I' an independent fresh copy."""
    direct = sample_exponential_functional(
        triplet2, n, policy, seed, config=config, stream_start=0)
    thresh = -math.log(policy.tail_tolerance)
    values = []
    for i in range(n):
        builder = PathBuilder(triplet2, RngStream(seed, n + i), config)
        builder.extend(t)
        head = integrate_exponential(builder.grid())
        # independent fresh copy of the full functional, unsorted pairing
        fresh = PathBuilder(triplet2, RngStream(seed, 2 * n + i), config)
        horizon = policy.min_horizon
        while True:
            fresh.extend(horizon)
            if fresh.xi_end > thresh and fresh.t_end >= policy.min_horizon:
                break
            if fresh.t_end >= policy.max_horizon:
                break
            horizon = min(horizon * policy.growth, policy.max_horizon)
        values.append(head + math.exp(-builder.xi_end)
                      * integrate_exponential(fresh.grid()))
    meta = {
        "kind": "fixed_point_split",
        "t": t,
        "n": n,
        "seed": seed,
        "policy": _policy_meta(policy, config),
    }
    return direct, SamplePool(values=np.sort(np.asarray(values)), meta=meta)
