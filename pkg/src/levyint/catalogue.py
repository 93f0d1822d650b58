"""Named builders for processes, pairs, test functions, integrators, oracles.

Every entry is addressable from experiment files by name + keyword params.
Jump measures carry exact tail functions and tail inverses where a closed
form exists, so inverse-tail sampling stays bias-free.  User-supplied
tabulated densities can be registered from a directory of JSON files.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import stats

from .functionals import GDescriptor, YProcessSpec
from .measures import (EMPTY_MEASURE, JointAtoms, LevyMeasure1D,
                       ProductIndependent)
from .triplets import LevyTriplet1D, LevyTriplet2D, doleans_xi_from_eta

_PROCESSES: dict[str, tuple[Callable, str]] = {}
_PAIRS: dict[str, tuple[Callable, str]] = {}
_G_FUNCS: dict[str, tuple[Callable, str]] = {}
_Y_PROCS: dict[str, tuple[Callable, str]] = {}
_ORACLES: dict[str, tuple[Callable, str]] = {}


def _register(registry: dict, name: str, summary: str):
    def deco(fn):
        registry[name] = (fn, summary)
        return fn
    return deco


def _build(registry: dict, kind: str, name: str, params: dict):
    if name not in registry:
        known = ", ".join(sorted(registry))
        raise ValueError(f"unknown {kind} {name!r}; available: {known}")
    builder, _ = registry[name]
    try:
        return builder(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for {kind} {name!r}: {exc}") from exc


def build_process(name: str, **params) -> LevyTriplet1D:
    return _build(_PROCESSES, "process", name, params)


def build_pair(name: str, **params) -> LevyTriplet2D:
    return _build(_PAIRS, "pair", name, params)


def build_g(name: str, **params) -> GDescriptor:
    return _build(_G_FUNCS, "g function", name, params)


def build_y(name: str, **params) -> YProcessSpec:
    return _build(_Y_PROCS, "integrator", name, params)


def build_oracle(name: str, **params):
    return _build(_ORACLES, "oracle", name, params)


def known(kind: str) -> frozenset[str]:
    """Names currently registered under 'process', 'pair', 'g', 'y', 'oracle'."""
    registries = {"process": _PROCESSES, "pair": _PAIRS, "g": _G_FUNCS,
                  "y": _Y_PROCS, "oracle": _ORACLES}
    if kind not in registries:
        raise ValueError(f"no registry named {kind!r}")
    return frozenset(registries[kind])


def resolve_process(spec: dict) -> LevyTriplet1D:
    """Build a process from a {"name": ..., ...params} table."""
    spec = dict(spec)
    name = spec.pop("name", None)
    if name is None:
        name = spec.pop("process", None)
    if name is None:
        raise ValueError("process table needs a 'name' key")
    return build_process(name, **spec)


# -- one-dimensional processes -------------------------------------------------


@_register(_PROCESSES, "drift", "deterministic linear drift")
def _drift(rate: float = 1.0) -> LevyTriplet1D:
    return LevyTriplet1D(float(rate), 0.0)


@_register(_PROCESSES, "brownian_drift", "Brownian motion with drift")
def _brownian_drift(mu: float = 1.0, sigma2: float = 1.0) -> LevyTriplet1D:
    return LevyTriplet1D(float(mu), float(sigma2))


@_register(_PROCESSES, "cpp",
           "compound Poisson with optional drift; jump in fixed/uniform/exponential")
def _cpp(rate: float = 1.0, jump: str = "fixed", size: float = 1.0,
         lo: float = 0.0, hi: float = 0.5, scale: float = 1.0,
         drift: float = 0.0) -> LevyTriplet1D:
    rate = float(rate)
    if rate <= 0.0:
        raise ValueError("cpp rate must be positive")
    if jump == "fixed":
        size = float(size)
        measure = LevyMeasure1D(atoms=((size, rate),),
                                activity="finite", variation="finite")
        small = size * rate if abs(size) <= 1.0 else 0.0
    elif jump == "uniform":
        lo, hi = float(lo), float(hi)
        if not lo < hi or lo * hi < 0.0:
            raise ValueError("uniform jump interval must not straddle 0")
        height = rate / (hi - lo)
        if hi > 0.0:
            def tail_p(z, _lo=lo, _hi=hi, _r=rate):
                z = np.asarray(z, dtype=float)
                return _r * np.clip((_hi - np.maximum(z, _lo)) / (_hi - _lo), 0.0, 1.0)

            def tail_p_inv(w, _lo=lo, _hi=hi, _r=rate):
                w = np.asarray(w, dtype=float)
                return _hi - np.clip(w / _r, 0.0, 1.0) * (_hi - _lo)

            tails = dict(tail_plus=tail_p, tail_plus_inverse=tail_p_inv)
        else:
            def tail_m(z, _lo=lo, _hi=hi, _r=rate):
                z = np.asarray(z, dtype=float)  # z is the magnitude
                return _r * np.clip((np.maximum(z, -_hi) + _hi) / (_hi - _lo), 0.0, 1.0)

            def tail_m_inv(w, _lo=lo, _hi=hi, _r=rate):
                w = np.asarray(w, dtype=float)
                return -_hi + np.clip(w / _r, 0.0, 1.0) * (_hi - _lo)

            tails = dict(tail_minus=tail_m, tail_minus_inverse=tail_m_inv)
        measure = LevyMeasure1D(
            density=lambda z, _h=height: np.full(np.asarray(z, dtype=float).shape, _h),
            density_support=(lo, hi), activity="finite", variation="finite",
            **tails)
        a, b = max(lo, -1.0), min(hi, 1.0)
        small = height * (b * b - a * a) / 2.0 if a < b else 0.0
    elif jump == "exponential":
        scale = float(scale)
        if scale <= 0.0:
            raise ValueError("exponential jump scale must be positive")

        def dens(z, _r=rate, _s=scale):
            z = np.asarray(z, dtype=float)
            return _r * np.exp(-z / _s) / _s

        measure = LevyMeasure1D(
            density=dens, density_support=(0.0, math.inf),
            tail_plus=lambda z, _r=rate, _s=scale: _r * np.exp(-np.asarray(z, dtype=float) / _s),
            tail_plus_inverse=lambda w, _r=rate, _s=scale: _s * np.log(_r / np.asarray(w, dtype=float)),
            activity="finite", variation="finite")
        small = rate * (scale - (1.0 + scale) * math.exp(-1.0 / scale))
    else:
        raise ValueError(f"unknown cpp jump law {jump!r}")
    return LevyTriplet1D(float(drift) + small, 0.0, measure)


@_register(_PROCESSES, "stable_tail_alpha",
           "subordinator-style measure x^(-1-alpha) on (0,1] with exact tail")
def _stable_tail(alpha: float = 0.5, drift: float = 0.0) -> LevyTriplet1D:
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")

    def dens(z, _a=alpha):
        z = np.asarray(z, dtype=float)
        return z ** (-1.0 - _a)

    def tail(z, _a=alpha):
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        inside = (z > 0.0) & (z < 1.0)
        out[inside] = (z[inside] ** -_a - 1.0) / _a
        return out

    def tail_inv(w, _a=alpha):
        w = np.asarray(w, dtype=float)
        return (1.0 + _a * w) ** (-1.0 / _a)

    variation = "finite" if alpha < 1.0 else "infinite"
    measure = LevyMeasure1D(density=dens, density_support=(0.0, 1.0),
                            tail_plus=tail, tail_plus_inverse=tail_inv,
                            activity="infinite", variation=variation)
    if alpha < 1.0:
        gamma = float(drift) + 1.0 / (1.0 - alpha)
    else:
        gamma = float(drift)
    return LevyTriplet1D(gamma, 0.0, measure)


@_register(_PROCESSES, "power_tail",
           "density mass*alpha*|z|^(-1-alpha) beyond 1 on one side")
def _power_tail(alpha: float = 1.0, mass: float = 1.0,
                side: str = "positive", gamma: float = 0.0) -> LevyTriplet1D:
    alpha, mass = float(alpha), float(mass)
    if alpha <= 0.0 or mass <= 0.0:
        raise ValueError("alpha and mass must be positive")
    positive = side == "positive"
    if not positive and side != "negative":
        raise ValueError("side must be 'positive' or 'negative'")

    def dens(z, _a=alpha, _m=mass):
        z = np.abs(np.asarray(z, dtype=float))
        return _m * _a * z ** (-1.0 - _a)

    def tail(z, _a=alpha, _m=mass):
        z = np.asarray(z, dtype=float)  # magnitude
        return _m * np.where(z <= 1.0, 1.0, np.maximum(z, 1.0) ** -_a)

    def tail_inv(w, _a=alpha, _m=mass):
        w = np.asarray(w, dtype=float)
        return (w / _m) ** (-1.0 / _a)

    support = (1.0, math.inf) if positive else (-math.inf, -1.0)
    kw = (dict(tail_plus=tail, tail_plus_inverse=tail_inv) if positive
          else dict(tail_minus=tail, tail_minus_inverse=tail_inv))
    measure = LevyMeasure1D(density=dens, density_support=support,
                            activity="finite", variation="finite", **kw)
    return LevyTriplet1D(float(gamma), 0.0, measure)


@_register(_PROCESSES, "sparse_log_atoms",
           "unit mass split over doubly-exponentially sparse atoms, tail form")
def _sparse_log_atoms(gamma: float = 0.0) -> LevyTriplet1D:
    def tail(z):
        z = np.asarray(z, dtype=float)
        out = np.ones(z.shape)
        big = z >= math.e ** 2
        lz = np.log(np.maximum(z, 2.0))
        out[big] = 2.0 ** -np.floor(np.log2(lz[big]))
        return out

    measure = LevyMeasure1D(tail_plus=tail, activity="finite", variation="finite")
    return LevyTriplet1D(float(gamma), 0.0, measure)


# -- bivariate pairs -----------------------------------------------------------


@_register(_PAIRS, "curve_degenerate",
           "pair whose exponential integral is the constant k, built from eta")
def _curve_degenerate(eta: dict | None = None, k: float = 1.0) -> LevyTriplet2D:
    if eta is None:
        eta = {"process": "cpp", "jump": "uniform", "lo": 0.0, "hi": 0.5}
    return doleans_xi_from_eta(resolve_process(eta), float(k))


@_register(_PAIRS, "independent", "independent components from two process tables")
def _independent(xi: dict, eta: dict) -> LevyTriplet2D:
    t1, t2 = resolve_process(xi), resolve_process(eta)
    return LevyTriplet2D(
        (t1.gamma, t2.gamma),
        ((t1.sigma2, 0.0), (0.0, t2.sigma2)),
        ProductIndependent(t1.measure, t2.measure))


@_register(_PAIRS, "joint_gaussian", "correlated Brownian pair, no jumps")
def _joint_gaussian(gamma: tuple = (1.0, 0.0),
                    sigma: tuple = ((1.0, 0.0), (0.0, 1.0))) -> LevyTriplet2D:
    g = (float(gamma[0]), float(gamma[1]))
    s = tuple(tuple(float(v) for v in row) for row in sigma)
    return LevyTriplet2D(g, s, ProductIndependent(EMPTY_MEASURE, EMPTY_MEASURE))


@_register(_PAIRS, "joint_atoms", "finite list of simultaneous jumps")
def _joint_atoms(atoms: list, gamma: tuple = (1.0, 0.0),
                 sigma: tuple = ((0.0, 0.0), (0.0, 0.0))) -> LevyTriplet2D:
    parsed = tuple(((float(x), float(y)), float(m)) for x, y, m in atoms)
    g = (float(gamma[0]), float(gamma[1]))
    s = tuple(tuple(float(v) for v in row) for row in sigma)
    return LevyTriplet2D(g, s, JointAtoms(parsed))


# -- g functions ---------------------------------------------------------------


@_register(_G_FUNCS, "indicator", "indicator of a closed interval")
def _indicator(lo: float = 0.0, hi: float = 1.0) -> GDescriptor:
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError("indicator needs lo < hi")

    def fn(x, _lo=lo, _hi=hi):
        x = np.asarray(x, dtype=float)
        return ((x >= _lo) & (x <= _hi)).astype(float)

    return GDescriptor(
        fn, name=f"indicator[{lo:g},{hi:g}]", nonneg=True, integrable=True,
        compact_support=(lo, hi), indicator_of=(lo, hi),
        support_interior_contains_0=lo < 0.0 < hi,
        positive_on_interior=True, boundary="finite",
        g0_nonzero=lo <= 0.0 <= hi, positive_near_0=lo < 0.0 < hi,
        countable_discontinuities=True)


@_register(_G_FUNCS, "bump", "smooth compactly supported bump")
def _bump(radius: float = 1.0, center: float = 0.0) -> GDescriptor:
    radius, center = float(radius), float(center)
    if radius <= 0.0:
        raise ValueError("bump radius must be positive")

    def fn(x, _r=radius, _c=center):
        u = (np.asarray(x, dtype=float) - _c) / _r
        out = np.zeros(u.shape)
        inside = np.abs(u) < 1.0
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out

    around_0 = abs(center) < radius
    return GDescriptor(
        fn, name=f"bump(r={radius:g})", nonneg=True, integrable=True,
        compact_support=(center - radius, center + radius),
        support_interior_contains_0=around_0, positive_on_interior=True,
        boundary="finite", g0_nonzero=around_0, positive_near_0=around_0,
        countable_discontinuities=True)


@_register(_G_FUNCS, "exp_decay", "strictly decreasing exponential")
def _exp_decay(rate: float = 1.0, window: tuple | None = None) -> GDescriptor:
    rate = float(rate)
    if rate <= 0.0:
        raise ValueError("decay rate must be positive")

    def fn(x, _r=rate):
        return np.exp(-_r * np.asarray(x, dtype=float))

    return GDescriptor(
        fn, name=f"exp_decay({rate:g})", nonneg=True, g0_nonzero=True,
        positive_near_0=True, strictly_monotone_near_0=True,
        countable_discontinuities=True, level_set_near_0=1.0,
        level_set_window=tuple(float(v) for v in window) if window else None)


@_register(_G_FUNCS, "gaussian", "centred Gaussian profile")
def _gaussian(width: float = 1.0, window: tuple | None = None) -> GDescriptor:
    width = float(width)
    if width <= 0.0:
        raise ValueError("width must be positive")

    def fn(x, _w=width):
        u = np.asarray(x, dtype=float) / _w
        return np.exp(-u * u)

    # any shift moves the profile off itself except at a single point
    return GDescriptor(
        fn, name=f"gaussian(w={width:g})", nonneg=True, g0_nonzero=True,
        positive_near_0=True, countable_discontinuities=True,
        integrable=True, level_set_near_0=1.0,
        level_set_window=tuple(float(v) for v in window) if window else None)


@_register(_G_FUNCS, "zero", "the zero function")
def _zero() -> GDescriptor:
    return GDescriptor(lambda x: np.zeros(np.asarray(x, dtype=float).shape),
                       name="zero", nonneg=True, integrable=True,
                       countable_discontinuities=True)


# -- integrator processes ------------------------------------------------------


@_register(_Y_PROCS, "identity", "Y_t = t")
def _identity() -> YProcessSpec:
    return YProcessSpec(kind="identity")


@_register(_Y_PROCS, "subordinator", "independent subordinator from a process table")
def _subordinator_y(process: dict, ac_density_nonvanishing: bool = False) -> YProcessSpec:
    return YProcessSpec(kind="subordinator", triplet=resolve_process(process),
                        ac_density_nonvanishing=bool(ac_density_nonvanishing))


@_register(_Y_PROCS, "power_time", "deterministic Y_t = t^p")
def _power_time(p: float = 1.0) -> YProcessSpec:
    p = float(p)
    if p <= 0.0:
        raise ValueError("exponent must be positive")
    return YProcessSpec(kind="deterministic",
                        fn=lambda t, _p=p: np.asarray(t, dtype=float) ** _p,
                        strictly_increasing=True)


# -- oracles -------------------------------------------------------------------


@_register(_ORACLES, "dufresne_inverse_gamma",
           "law of int e^(-(sigma B + mu t)) dt: inverse gamma")
def _dufresne(sigma2: float = 2.0, mu: float = 1.0):
    sigma2, mu = float(sigma2), float(mu)
    if sigma2 <= 0.0 or mu <= 0.0:
        raise ValueError("needs sigma2 > 0 and mu > 0")
    return stats.invgamma(2.0 * mu / sigma2, scale=2.0 / sigma2)


@_register(_ORACLES, "gamma", "gamma distribution")
def _gamma_oracle(a: float = 1.0, scale: float = 1.0):
    return stats.gamma(float(a), scale=float(scale))


@_register(_ORACLES, "exponential", "exponential distribution")
def _exponential_oracle(scale: float = 1.0):
    return stats.expon(scale=float(scale))


@_register(_ORACLES, "uniform", "uniform distribution on an interval")
def _uniform_oracle(lo: float = 0.0, hi: float = 1.0):
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError("uniform oracle needs lo < hi")
    return stats.uniform(loc=lo, scale=hi - lo)


@_register(_ORACLES, "truncated_exponential",
           "exponential conditioned to lie below a cap")
def _truncexp_oracle(scale: float = 1.0, hi: float = 1.0):
    scale, hi = float(scale), float(hi)
    if scale <= 0.0 or hi <= 0.0:
        raise ValueError("needs positive scale and cap")
    return stats.truncexpon(b=hi / scale, scale=scale)


# -- user-registered tabulated densities ---------------------------------------


def load_user_dir(path: str | Path) -> list[str]:
    """Register tabulated-density processes from JSON files in a directory.

    Each file holds {"name", "x": grid, "density": values, "drift"?, "sigma2"?}.
    The density is interpolated linearly on its grid and zero outside.
    Returns the registered names.
    """
    path = Path(path)
    names: list[str] = []
    if not path.is_dir():
        return names
    for file in sorted(path.glob("*.json")):
        try:
            raw = json.loads(file.read_text())
            name = str(raw["name"])
            xs = np.asarray(raw["x"], dtype=float)
            ys = np.asarray(raw["density"], dtype=float)
            drift = float(raw.get("drift", 0.0))
            sigma2 = float(raw.get("sigma2", 0.0))
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            raise ValueError(f"bad user catalogue file {file.name}: {exc}") from exc
        if xs.ndim != 1 or xs.size < 2 or xs.size != ys.size:
            raise ValueError(f"bad user catalogue file {file.name}: "
                             "x and density must be equal-length grids")
        if np.any(np.diff(xs) <= 0.0) or np.any(ys < 0.0):
            raise ValueError(f"bad user catalogue file {file.name}: "
                             "x must increase and density be nonnegative")
        if xs[0] < 0.0 < xs[-1]:
            raise ValueError(f"bad user catalogue file {file.name}: "
                             "density grid must not straddle 0")

        def builder(_xs=xs, _ys=ys, _drift=drift, _s2=sigma2):
            dens = lambda z: np.interp(np.asarray(z, dtype=float), _xs, _ys,
                                       left=0.0, right=0.0)
            measure = LevyMeasure1D(density=dens,
                                    density_support=(float(_xs[0]), float(_xs[-1])),
                                    activity="finite", variation="finite")
            from .measures import integrate_against
            small = integrate_against(measure, lambda z: np.asarray(z), (-1.0, 1.0))
            return LevyTriplet1D(_drift + small, _s2, measure)

        _PROCESSES[name] = (builder, f"user density from {file.name}")
        names.append(name)
    return names


def listing() -> str:
    """Deterministic text registry of every named entry."""
    out: list[str] = []
    for title, registry in (("processes", _PROCESSES), ("pairs", _PAIRS),
                            ("g functions", _G_FUNCS), ("integrators", _Y_PROCS),
                            ("oracles", _ORACLES)):
        out.append(f"{title}:")
        width = max(len(n) for n in registry)
        for name in sorted(registry):
            out.append(f"  {name:<{width}}  {registry[name][1]}")
    return "\n".join(out)
