"""Jump-measure representations and integration against them.

A measure on R \\ {0} is described by up to three ingredients: a finite list
of atoms, an absolutely continuous density with declared support, and tail
functions z -> mass of (z, inf) respectively (-inf, -z).  Tails may be
declared analytically (preferred: exact sampling and exact tail integrals)
or are derived numerically from the atoms and the density.  A measure may
also be given by its tails alone, which is the only honest way to carry
infinite families of atoms whose locations overflow the float range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .quadrature import (
    DEFAULT_QUAD,
    NumericsError,
    QuadratureConfig,
    bisect_decreasing,
    integrate_interval,
    stieltjes_decreasing,
    sweep_improper,
    sweep_to_zero,
)

Activity = Literal["finite", "infinite"]
Variation = Literal["finite", "infinite"]

_TINY = 1e-300


@dataclass(frozen=True)
class Interval:
    """Interval with explicit endpoint inclusion, used to place atoms correctly."""

    lo: float
    hi: float
    closed_lo: bool = False
    closed_hi: bool = False

    def contains(self, x: np.ndarray) -> np.ndarray:
        lo_ok = x >= self.lo if self.closed_lo else x > self.lo
        hi_ok = x <= self.hi if self.closed_hi else x < self.hi
        return lo_ok & hi_ok


Region = Union[Interval, tuple, list, None]


def _as_intervals(region: Region) -> list[Interval]:
    if region is None:
        return [Interval(-math.inf, math.inf)]
    if isinstance(region, Interval):
        return [region]
    if isinstance(region, tuple):
        return [Interval(float(region[0]), float(region[1]))]
    return [iv if isinstance(iv, Interval) else Interval(float(iv[0]), float(iv[1]))
            for iv in region]


def _vectorized(fn: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Return a version of ``fn`` that accepts arrays, probing once to decide."""
    try:
        out = fn(np.asarray([0.5, 1.5]))
        if np.shape(out) == (2,):
            return fn
    except Exception:
        pass
    vec = np.vectorize(fn, otypes=[float])
    return lambda x: vec(x)


@dataclass(frozen=True)
class LevyMeasure1D:
    """Atoms + optional density + tail functions for a measure on R without 0.

    ``tail_plus``/``tail_minus`` are authoritative when declared; otherwise
    they are derived from atoms and density.  ``tail_plus_inverse`` inverts
    the diffuse (non-atomic) part of the positive tail and is used for exact
    inverse-tail sampling; when absent a vectorised bisection is used.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    density: Callable | None = None
    density_support: tuple[float, float] | None = None
    tail_plus: Callable | None = None
    tail_minus: Callable | None = None
    tail_plus_inverse: Callable | None = None
    tail_minus_inverse: Callable | None = None
    activity: Activity | None = None
    variation: Variation | None = None
    skip_checks: bool = False

    def __post_init__(self) -> None:
        for loc, mass in self.atoms:
            if loc == 0.0 or not math.isfinite(loc):
                raise ValueError(f"atom location must be finite and nonzero, got {loc}")
            if mass <= 0.0 or not math.isfinite(mass):
                raise ValueError(f"atom mass must be positive and finite, got {mass}")
        if self.density is not None and self.density_support is None:
            raise ValueError("a density needs a declared support interval")
        if self.density_support is not None:
            lo, hi = self.density_support
            if not lo < hi:
                raise ValueError("density support must be a nonempty interval")
        if not self.skip_checks:
            self._validate_square_integrability()

    # -- structural helpers -------------------------------------------------

    @cached_property
    def _atom_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.atoms:
            return np.empty(0), np.empty(0)
        locs = np.asarray([a[0] for a in self.atoms], dtype=float)
        masses = np.asarray([a[1] for a in self.atoms], dtype=float)
        order = np.argsort(locs)
        return locs[order], masses[order]

    @cached_property
    def _tail_plus_fn(self) -> Callable[[np.ndarray], np.ndarray] | None:
        return _vectorized(self.tail_plus) if self.tail_plus is not None else None

    @cached_property
    def _tail_minus_fn(self) -> Callable[[np.ndarray], np.ndarray] | None:
        return _vectorized(self.tail_minus) if self.tail_minus is not None else None

    @property
    def is_zero(self) -> bool:
        return (not self.atoms and self.density is None
                and self.tail_plus is None and self.tail_minus is None)

    @property
    def tails_only(self) -> bool:
        """True when the mass is carried by declared tails with no pointwise data."""
        return (self.density is None and not self.atoms
                and (self.tail_plus is not None or self.tail_minus is not None))

    # -- tails ---------------------------------------------------------------

    def atomic_tail_up(self, z) -> np.ndarray:
        locs, masses = self._atom_arrays
        z = np.asarray(z, dtype=float)
        if locs.size == 0:
            return np.zeros(z.shape)
        suffix = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])
        idx = np.searchsorted(locs, z, side="right")
        return suffix[idx]

    def atomic_tail_down(self, z) -> np.ndarray:
        locs, masses = self._atom_arrays
        z = np.asarray(z, dtype=float)
        if locs.size == 0:
            return np.zeros(z.shape)
        prefix = np.concatenate([[0.0], np.cumsum(masses)])
        idx = np.searchsorted(locs, -z, side="left")
        return prefix[idx]

    def tail_up(self, z) -> np.ndarray:
        """Mass of (z, inf) for z > 0."""
        if self._tail_plus_fn is not None:
            return np.asarray(self._tail_plus_fn(np.asarray(z, dtype=float)), dtype=float)
        return self.atomic_tail_up(z) + self._density_tail_up(z)

    def tail_down(self, z) -> np.ndarray:
        """Mass of (-inf, -z) for z > 0."""
        if self._tail_minus_fn is not None:
            return np.asarray(self._tail_minus_fn(np.asarray(z, dtype=float)), dtype=float)
        return self.atomic_tail_down(z) + self._density_tail_down(z)

    def diffuse_tail_up(self, z) -> np.ndarray:
        if self._tail_plus_fn is not None and (self.density is not None or self.tails_only):
            if self.atoms:
                return np.maximum(self.tail_up(z) - self.atomic_tail_up(z), 0.0)
            return self.tail_up(z)
        return self._density_tail_up(z)

    def diffuse_tail_down(self, z) -> np.ndarray:
        if self._tail_minus_fn is not None and (self.density is not None or self.tails_only):
            if self.atoms:
                return np.maximum(self.tail_down(z) - self.atomic_tail_down(z), 0.0)
            return self.tail_down(z)
        return self._density_tail_down(z)

    # -- density tails via cached monotone interpolation ---------------------

    @cached_property
    def _dens_vec(self) -> Callable[[np.ndarray], np.ndarray] | None:
        return _vectorized(self.density) if self.density is not None else None

    def _dens_support_side(self, positive: bool) -> tuple[float, float] | None:
        if self.density_support is None:
            return None
        lo, hi = self.density_support
        if positive:
            lo, hi = max(lo, 0.0), hi
        else:
            lo, hi = lo, min(hi, 0.0)
        return (lo, hi) if lo < hi else None

    def _build_dens_tail(self, positive: bool):
        span = self._dens_support_side(positive)
        if span is None:
            return None
        lo, hi = span
        if not positive:
            lo, hi = -hi, -lo  # work on magnitudes

        dens = self._dens_vec

        def dmag(z):
            return dens(z) if positive else dens(-z)

        z_lo = lo if lo > 0.0 else 1e-12
        if math.isinf(hi):
            z_hi = max(1e8, z_lo * 1e12)
            top = _tail_quad_inf(dmag, z_hi)
        else:
            z_hi = hi
            top = 0.0
        grid = np.geomspace(z_lo, z_hi, 512)
        grid[0], grid[-1] = z_lo, z_hi
        scalar_dens = lambda u: float(dmag(np.asarray(u)))
        segs = np.asarray([
            integrate_interval(scalar_dens, grid[i], grid[i + 1])
            for i in range(grid.size - 1)
        ])
        # tails[i] = mass of (grid[i], z_hi] plus everything above z_hi
        tails = np.concatenate([np.cumsum(segs[::-1])[::-1], [0.0]]) + top
        interp = PchipInterpolator(grid, -tails, extrapolate=False)

        def tail(z):
            z = np.asarray(z, dtype=float)
            out = np.empty(z.shape)
            below = z <= z_lo
            above = z >= z_hi
            mid = ~(below | above)
            out[below] = tails[0]
            out[above] = 0.0
            if np.any(mid):
                out[mid] = np.maximum(-interp(z[mid]), 0.0)
            return out

        return tail, (z_lo, z_hi), float(tails[0])

    @cached_property
    def _dens_tail_up_cache(self):
        return self._build_dens_tail(positive=True)

    @cached_property
    def _dens_tail_down_cache(self):
        return self._build_dens_tail(positive=False)

    def _density_tail_up(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        cache = self._dens_tail_up_cache
        if cache is None:
            return np.zeros(z.shape)
        return cache[0](z)

    def _density_tail_down(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        cache = self._dens_tail_down_cache
        if cache is None:
            return np.zeros(z.shape)
        return cache[0](z)

    # -- activity and variation ----------------------------------------------

    @cached_property
    def activity_kind(self) -> Activity:
        if self.activity is not None:
            return self.activity
        probes = np.asarray([1e-3, 1e-6, 1e-9, 1e-12])
        vals = self.tail_up(probes) + self.tail_down(probes)
        if vals[-1] > 1e14:
            return "infinite"
        if vals[-1] <= 0.0 or vals[-1] / max(vals[0], _TINY) < 1e3:
            return "finite"
        return "infinite"

    @cached_property
    def total_mass(self) -> float:
        if self.activity_kind == "infinite":
            return math.inf
        z = 1e-12
        return float(self.tail_up(z) + self.tail_down(z))

    @cached_property
    def variation_kind(self) -> Variation:
        if self.variation is not None:
            return self.variation
        if self.activity_kind == "finite":
            return "finite"
        try:
            v = integrate_against(self, lambda x: np.abs(x), Interval(-1.0, 1.0))
        except NumericsError:
            return "infinite"
        return "finite" if math.isfinite(v) else "infinite"

    def _validate_square_integrability(self) -> None:
        """Domain check: integral of min(1, x^2) must be finite."""
        if self.is_zero:
            return
        try:
            v = integrate_against(self, lambda x: np.minimum(1.0, np.abs(np.asarray(x))) ** 2)
        except NumericsError as exc:
            raise ValueError(f"measure fails min(1, x^2) integrability: {exc}") from exc
        if not math.isfinite(v):
            raise ValueError("measure fails min(1, x^2) integrability")

    # -- support probes and sampling ------------------------------------------

    def has_positive_part(self) -> bool:
        return bool(self.tail_up(np.asarray(1e-12)) > 0.0) or any(
            l > 0 for l, _ in self.atoms)

    def has_negative_part(self) -> bool:
        return bool(self.tail_down(np.asarray(1e-12)) > 0.0) or any(
            l < 0 for l, _ in self.atoms)

    def probe_points(self, n: int = 24) -> np.ndarray:
        """Deterministic support points: atoms plus diffuse quantiles per side."""
        pts = [loc for loc, _ in self.atoms]
        for positive in (True, False):
            tail = self.diffuse_tail_up if positive else self.diffuse_tail_down
            z0 = 1e-9
            lam = float(tail(np.asarray(z0)))
            if lam <= 0.0:
                continue
            fracs = np.linspace(0.05, 0.95, n)
            zs = self._invert_diffuse(fracs * lam, positive, z0)
            pts.extend((zs if positive else -zs).tolist())
        return np.asarray(sorted(set(pts)))

    def _diffuse_upper_bound(self, positive: bool, z0: float) -> float:
        span = self._dens_support_side(positive)
        if span is not None:
            hi = span[1] if positive else -span[0]
            if math.isfinite(hi):
                return hi
        tail = self.diffuse_tail_up if positive else self.diffuse_tail_down
        hi = max(1.0, z0 * 2.0)
        for _ in range(1200):
            if float(tail(np.asarray(hi))) <= 0.0 or hi > 8e307:
                return min(hi, 8e307)
            hi *= 2.0
        return 8e307

    def _invert_diffuse(self, masses: np.ndarray, positive: bool, z0: float) -> np.ndarray:
        """Generalised inverse of the diffuse tail restricted to (z0, inf)."""
        inv = self.tail_plus_inverse if positive else self.tail_minus_inverse
        if inv is not None:
            return np.asarray(_vectorized(inv)(np.asarray(masses, dtype=float)), dtype=float)
        tail = self.diffuse_tail_up if positive else self.diffuse_tail_down
        hi = self._diffuse_upper_bound(positive, z0)
        return bisect_decreasing(tail, np.asarray(masses, dtype=float), z0, hi)

    def sample_magnitudes(self, rng: np.random.Generator, n: int,
                          positive: bool, threshold: float) -> np.ndarray:
        """Sample n jump magnitudes from the side restricted to (threshold, inf)."""
        if n == 0:
            return np.empty(0)
        tail = self.tail_up if positive else self.tail_down
        lam = float(tail(np.asarray(threshold)))
        if lam <= 0.0:
            raise ValueError("no mass beyond threshold on requested side")
        locs, masses = self._atom_arrays
        if positive:
            sel = locs > threshold
            alocs, amass = locs[sel], masses[sel]
        else:
            sel = locs < -threshold
            alocs, amass = -locs[sel], masses[sel]
        atomic = float(amass.sum())
        diffuse = max(lam - atomic, 0.0)
        u = rng.random(n) * lam
        out = np.empty(n)
        take_atom = u < atomic
        if np.any(take_atom):
            cum = np.cumsum(amass)
            idx = np.searchsorted(cum, u[take_atom], side="right")
            idx = np.minimum(idx, alocs.size - 1)
            out[take_atom] = alocs[idx]
        n_diff = int(np.count_nonzero(~take_atom))
        if n_diff:
            if diffuse <= 0.0:
                # Tiny numerical slack between declared tail and atom sum.
                out[~take_atom] = alocs[-1] if alocs.size else threshold
            else:
                w = rng.random(n_diff)
                base = float((self.diffuse_tail_up if positive else
                              self.diffuse_tail_down)(np.asarray(threshold)))
                out[~take_atom] = self._invert_diffuse(w * base, positive, threshold)
        return out


EMPTY_MEASURE = LevyMeasure1D()


def _tail_quad_inf(dmag, z: float) -> float:
    import scipy.integrate as si
    val, _ = si.quad(lambda u: float(dmag(np.asarray(u))), z, math.inf,
                     epsabs=1e-12, epsrel=1e-10, limit=200)
    return max(val, 0.0)


# -- integration -------------------------------------------------------------


def integrate_against(
    measure: LevyMeasure1D,
    fn: Callable,
    region: Region = None,
    *,
    cfg: QuadratureConfig = DEFAULT_QUAD,
) -> float:
    """Integral of ``fn`` against the measure over ``region``.

    Atoms are summed directly, the density part goes through adaptive
    quadrature, and tail-only mass through a Riemann-Stieltjes rule.
    Unbounded regions are resolved by a geometric truncation sweep; monotone
    growth past the divergence threshold yields a signed infinity, and
    opposite-signed divergences raise :class:`NumericsError`.
    ``region`` is one or more intervals, open at finite endpoints unless an
    :class:`Interval` with closed flags is passed.
    """
    fvec = _vectorized(fn)
    total = 0.0
    for iv in _as_intervals(region):
        total += _atomic_part(measure, fvec, iv)
        pieces = [
            _diffuse_part(measure, fvec, iv, positive=True, cfg=cfg),
            _diffuse_part(measure, fvec, iv, positive=False, cfg=cfg),
        ]
        for p in pieces:
            if math.isinf(p) and math.isinf(total) and (p > 0) != (total > 0):
                raise NumericsError("opposite-signed divergent parts; integral undefined")
            total += p
    return total


def _atomic_part(measure: LevyMeasure1D, fvec, iv: Interval) -> float:
    locs, masses = measure._atom_arrays
    if locs.size == 0:
        return 0.0
    keep = iv.contains(locs)
    if not np.any(keep):
        return 0.0
    return float(np.sum(fvec(locs[keep]) * masses[keep]))


def _diffuse_part(measure: LevyMeasure1D, fvec, iv: Interval, *,
                  positive: bool, cfg: QuadratureConfig) -> float:
    """Diffuse mass of one side intersected with the interval."""
    if positive:
        lo, hi = max(iv.lo, 0.0), iv.hi
        if hi <= 0.0 or hi <= lo:
            return 0.0
    else:
        lo, hi = iv.lo, min(iv.hi, 0.0)
        if lo >= 0.0 or hi <= lo:
            return 0.0
        # reflect to magnitudes: x in (lo, hi) with x<0  <->  m in (-hi, -lo)
        lo, hi = -hi, -lo

    if positive:
        dens_span = measure._dens_support_side(True)
        tail = measure.diffuse_tail_up
        f_signed = fvec
    else:
        dens_span = measure._dens_support_side(False)
        tail = measure.diffuse_tail_down
        f_signed = lambda m: fvec(-np.asarray(m))

    if measure.density is not None and dens_span is not None:
        d_lo, d_hi = dens_span
        if not positive:
            d_lo, d_hi = -d_hi, -d_lo
        a, b = max(lo, d_lo), min(hi, d_hi)
        if b <= a:
            return 0.0
        dens = measure._dens_vec

        def integrand(u: float) -> float:
            x = u if positive else -u
            return float(f_signed(np.asarray(u))) * float(dens(np.asarray(x)))

        def segment(w0, w1):
            return integrate_interval(integrand, w0, w1, cfg=cfg)

        total = 0.0
        inner = a
        outer = b
        if a <= max(1e-10, 1e-10 * min(b, 1.0)) and d_lo <= a:
            # support touches the origin: resolve the shells (0, anchor] by a
            # descending sweep so divergence there is detected, not truncated
            anchor = min(1.0 if math.isinf(b) else b, 1.0)
            total += sweep_to_zero(segment, anchor, cfg=cfg)
            inner = anchor
        if math.isinf(outer):
            start = max(inner, 1e-12)
            anchor = max(start, 1.0)
            if anchor > start:
                total += segment(start, anchor)
            resid = lambda w: float(f_signed(np.asarray(w))) * float(tail(np.asarray(w)))
            total += sweep_improper(segment, anchor, cfg=cfg, residual=resid)
            return total
        if outer > inner:
            total += segment(inner, outer)
        return total

    if measure.tails_only:
        def segment(w0, w1):
            return stieltjes_decreasing(f_signed, tail, w0, w1, cfg=cfg)

        total = 0.0
        inner = lo
        if lo <= 1e-10 and float(tail(np.asarray(1e-290))) > float(tail(np.asarray(1e-10))):
            anchor = min(hi, 1.0)
            total += sweep_to_zero(segment, anchor, cfg=cfg)
            inner = anchor
        inner = max(inner, 1e-290)
        if float(tail(np.asarray(inner))) <= 0.0:
            return total
        if math.isinf(hi):
            anchor = max(inner, 1.0)
            if anchor > inner:
                total += segment(inner, anchor)
            resid = lambda w: float(f_signed(np.asarray(w))) * float(tail(np.asarray(w)))
            total += sweep_improper(segment, anchor, cfg=cfg, residual=resid)
            return total
        if hi > inner:
            total += segment(inner, hi)
        return total

    return 0.0


# -- bivariate measures -------------------------------------------------------


class LevyMeasure2D:
    """Base for bivariate jump measures; concrete forms below."""

    def marginal(self, axis: int) -> LevyMeasure1D:
        raise NotImplementedError

    def support_probes(self, n: int = 24) -> np.ndarray:
        """Deterministic (x, y) support points for structural checks."""
        raise NotImplementedError

    @property
    def is_zero(self) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class ProductIndependent(LevyMeasure2D):
    """Independent components: mass concentrated on the coordinate axes."""

    pi_xi: LevyMeasure1D
    pi_eta: LevyMeasure1D

    def marginal(self, axis: int) -> LevyMeasure1D:
        return self.pi_xi if axis == 0 else self.pi_eta

    def support_probes(self, n: int = 24) -> np.ndarray:
        xs = self.pi_xi.probe_points(n)
        ys = self.pi_eta.probe_points(n)
        pts = [(x, 0.0) for x in xs] + [(0.0, y) for y in ys]
        return np.asarray(pts) if pts else np.empty((0, 2))

    @property
    def is_zero(self) -> bool:
        return self.pi_xi.is_zero and self.pi_eta.is_zero


@dataclass(frozen=True)
class JointAtoms(LevyMeasure2D):
    """Finite list of joint jumps ((x, y), mass)."""

    atoms: tuple[tuple[tuple[float, float], float], ...]

    def __post_init__(self) -> None:
        for (x, y), mass in self.atoms:
            if x == 0.0 and y == 0.0:
                raise ValueError("joint atom at the origin is not a jump")
            if mass <= 0.0:
                raise ValueError("atom mass must be positive")

    def marginal(self, axis: int) -> LevyMeasure1D:
        acc: dict[float, float] = {}
        for (x, y), mass in self.atoms:
            v = x if axis == 0 else y
            if v != 0.0:
                acc[v] = acc.get(v, 0.0) + mass
        return LevyMeasure1D(atoms=tuple(sorted(acc.items())), skip_checks=True)

    def support_probes(self, n: int = 24) -> np.ndarray:
        return np.asarray([[x, y] for (x, y), _ in self.atoms])

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def total_rate(self) -> float:
        return float(sum(m for _, m in self.atoms))


@dataclass(frozen=True)
class CurveSupported(LevyMeasure2D):
    """Mass on the curve y = k (1 - e^{-x}), parametrised by the xi-jump x."""

    k: float
    base: LevyMeasure1D

    def __post_init__(self) -> None:
        if self.k == 0.0 or not math.isfinite(self.k):
            raise ValueError("curve parameter k must be finite and nonzero")

    def curve_y(self, x) -> np.ndarray:
        return self.k * (-np.expm1(-np.asarray(x, dtype=float)))

    def curve_x(self, y) -> np.ndarray:
        return -np.log1p(-np.asarray(y, dtype=float) / self.k)

    def marginal(self, axis: int) -> LevyMeasure1D:
        if axis == 0:
            return self.base
        return curve_image_measure(self.base, self.k)

    def support_probes(self, n: int = 24) -> np.ndarray:
        xs = self.base.probe_points(n)
        if xs.size == 0:
            return np.empty((0, 2))
        return np.column_stack([xs, self.curve_y(xs)])

    @property
    def is_zero(self) -> bool:
        return self.base.is_zero


def curve_image_measure(base: LevyMeasure1D, k: float) -> LevyMeasure1D:
    """Image of ``base`` under x -> k(1 - e^{-x}); the eta-marginal on the curve."""
    fwd = lambda x: k * (-np.expm1(-np.asarray(x, dtype=float)))
    inv = lambda y: -np.log1p(-np.asarray(y, dtype=float) / k)

    atoms = tuple((float(fwd(np.asarray(x))), m) for x, m in base.atoms)

    density = None
    support = None
    if base.density is not None:
        b_lo, b_hi = base.density_support
        dens = base._dens_vec

        def density(y, _dens=dens, _inv=inv, _k=k):
            y = np.asarray(y, dtype=float)
            x = _inv(y)
            return _dens(x) / np.abs(_k - y)

        ends = sorted([float(fwd(np.asarray(b_lo))), float(fwd(np.asarray(b_hi)))])
        support = (ends[0], ends[1])

    # Exact tail transforms: order is preserved for k > 0 and flipped for k < 0.
    def tail_plus(w, _base=base, _k=k):
        w = np.asarray(w, dtype=float)
        if _k > 0:
            inside = w < _k
            out = np.zeros(w.shape)
            ws = np.clip(w, None, _k * (1 - 1e-16))
            out[inside] = _base.tail_up(-np.log1p(-ws[inside] / _k))
            return out
        return _base.tail_down(np.log1p(w / (-_k)))

    def tail_minus(w, _base=base, _k=k):
        w = np.asarray(w, dtype=float)
        if _k > 0:
            return _base.tail_down(np.log1p(w / _k))
        inside = w < -_k
        out = np.zeros(w.shape)
        ws = np.clip(w, None, (-_k) * (1 - 1e-16))
        out[inside] = _base.tail_up(-np.log1p(-ws[inside] / (-_k)))
        return out

    return LevyMeasure1D(
        atoms=atoms,
        density=density,
        density_support=support,
        tail_plus=tail_plus,
        tail_minus=tail_minus,
        activity=base.activity_kind,
        variation=base.variation_kind,
        skip_checks=True,
    )


def marginal_tails(measure: LevyMeasure2D) -> tuple[LevyMeasure1D, LevyMeasure1D]:
    """Marginal jump measures (and thus tails) of a bivariate measure."""
    return measure.marginal(0), measure.marginal(1)
