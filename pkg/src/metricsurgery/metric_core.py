"""Reduced 3-metrics and their curvature, volume and level-set geometry.

Two shapes are supported, both written as ``N(x)^2 dx^2 + (fiber part)``:

* doubly warped: ``dt^2 + f1^2 (1 - a^2) dth1^2 + f2^2 dth2^2`` over a flat
  torus with both angles of period ``2 pi``;
* spherical: ``dt^2 + f^2 ds^2_{S^2}``.

``t`` is arclength (``dt = N dx``).  Keeping a lapse ``N`` lets catalog metrics
use regular coordinates (e.g. ``r = 2m + y^2`` through a Schwarzschild
horizon) while every curvature formula is applied to arclength derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import sympy as sp
from scipy import integrate, optimize

from .errors import (ConePoint, GridOutOfDomain, NoCenter, QuadratureNonconvergent,
                     WarpingNonpositiveOnGrid)
from .jets import Jet, to_arclength
from .warp import WarpFn, as_expr

SPHERICAL = "spherical"
DOUBLY = "doubly_warped"

SPHERE_AREA = 4.0 * np.pi
TORUS_PERIODS = (2.0 * np.pi) ** 2

C0_CURVATURE = 1e-3
MU_VOLUME = 1e-1

CONE_TOL = 1e-12


def default_grid_points() -> int:
    import os

    return int(os.environ.get("MSL_GRID_POINTS", "2048"))


@dataclass(frozen=True, eq=False)
class Metric1D:
    shape: str
    warps: tuple[WarpFn, ...]
    domain: tuple[float, float]
    a: float = 0.0
    lapse: WarpFn | None = None
    label: str = ""
    coordinate: str = "t"
    grid_hint: str = "uniform"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in (SPHERICAL, DOUBLY):
            raise ValueError(f"unknown shape {self.shape!r}")
        if len(self.warps) != (1 if self.shape == SPHERICAL else 2):
            raise ValueError("spherical metrics take one warping, doubly warped take two")
        if not self.a * self.a < 1.0:
            raise ValueError("torus angle cosine must satisfy a^2 < 1")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty domain {self.domain}")

    # --- constructors -------------------------------------------------
    @classmethod
    def spherical(cls, f, domain, lapse=None, **kw) -> "Metric1D":
        return cls(SPHERICAL, (_warp(f, domain),), tuple(map(float, domain)),
                   lapse=None if lapse is None else _warp(lapse, domain), **kw)

    @classmethod
    def doubly_warped(cls, f1, f2, a, domain, lapse=None, **kw) -> "Metric1D":
        return cls(DOUBLY, (_warp(f1, domain), _warp(f2, domain)), tuple(map(float, domain)),
                   a=float(a), lapse=None if lapse is None else _warp(lapse, domain), **kw)

    # --- derived metrics ----------------------------------------------
    def scaled(self, lam: float) -> "Metric1D":
        """The metric ``lam^2 g`` in the same coordinate."""
        lapse = self.lapse.scaled(lam) if self.lapse is not None else WarpFn.closed_form(
            sp.Float(lam), self.domain, "constant")
        return replace(self, warps=tuple(w.scaled(lam) for w in self.warps), lapse=lapse)

    def conformal(self, u) -> "Metric1D":
        """The metric ``u^2 g`` for a closed-form radial ``u``."""
        u = as_expr(u)
        lapse = (self.lapse.times(u) if self.lapse is not None
                 else WarpFn.closed_form(u, self.domain))
        return replace(self, warps=tuple(w.times(u) for w in self.warps), lapse=lapse,
                       label=f"{self.label} (conformal)")

    def restricted(self, lo: float, hi: float, **kw) -> "Metric1D":
        d0, d1 = self.domain
        if lo < d0 - _slack(self.domain) or hi > d1 + _slack(self.domain):
            raise GridOutOfDomain(f"[{lo}, {hi}] not inside {self.domain}")
        return replace(self, domain=(float(lo), float(hi)), **kw)

    # --- evaluation ---------------------------------------------------
    @property
    def fiber_factor(self) -> float:
        if self.shape == SPHERICAL:
            return SPHERE_AREA
        return TORUS_PERIODS * np.sqrt(1.0 - self.a * self.a)

    def lapse_values(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, float))
        return np.ones_like(x) if self.lapse is None else self.lapse(x)

    def warp_values(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, float))
        return np.array([w(x) for w in self.warps])

    def density(self, x) -> np.ndarray:
        """Volume per unit coordinate length, angular factors included."""
        f = self.warp_values(x)
        area = f[0] ** 2 if self.shape == SPHERICAL else f[0] * f[1]
        return self.fiber_factor * area * self.lapse_values(x)

    def area(self, x) -> np.ndarray:
        f = self.warp_values(x)
        return self.fiber_factor * (f[0] ** 2 if self.shape == SPHERICAL else f[0] * f[1])

    def arc_jets(self, x, order: int, fd_step: float | None = None) -> list[Jet]:
        """Arclength derivative jets of each warping at ``x``."""
        x = np.atleast_1d(np.asarray(x, float))
        lapse = None
        if self.lapse is not None:
            lapse = _x_jet(self.lapse, x, max(order - 1, 0), fd_step)
        return [to_arclength(_x_jet(w, x, order, fd_step), lapse) for w in self.warps]

    def arc_jet_of(self, u, x, order: int) -> Jet:
        """Arclength jet of a closed-form radial function in this coordinate."""
        x = np.atleast_1d(np.asarray(x, float))
        w = u if isinstance(u, WarpFn) else WarpFn.closed_form(u, self.domain)
        lapse = None if self.lapse is None else self.lapse.jet(x, max(order - 1, 0))
        return to_arclength(w.jet(x, order), lapse)

    # --- arclength ----------------------------------------------------
    def arclength(self, x0: float, x1: float) -> float:
        if self.lapse is None:
            return float(x1 - x0)
        val, _ = quad(lambda x: self.lapse_values(x), x0, x1, rtol=1e-12)
        return val

    def coordinate_at_arclength(self, x0: float, s: float) -> float:
        """The coordinate reached after signed arclength ``s`` from ``x0``."""
        if self.lapse is None:
            return float(x0 + s)
        if s == 0:
            return float(x0)
        sign = 1.0 if s > 0 else -1.0
        end = self.domain[1] if s > 0 else self.domain[0]
        step = abs(s) / max(float(self.lapse_values(x0)[0]), 1e-300)
        far = x0 + sign * step
        if np.isfinite(end) and sign * (far - end) > 0:
            far = end
        while abs(self.arclength(x0, far)) < abs(s):
            if np.isfinite(end) and far == end:
                raise GridOutOfDomain(f"arclength {s} runs past the domain end {end}")
            far = x0 + 2.0 * (far - x0)
            if np.isfinite(end) and sign * (far - end) > 0:
                far = end
        return float(optimize.brentq(lambda y: abs(self.arclength(x0, y)) - abs(s),
                                     min(x0, far), max(x0, far), xtol=1e-14, rtol=1e-14))

    def default_grid(self, n: int | None = None, lo=None, hi=None) -> np.ndarray:
        n = n or default_grid_points()
        lo = self.domain[0] if lo is None else lo
        hi = self.domain[1] if hi is None else hi
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise GridOutOfDomain("default grid needs finite bounds; pass lo/hi explicitly")
        if self.grid_hint == "graded_lo":
            # geometric spacing resolves features hugging the lower end
            u = np.geomspace(self.meta.get("grid_floor", 1e-6), 1.0, n - 1)
            return np.concatenate([[lo], lo + (hi - lo) * u])
        return np.linspace(lo, hi, n)

    def endpoint_is_cone(self, end: int) -> bool:
        x = self.domain[end]
        if not np.isfinite(x):
            return False
        with np.errstate(all="ignore"):
            return bool(np.any(np.abs(self.warp_values(x)) <= CONE_TOL))


def _warp(f, domain) -> WarpFn:
    if isinstance(f, WarpFn):
        return f
    return WarpFn.closed_form(f, domain)


def _slack(domain) -> float:
    finite = [abs(v) for v in domain if np.isfinite(v)]
    return 1e-12 * max(1.0, *finite) if finite else 1e-12


def _x_jet(w: WarpFn, x, order, fd_step):
    if fd_step is None:
        return w.jet(x, order)
    if order > 2:
        raise ValueError("finite-difference pathway only provides two derivatives")
    h = fd_step
    fm, f0, fp = w(x - h), w(x), w(x + h)
    rows = [f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)]
    return Jet(np.array(rows[: order + 1]))


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def quad(func: Callable, lo: float, hi: float, rtol: float = 1e-10, atol: float = 0.0,
         limit: int = 400, points=None) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature of a vectorised integrand."""
    def scalar(x):
        return float(np.asarray(func(np.array([x])), float).ravel()[0])

    kw = dict(epsabs=atol, epsrel=rtol, limit=limit, full_output=1)
    if points is not None and np.isfinite(lo) and np.isfinite(hi):
        kw["points"] = points
    out = integrate.quad(scalar, lo, hi, **kw)
    val, err = out[0], out[1]
    if len(out) > 3 and out[3] is not None:
        msg = str(out[3])
        tol = max(atol, rtol * abs(val))
        # roundoff-limited results that already meet tolerance are accepted
        if err > 10 * tol and err > 1e-14 * max(1.0, abs(val)):
            raise QuadratureNonconvergent(
                f"quadrature on [{lo}, {hi}] stalled at error {err:.3e}: {msg}")
    return float(val), float(err)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

@dataclass
class Geometry:
    """Arclength jets of the frame quantities at a set of points."""

    F: list[Jet]
    A: tuple[Jet, Jet]
    K01: Jet
    K02: Jet
    K12: Jet

    @property
    def ricci(self) -> tuple[Jet, Jet, Jet]:
        return (self.K01 + self.K02, self.K01 + self.K12, self.K02 + self.K12)

    @property
    def scalar(self) -> Jet:
        return 2.0 * (self.K01 + self.K02 + self.K12)

    @property
    def tracefree(self) -> tuple[Jet, Jet, Jet]:
        s3 = self.scalar * (1.0 / 3.0)
        return tuple(r - s3 for r in self.ricci)

    @property
    def mean_curvature(self) -> Jet:
        return self.A[0] + self.A[1]


def geometry(m: Metric1D, x, order: int = 2, fd_step: float | None = None) -> Geometry:
    """Curvature jets; ``order`` is the warp derivative order (>= 2)."""
    F = m.arc_jets(x, order, fd_step)
    if m.shape == SPHERICAL:
        f = F[0]
        A = f.d() / f.truncate(order - 1)
        K0 = -(f.d().d() / f.truncate(order - 2))
        f1 = f.d()
        K12 = (1.0 - f1 * f1) / (f * f).truncate(order - 1)
        return Geometry(F, (A, A), K0, K0, K12)
    f1, f2 = F
    A1 = f1.d() / f1.truncate(order - 1)
    A2 = f2.d() / f2.truncate(order - 1)
    K01 = -(f1.d().d() / f1.truncate(order - 2))
    K02 = -(f2.d().d() / f2.truncate(order - 2))
    return Geometry(F, (A1, A2), K01, K02, -(A1 * A2))


def check_grid(m: Metric1D, grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(grid, float))
    lo, hi = m.domain
    tol = _slack(m.domain)
    if np.any(grid < lo - tol) or np.any(grid > hi + tol) or np.any(~np.isfinite(grid)):
        raise GridOutOfDomain(f"grid leaves the domain {m.domain} of {m.label or 'metric'}")
    return np.clip(grid, lo, hi)


def _cone_mask(m: Metric1D, grid) -> np.ndarray:
    """Grid points sitting on a cone endpoint; checks positivity elsewhere."""
    f = m.warp_values(grid)
    mask = np.zeros(grid.shape, bool)
    for end in (0, 1):
        x_end = m.domain[end]
        if np.isfinite(x_end) and m.endpoint_is_cone(end):
            mask |= grid == x_end
    bad = np.any(f <= 0.0, axis=0) & ~mask
    if np.any(bad):
        raise WarpingNonpositiveOnGrid(
            f"warping nonpositive at x={grid[bad][0]!r} away from cone endpoints")
    return mask


def richardson_limit(func: Callable[[float], float], h0: float, levels: int = 6) -> tuple[float, float]:
    """Neville extrapolation of ``func(h)`` to ``h = 0`` along ``h0 / 2^k``."""
    hs = h0 / 2.0 ** np.arange(levels)
    table = [float(func(h)) for h in hs]
    vals = list(table)
    best, prev = vals[-1], None
    for j in range(1, levels):
        new = []
        for i in range(levels - j):
            new.append((hs[i] * vals[i + 1] - hs[i + j] * vals[i]) / (hs[i] - hs[i + j]))
        vals = new
        prev, best = best, vals[-1]
    return best, abs(best - prev)


def _pointwise(m: Metric1D, grid, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Evaluate ``fn`` on the grid, taking one-sided limits at cone endpoints."""
    grid = check_grid(m, grid)
    mask = _cone_mask(m, grid)
    if not np.any(mask):
        return np.asarray(fn(grid), float)
    length = m.domain[1] - m.domain[0]
    h0 = m.meta.get("richardson_h0", 3e-2 * (length if np.isfinite(length) else 1.0))
    keep = ~mask
    probe = grid[keep] if np.any(keep) else np.array([m.domain[0] + h0])
    vals = np.asarray(fn(probe), float)
    out = np.full(vals.shape[:-1] + grid.shape, np.nan)
    if np.any(keep):
        out[..., keep] = vals
    for idx in np.flatnonzero(mask):
        x_end = grid[idx]
        sign = 1.0 if x_end == m.domain[0] else -1.0
        hs = h0 / 2.0 ** np.arange(6)
        samples = np.asarray(fn(x_end + sign * hs), float).reshape(-1, hs.size)
        lims = [richardson_limit(dict(zip(hs, row)).__getitem__, h0)[0] for row in samples]
        out[..., idx] = np.array(lims).reshape(out[..., idx].shape)
    return out


def scalar_curvature(m: Metric1D, grid, method: str = "exact", h: float | None = None) -> np.ndarray:
    """Scalar curvature on ``grid``.

    ``method="fd"`` replaces every derivative by a centered difference with
    step ``h`` (coordinate units).  Sampled warpings always use differences.
    """
    fd = None
    if method == "fd":
        if h is None:
            raise ValueError("finite-difference method needs a step h")
        fd = float(h)
    elif method != "exact":
        raise ValueError(f"unknown method {method!r}")
    return _pointwise(m, grid, lambda x: geometry(m, x, 2, fd).scalar.value)


@dataclass
class CurvatureProfile:
    grid: np.ndarray
    s: np.ndarray
    ricci_eigs: np.ndarray          # (n, 3): radial, fiber 1, fiber 2
    z_norm_sq: np.ndarray
    shape_eigs: np.ndarray          # (n, k)
    shape_mult: tuple[int, ...]
    outward: bool = True

    @property
    def shape_operator(self) -> list[list[tuple[float, int]]]:
        return [list(zip(row, self.shape_mult)) for row in self.shape_eigs]


def _profile_rows(m: Metric1D, x) -> np.ndarray:
    g = geometry(m, x, 2)
    ric = np.array([r.value for r in g.ricci])
    s = ric.sum(axis=0)
    z2 = ((ric - s / 3.0) ** 2).sum(axis=0)
    return np.vstack([s, ric, z2, g.A[0].value, g.A[1].value])


def ricci_profile(m: Metric1D, grid, orientation: str = "outward") -> CurvatureProfile:
    grid = check_grid(m, grid)
    rows = _pointwise(m, grid, lambda x: _profile_rows(m, x))
    sign = _orientation_sign(orientation)
    if m.shape == SPHERICAL:
        shape, mult = sign * rows[5][:, None], (2,)
    else:
        shape, mult = sign * rows[5:7].T, (1, 1)
    return CurvatureProfile(grid, rows[0], rows[1:4].T, rows[4], shape, mult, sign > 0)


def _orientation_sign(orientation: str) -> float:
    if orientation not in ("outward", "inward"):
        raise ValueError("orientation must be 'outward' or 'inward'")
    return 1.0 if orientation == "outward" else -1.0


def shape_operator(m: Metric1D, r: float, orientation: str = "outward") -> list[tuple[float, int]]:
    """Shape operator of the level set through ``r``; outward = increasing coordinate."""
    r = float(check_grid(m, [r])[0])
    f = m.warp_values(r)[:, 0]
    if np.any(f == 0.0):
        raise ConePoint(f"level set at {r} is collapsed (warping vanishes)")
    sign = _orientation_sign(orientation)
    jets = m.arc_jets(r, 1)
    eig = [sign * float(j[1][0] / j[0][0]) for j in jets]
    if m.shape == SPHERICAL:
        return [(eig[0], 2)]
    return [(eig[0], 1), (eig[1], 1)]


def level_set_gauss_curvature(m: Metric1D, r: float) -> float:
    """Intrinsic curvature of the level set, via the Gauss equation."""
    g = geometry(m, check_grid(m, [r]), 2)
    return float(g.K12.value[0] + g.A[0].value[0] * g.A[1].value[0])


# ---------------------------------------------------------------------------
# volume and integrals
# ---------------------------------------------------------------------------

def volume(m: Metric1D, sub_interval=None, rtol: float = 1e-10, atol: float = 0.0) -> tuple[float, float]:
    """Volume of ``sub_interval`` (coordinate bounds) and the error estimate."""
    lo, hi = m.domain if sub_interval is None else sub_interval
    check_grid(m, [v for v in (lo, hi) if np.isfinite(v)])
    return quad(m.density, lo, hi, rtol=rtol, atol=atol)


def integrate_density(m: Metric1D, pointwise: Callable[[np.ndarray], np.ndarray],
                      lo=None, hi=None, rtol=1e-10, atol=0.0) -> tuple[float, float]:
    """``int pointwise dV`` over ``[lo, hi]`` (defaults to the domain)."""
    lo = m.domain[0] if lo is None else lo
    hi = m.domain[1] if hi is None else hi
    return quad(weighted(m, pointwise), lo, hi, rtol=rtol, atol=atol)


def weighted(m: Metric1D, pointwise: Callable[[np.ndarray], np.ndarray]):
    """``pointwise * density``, zero where the density underflows (far ends)."""
    def h(x):
        w = m.density(x)
        if not np.any(w):
            return w
        with np.errstate(all="ignore"):
            v = pointwise(x) * w
        return np.where(w == 0.0, 0.0, v)
    return h


def ricci_norm_sq(m: Metric1D, x) -> np.ndarray:
    g = geometry(m, x, 2)
    return sum(r.value ** 2 for r in g.ricci)


def tracefree_norm_sq(m: Metric1D, x) -> np.ndarray:
    g = geometry(m, x, 2)
    return sum(z.value ** 2 for z in g.tracefree)


# ---------------------------------------------------------------------------
# centered-ball regularity radii
# ---------------------------------------------------------------------------

@dataclass
class RadiusEstimate:
    value: float
    saturated: bool              # True when the bound held up to the largest scale
    max_scale: float
    kind: str = "centered-ball estimate"


def _center(m: Metric1D, center_mode: str) -> tuple[float, float]:
    if center_mode not in ("lower", "upper"):
        raise NoCenter(f"unknown center mode {center_mode!r}")
    end = 0 if center_mode == "lower" else 1
    x_c = m.domain[end]
    if not np.isfinite(x_c):
        raise NoCenter(f"the {center_mode} end of {m.domain} is at infinity")
    return x_c, (1.0 if end == 0 else -1.0)


def _scale_search(m: Metric1D, center_mode: str, ok: Callable[[float, float], bool],
                  s_max: float | None) -> RadiusEstimate:
    x_c, sign = _center(m, center_mode)
    far = m.domain[1] if sign > 0 else m.domain[0]
    total = abs(m.arclength(x_c, far)) if np.isfinite(far) else np.inf
    top = min(total, s_max) if s_max is not None else total
    if not np.isfinite(top):
        top = 1e6

    def check(s):
        x = m.coordinate_at_arclength(x_c, sign * s)
        return ok(min(x_c, x), max(x_c, x), s)

    scales = top * np.logspace(-5, 0, 41)
    prev = 0.0
    for s in scales:
        if not check(s):
            lo, hi = prev, s
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if check(mid):
                    lo = mid
                else:
                    hi = mid
                if hi - lo <= 1e-12 * hi:
                    break
            return RadiusEstimate(lo, False, top)
        prev = s
    return RadiusEstimate(top, True, top)


def curvature_radius(m: Metric1D, center_mode: str = "lower", c0: float = C0_CURVATURE,
                     s_max: float | None = None) -> RadiusEstimate:
    """Largest scale below which ``s^4/vol(B) * int_B |Ric|^2 <= c0`` on centered balls."""
    def ok(lo, hi, s):
        vol, _ = volume(m, (lo, hi), rtol=1e-9)
        if vol <= 0:
            return True
        ric2, _ = integrate_density(m, lambda x: ricci_norm_sq(m, x), lo, hi, rtol=1e-9, atol=1e-300)
        return s ** 4 / vol * ric2 <= c0

    return _scale_search(m, center_mode, ok, s_max)


def volume_radius(m: Metric1D, center_mode: str = "lower", mu: float = MU_VOLUME,
                  s_max: float | None = None) -> RadiusEstimate:
    """Largest scale below which ``vol(B(s)) / s^3 >= mu`` on centered balls."""
    def ok(lo, hi, s):
        vol, _ = volume(m, (lo, hi), rtol=1e-9)
        return vol / s ** 3 >= mu

    return _scale_search(m, center_mode, ok, s_max)
