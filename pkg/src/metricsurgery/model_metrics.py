"""Catalog of named model metrics and asymptotic analysis of ends."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy import optimize

from .errors import CapExceedsSphere, NoRoot, WindowTooNarrow
from .metric_core import (Metric1D, integrate_density, quad, tracefree_norm_sq)
from .surgery.glued import GluedMetric
from .warp import X, WarpFn

AREA_RADIUS = "area_radius"
CONFORMALLY_FLAT = "conformally_flat"


# ---------------------------------------------------------------------------
# Schwarzschild
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchwarzschildSpec:
    mass: float
    form: str = AREA_RADIUS
    doubled: bool = False
    normalize_mass: float | None = None   # rescale so the mass becomes this value

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("Schwarzschild mass must be positive")
        if self.form not in (AREA_RADIUS, CONFORMALLY_FLAT):
            raise ValueError(f"unknown Schwarzschild form {self.form!r}")
        if self.doubled and self.form != AREA_RADIUS:
            raise ValueError("only the area-radius form is doubled across the horizon")


def make_schwarzschild(spec: SchwarzschildSpec):
    """Spatial Schwarzschild metric.

    Area-radius form uses ``y`` with ``r = 2m + y^2``, which is regular through
    the horizon ``y = 0``; the doubled variant is the mirror pair ``y <= 0``,
    ``y >= 0``.  The conformally flat form ``(1 + 2m/r) delta`` uses ``r``.
    """
    m = spec.mass
    lam = 1.0 if spec.normalize_mass is None else spec.normalize_mass / m
    meta = {"mass": m * lam, "form": spec.form}
    if spec.form == CONFORMALLY_FLAT:
        f = sp.sqrt(X * X + 2 * m * X)
        lapse = sp.sqrt(1 + 2 * m / X)
        g = Metric1D.spherical(f, (0.0, np.inf), lapse=lapse, coordinate="r",
                               label=f"conformally flat Schwarzschild m={m}", meta=meta)
        return g.scaled(lam) if lam != 1.0 else g
    f = 2 * m + X * X
    lapse = 2 * sp.sqrt(2 * m + X * X)

    def piece(domain, tag):
        g = Metric1D.spherical(WarpFn.closed_form(f, domain, "schwarzschild", m=m),
                               domain, lapse=lapse, coordinate="y",
                               label=f"Schwarzschild m={m}{tag}", meta=dict(meta))
        return g.scaled(lam) if lam != 1.0 else g

    if not spec.doubled:
        return piece((0.0, np.inf), "")
    return GluedMetric.glue([piece((-np.inf, 0.0), " (mirror)"), piece((0.0, np.inf), "")],
                            "C2", label=f"doubled Schwarzschild m={m}", meta=meta)


def schwarzschild_coordinate(spec: SchwarzschildSpec, radius):
    """Metric coordinate of an area radius (area form) or isotropic radius."""
    radius = np.asarray(radius, float)
    if spec.form == AREA_RADIUS:
        return np.sqrt(radius - 2 * spec.mass)
    return radius


def static_potential(spec: SchwarzschildSpec) -> sp.Expr:
    """``(1 - 2m/r)^(1/2)`` written in the metric coordinate."""
    if spec.form != AREA_RADIUS:
        raise ValueError("the static potential is tabulated for the area-radius form")
    return X / sp.sqrt(2 * spec.mass + X * X)


def schwarzschild_arclength(m: float, y):
    """Radial distance from the horizon to ``r = 2m + y^2``."""
    y = np.asarray(y, float)
    return y * np.sqrt(2 * m + y * y) + 2 * m * np.arcsinh(y / np.sqrt(2 * m))


# ---------------------------------------------------------------------------
# hyperbolic cusp, flat torus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CuspSpec:
    d1: float = 1.0
    d2: float = 1.0
    a: float = 0.0
    t0: float = 0.0

    def __post_init__(self):
        if not (self.d1 > 0 and self.d2 > 0):
            raise ValueError("cusp torus lengths must be positive")
        if not (0.0 <= self.a < 1.0):
            raise ValueError("cusp torus cosine must lie in [0, 1)")


def make_cusp(spec: CuspSpec) -> Metric1D:
    dom = (float(spec.t0), np.inf)
    return Metric1D.doubly_warped(
        WarpFn.closed_form(spec.d1 * sp.exp(-X), dom, "cusp", d=spec.d1),
        WarpFn.closed_form(spec.d2 * sp.exp(-X), dom, "cusp", d=spec.d2),
        spec.a, dom, label=f"cusp d=({spec.d1},{spec.d2}) a={spec.a}",
        meta={"spec": spec})


@dataclass(frozen=True)
class FlatTorus:
    d1: float
    d2: float
    a: float

    @property
    def gram(self) -> np.ndarray:
        c = self.a * self.d1 * self.d2
        return np.array([[self.d1 ** 2, c], [c, self.d2 ** 2]])

    @property
    def area(self) -> float:
        return (2 * np.pi) ** 2 * float(np.sqrt(np.linalg.det(self.gram)))


def flat_torus(d1: float, d2: float, a: float) -> FlatTorus:
    """``d1^2 dth1^2 + 2 a d1 d2 dth1 dth2 + d2^2 dth2^2`` on the square torus."""
    if not (d1 > 0 and d2 > 0) or not a * a < 1:
        raise ValueError("flat torus needs d1, d2 > 0 and a^2 < 1")
    return FlatTorus(float(d1), float(d2), float(a))


# ---------------------------------------------------------------------------
# constant curvature pieces
# ---------------------------------------------------------------------------

def flat_space(radius: float = np.inf) -> Metric1D:
    return Metric1D.spherical(X, (0.0, radius), label="flat", meta={"mass": 0.0})


def round_sphere(delta: float) -> Metric1D:
    """The 3-sphere of radius ``1/delta``."""
    return Metric1D.spherical(sp.sin(delta * X) / delta, (0.0, np.pi / delta),
                              label=f"round S3 radius {1 / delta}")


def hyperbolic_ball(radius: float) -> Metric1D:
    return Metric1D.spherical(sp.sinh(X), (0.0, radius), label="hyperbolic ball")


@dataclass(frozen=True)
class SphereCapSpec:
    delta: float
    D: float
    cap_side: str = "complement"

    def __post_init__(self):
        if self.cap_side not in ("complement", "cap"):
            raise ValueError("cap_side is 'complement' or 'cap'")
        if not (self.delta > 0 and self.D > 0):
            raise ValueError("cap needs delta, D > 0")


def make_sphere_cap(spec: SphereCapSpec) -> Metric1D:
    """Geodesic ball of radius ``D`` in the round ``S^3(1/delta)``, or its complement.

    The complement is traversed from the boundary sphere towards the antipode,
    so its coordinate continues outward from a glued-on inner region.
    """
    d, D = spec.delta, spec.D
    if d * D >= np.pi:
        raise CapExceedsSphere(f"delta*D = {d * D} reaches the antipode")
    dom = (D, np.pi / d) if spec.cap_side == "complement" else (0.0, D)
    return Metric1D.spherical(sp.sin(d * X) / d, dom,
                              label=f"S3 {spec.cap_side} delta={d:.6g} D={D:.6g}",
                              meta={"spec": spec})


# ---------------------------------------------------------------------------
# cap matching
# ---------------------------------------------------------------------------

@dataclass
class CapSolution:
    delta: float
    D: float
    residuals: tuple[float, float]
    iterations: int
    variant: str
    lam: float | None = None


def conformal_end_data(R: float, m: float):
    """Area radius, radial slope and shape operator of ``(1+2m/r) delta`` at ``r = R``."""
    f = R * np.sqrt(1 + 2 * m / R)
    fp = (R + m) / (R + 2 * m)
    return f, fp, fp / f


def solve_cap_matching(R: float, variant: str = "C1", lam: float = 1.75, m: float = 0.5,
                       tol: float = 1e-12, max_iter: int = 60, end_data=None) -> CapSolution:
    """Find a round cap whose boundary sphere matches the conformal end at ``R``.

    ``sin(dD) = d f(R)`` matches the induced radius.  ``cos(dD) = f'(R)`` makes
    the shape operators agree (``C1``); the mismatch variant subtracts
    ``R^-lam`` so that the cap boundary is less convex by ``~ R^-(1+lam)``.
    ``end_data = (f, f')`` replaces the closed-form ``(1+2m/r) delta`` values.
    """
    if variant not in ("C1", "mismatch"):
        raise ValueError(f"unknown cap variant {variant!r}")
    if variant == "mismatch" and not 1.5 < lam < 2.0:
        raise ValueError("mismatch exponent must lie in (3/2, 2)")
    f, fp = conformal_end_data(R, m)[:2] if end_data is None else map(float, end_data)
    c = fp - (R ** -lam if variant == "mismatch" else 0.0)
    if not 0.0 < c < 1.0:
        raise NoRoot(f"no cap with delta*D in (0, pi/2) for R={R}", [("cos target", c)])
    # scaled unknowns u = delta R^(3/2), v = D / R keep the Jacobian O(1)
    s32 = R ** 1.5

    def F(z):
        d, D = z[0] / s32, z[1] * R
        return np.array([np.sin(d * D) - d * f, np.cos(d * D) - c])

    def J(z):
        d, D = z[0] / s32, z[1] * R
        cs, sn = np.cos(d * D), np.sin(d * D)
        return np.array([[(cs * D - f) / s32, cs * d * R],
                         [-sn * D / s32, -sn * d * R]])

    attempts = []
    for start in ((1.0, 1.0), (0.5, 1.0), (2.0, 1.0), (1.0, 0.5)):
        z = np.array(start, float)
        for it in range(1, max_iter + 1):
            res = F(z)
            step = np.linalg.solve(J(z), -res)
            t = 1.0
            while t > 1e-6 and (np.any(z + t * step <= 0)
                                or np.linalg.norm(F(z + t * step)) > np.linalg.norm(res)):
                t *= 0.5
            z = z + t * step
            res = F(z)
            if np.max(np.abs(res)) <= tol:
                d, D = z[0] / s32, z[1] * R
                if not 0 < d * D < np.pi / 2:
                    break
                return CapSolution(d, D, (float(res[0]), float(res[1])), it, variant,
                                   lam if variant == "mismatch" else None)
        attempts.append((start, z.tolist(), float(np.max(np.abs(F(z))))))
    raise NoRoot(f"Newton failed for the cap system at R={R}", attempts)


def complement_radius(sol: CapSolution) -> float:
    """Geodesic radius of the attached complementary ball (antipodal side)."""
    return np.pi / sol.delta - sol.D


# ---------------------------------------------------------------------------
# end asymptotics
# ---------------------------------------------------------------------------

@dataclass
class EndAsymptotics:
    mass: float
    p_hat: float | None               # None: residual below the fit floor
    q_hat: float
    window: tuple[float, float]
    residuals: dict = field(default_factory=dict)
    threshold: float = 0.05

    @property
    def passed(self) -> bool:
        return all(v <= self.threshold for v in self.residuals.values())


def isotropic_data(m: Metric1D, x: np.ndarray):
    """Isotropic radius and conformal factor ``psi`` (``g = psi^2 (d rho^2 + rho^2 dS^2)``).

    ``psi(x) = exp(int_x^inf (1 - df/dt) / f dt)`` normalised to 1 at infinity.
    """
    x = np.sort(np.asarray(x, float))

    def integrand(y):
        j = m.arc_jets(y, 1)[0]
        return (1.0 - j[1]) / j[0] * m.lapse_values(y)

    tail, _ = quad(integrand, x[-1], np.inf, rtol=1e-12, atol=1e-300)
    pieces = [quad(integrand, lo, hi, rtol=1e-12, atol=1e-300)[0] for lo, hi in zip(x[:-1], x[1:])]
    log_psi = tail + np.concatenate([np.cumsum(pieces[::-1])[::-1], [0.0]])
    psi = np.exp(log_psi)
    rho = m.warp_values(x)[0] / psi
    return rho, psi


def coordinate_at_area_radius(m: Metric1D, R: float) -> float:
    """Coordinate where the warping (area radius) equals ``R``; the warping must increase."""
    lo, hi = m.domain
    f = lambda x: float(m.warp_values(x)[0, 0]) - R
    a = lo if np.isfinite(lo) else -1.0
    if np.isfinite(lo) and f(lo) > 0:
        raise WindowTooNarrow(f"area radius {R} lies inside the domain start")
    b = max(a + 1.0, R) if not np.isfinite(hi) else hi
    while f(b) < 0:
        if np.isfinite(hi):
            raise WindowTooNarrow(f"area radius {R} exceeds the domain")
        b *= 2.0
    return float(optimize.brentq(f, a, b, xtol=1e-14, rtol=1e-15))


def annulus_z2(m: Metric1D, R: float) -> float:
    """``int |z|^2 dV`` over the annulus between area radii ``R`` and ``2R``."""
    lo, hi = coordinate_at_area_radius(m, R), coordinate_at_area_radius(m, 2 * R)
    return integrate_density(m, lambda x: tracefree_norm_sq(m, x), lo, hi,
                             rtol=1e-10, atol=1e-300)[0]


def fit_end_asymptotics(m: Metric1D, window=None, samples: int = 64,
                        floor: float = 1e-11, threshold: float = 0.05) -> EndAsymptotics:
    """Mass, metric decay exponent and trace-free curvature decay of an end.

    The window is in area radius; default ``[10 m, 1000 m]`` using the
    catalog mass (``[10, 1000]`` if none is recorded).
    """
    if window is None:
        scale = m.meta.get("mass") or 1.0
        window = (10.0 * scale, 1e3 * scale)
    lo, hi = map(float, window)
    if not (lo > 0 and hi >= 10.0 * lo):
        raise WindowTooNarrow(f"fit window {window} spans less than a decade")
    x = np.array([coordinate_at_area_radius(m, R) for R in np.geomspace(lo, hi, samples)])
    rho, psi = isotropic_data(m, x)
    G = psi ** 2 - 1.0
    # r G = 2 m + b / r + O(r^-2)
    A = np.vstack([np.ones_like(rho), 1.0 / rho]).T
    coef, *_ = np.linalg.lstsq(A, rho * G, rcond=None)
    mass = coef[0] / 2.0
    h = G - 2.0 * mass / rho
    residuals = {}
    p_hat = None
    if np.max(np.abs(h)) > floor * max(np.max(np.abs(G)), 1.0) and np.all(np.abs(h) > 0):
        p_fit = np.polyfit(np.log(rho), np.log(np.abs(h)), 1)
        p_hat = float(p_fit[0])
        residuals["h_loglog"] = float(np.max(np.abs(np.polyval(p_fit, np.log(rho)) - np.log(np.abs(h)))))
    Rs = np.geomspace(lo, hi, 16)
    Z = np.array([annulus_z2(m, R) for R in Rs])
    q_hat = float("nan")
    if np.all(Z > 0):
        q_fit = np.polyfit(np.log(Rs), np.log(Z), 1)
        q_hat = float(q_fit[0])
        residuals["z_loglog"] = float(np.max(np.abs(np.polyval(q_fit, np.log(Rs)) - np.log(Z))))
    return EndAsymptotics(float(mass), p_hat, q_hat, (lo, hi), residuals, threshold)
