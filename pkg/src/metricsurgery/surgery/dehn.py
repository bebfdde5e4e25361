"""Filling a hyperbolic cusp with a solid torus."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from ..errors import ConcaveInterpolantInfeasible, ConeAngleExceedsSmooth
from ..metric_core import Metric1D, volume
from ..model_metrics import CuspSpec
from ..warp import X, WarpFn
from .glued import GluedMetric

HALF_PI = np.pi / 2
SLAB_LENGTH = 1.0
SLAB_LABEL = "cusp (kept slab)"


@dataclass(frozen=True)
class DehnFillSpec:
    cusp: CuspSpec = field(default_factory=CuspSpec)
    t0: float = 5.0
    r0: float | None = None          # core bend radius; default c1 / 10
    trial: tuple | None = None       # (f1, f2) expressions in x scaled by (c1, c2); default catalog pair

    @property
    def c1(self) -> float:
        return self.cusp.d1 * float(np.exp(-self.t0))

    @property
    def c2(self) -> float:
        return self.cusp.d2 * float(np.exp(-self.t0))

    @property
    def cone_angle(self) -> float:
        return float(np.pi * self.c1 * np.sqrt(1.0 - self.cusp.a ** 2))

    @property
    def bend_radius(self) -> float:
        return self.c1 / 10.0 if self.r0 is None else float(self.r0)


def trial_warpings(spec: DehnFillSpec):
    if spec.trial is not None:
        u1, u2 = (sp.sympify(e, locals={"x": X}) for e in spec.trial)
        return spec.c1 * u1, spec.c2 * u2
    return spec.c1 * sp.tan(X / 2), spec.c2 * sp.exp(-sp.cos(X))


def dehn_fill(spec: DehnFillSpec) -> GluedMetric:
    """Solid torus on ``[0, pi/2]`` glued to a slab of the kept cusp region.

    The kept region ``t <= t0`` is traversed towards decreasing ``t``, so in
    the glue coordinate ``r = pi/2 + (t0 - t)`` its warpings grow like
    ``c_i exp(r - pi/2)``.  The seam is checked, not assumed, to be C1.
    """
    a = spec.cusp.a
    if spec.c1 * np.sqrt(1 - a * a) / 2 >= 1.0:
        raise ConeAngleExceedsSmooth(
            f"cone angle {spec.cone_angle:.6g} is not below 2 pi; increase t0")
    f1, f2 = trial_warpings(spec)
    core = Metric1D.doubly_warped(WarpFn.closed_form(f1, (0, HALF_PI), "dehn_trial_f1", c=spec.c1),
                                  WarpFn.closed_form(f2, (0, HALF_PI), "dehn_trial_f2", c=spec.c2),
                                  a, (0.0, HALF_PI), coordinate="r", label="solid torus (trial)")
    slab_dom = (HALF_PI, HALF_PI + SLAB_LENGTH)
    slab = Metric1D.doubly_warped(spec.c1 * sp.exp(X - HALF_PI), spec.c2 * sp.exp(X - HALF_PI),
                                  a, slab_dom, coordinate="r", label=SLAB_LABEL)
    cusp_volume = (2 * np.pi) ** 2 * np.sqrt(1 - a * a) * 0.5 * spec.c1 * spec.c2
    meta = {"spec": spec, "cone_angle": spec.cone_angle, "cusp_volume": cusp_volume,
            "c1": spec.c1, "c2": spec.c2}
    return GluedMetric.glue([core, slab], "C1", label="Dehn filling", meta=meta)


def solid_torus_volume(g: GluedMetric) -> float:
    return sum(volume(p)[0] for p in g.pieces if not p.label.startswith(SLAB_LABEL))


# ---------------------------------------------------------------------------
# core bend
# ---------------------------------------------------------------------------

@dataclass
class BendData:
    r0: float
    theta: float
    weight: float
    power: float
    f2_shift: float                  # f2'(r0/2), the size of the f2 correction
    f2_rel_change: float             # max |f2_bar - f2| / f2 on the bend interval
    volume_change: float


def _bend_expressions(r0, s0, s1, target, f2_expr, f2_slope):
    # local coordinate x = r - r0/2, so the axis sits exactly at x = 0
    h = r0 / 2.0
    u = X / h
    # 1 - u clamped at 0: at x = h it rounds slightly negative, and with p ~ 1e4 that gives nan
    v = sp.Max(1 - u, 0)
    theta = (target / h - s1) / (s0 - s1)
    if not 0.0 < theta < 2.0 / 3.0:
        raise ConcaveInterpolantInfeasible(
            f"mean slope fraction {theta:.6g} outside (0, 2/3); r0 or c1 out of regime")
    w = 1.0 - theta
    p = 6.0 * w / theta - 2.0
    Phi = (2 - v ** (p + 1) * (2 + p * u)) / (p + 2)
    f1 = h * (s1 * u + (s0 - s1) * (w * Phi + (1 - w) * (u - u ** 3 / 3)))
    # factored derivatives; differentiating Phi symbolically cancels O(p^2) terms
    df1 = s1 + (s0 - s1) * (w * v ** p * (1 + p * u) + (1 - w) * (1 - u ** 2))
    d2f1 = -(s0 - s1) / h * u * (w * p * (p + 1) * v ** (p - 1) + 2 * (1 - w))
    # quintic psi with psi(0)=0, psi_r(0)=1, psi''(0)=0 and vanishing 2-jet at u=1
    psi = h * u * (1 - u) ** 3 * (1 + 3 * u)
    f2 = f2_expr.subs(X, X + h) - f2_slope * psi
    return (f1, df1, d2f1), f2, theta, w, p


def bend_core(g: GluedMetric, r0: float | None = None) -> GluedMetric:
    """Replace the cone core by a smooth axis at ``r0/2``.

    On ``[r0/2, r0]`` the new ``f1`` is concave with ``f1 = 0`` and
    ``f1' = (1-a^2)^(-1/2)`` on the axis, C1-matched to the trial warping at
    ``r0``; ``f2`` gets a quintic correction killing its slope on the axis.
    """
    spec: DehnFillSpec = g.meta["spec"]
    r0 = spec.bend_radius if r0 is None else float(r0)
    core = g.pieces[0]
    a = core.a
    if not 0 < r0 < core.domain[1]:
        raise ConcaveInterpolantInfeasible(f"bend radius {r0} outside the solid torus")
    w1, w2 = core.warps
    j1 = w1.jet(r0, 1)
    s0 = 1.0 / np.sqrt(1 - a * a)
    s1 = float(j1[1][0])
    if s1 >= s0:
        raise ConeAngleExceedsSmooth(f"f1'(r0) = {s1:.6g} is not below (1-a^2)^(-1/2)")
    f2_slope = float(w2.jet(r0 / 2, 1)[1][0])
    f1b, f2b, theta, w, p = _bend_expressions(r0, s0, s1, float(j1[0][0]), w2.expr, f2_slope)
    h = r0 / 2
    dom = (0.0, h)
    feature = h / max(p, 1.0)
    bend = Metric1D.doubly_warped(WarpFn.closed_form(f1b[0], dom, "bend_f1", f1b[1:], p=p),
                                  WarpFn.closed_form(f2b, dom, "bend_f2"), a, dom,
                                  coordinate="r - r0/2", label="solid torus (bend)",
                                  grid_hint="graded_lo",
                                  meta={"richardson_h0": 0.03 * feature, "grid_floor": 1e-3 / p,
                                        "offset": h})
    rest = core.restricted(r0, core.domain[1], label="solid torus (trial, outer)")
    xs = np.linspace(0.0, h, 513)
    f2_rel = float(np.max(np.abs(bend.warps[1](xs) - w2(xs + h)) / w2(xs + h)))
    v_old = volume(core, (0.0, r0))[0]
    v_new = volume(bend)[0]
    data = BendData(r0, theta, w, p, f2_slope, f2_rel, v_new - v_old)
    pieces = [bend, rest, *g.pieces[1:]]
    meta = dict(g.meta, bend=data, cone_angle=2 * np.pi,
                band_halfwidths=[h / 4] + [None] * (len(pieces) - 2))
    orders = ["C1"] + [s.target_order for s in g.seams]
    return GluedMetric.glue(pieces, orders, label="Dehn filling (bent core)", meta=meta)
