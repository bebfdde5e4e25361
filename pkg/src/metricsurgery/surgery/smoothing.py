"""Quintic smoothing of glued metrics across their seams."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp

from ..errors import FloorUnachievable, SeamNotConvexifying
from ..metric_core import Metric1D, default_grid_points, scalar_curvature
from ..warp import X, WarpFn
from .glued import SEAM_TOL, GluedMetric

MAX_RETRIES = 8
BAND_REFINEMENT = 4
FLOOR_SLACK = 1e-9         # relative to the band's largest |s|; absorbs roundoff at s = 0


@dataclass
class BandRecord:
    seam: int
    halfwidth: float
    attempts: int
    mode: str                # "symmetric" quintic or one-sided "corrected"
    piece: int               # index of the band piece in the smoothed metric
    min_s: float
    max_abs_s: float         # scale of the roundoff slack in the floor check
    floor: float | None
    one_sided_min: float | None   # C0 seams: min of the two one-sided s at the seam


def is_c2(g: GluedMetric, i: int) -> bool:
    seam = g.seams[i]
    left = g.pieces[i]
    jets = left.arc_jets(left.domain[1], 2)
    for k, key in enumerate(("f", "df", "d2f")):
        scale = max(1.0, max(abs(j[k][0]) for j in jets))
        if seam.max_jump(key) > SEAM_TOL * scale:
            return False
    return True


def _band_piece(left: Metric1D, right: Metric1D, w: float) -> tuple[Metric1D, float, float]:
    """Quintic band of arclength half-width ``w`` centred on the seam."""
    xs_l, xs_r = left.domain[1], right.domain[0]
    xl = left.coordinate_at_arclength(xs_l, -w)
    xr = right.coordinate_at_arclength(xs_r, w)
    jl = left.arc_jets(xl, 2)
    jr = right.arc_jets(xr, 2)
    warps = []
    for a, b in zip(jl, jr):
        warps.append(WarpFn.hermite([0.0, 2 * w], [a.data[:, 0], b.data[:, 0]]))
    band = Metric1D(left.shape, tuple(warps), (0.0, 2 * w), a=left.a,
                    label=f"smoothing band ({left.label} | {right.label})", coordinate="arclength")
    return band, xl, xr


def _one_sided_correction(L: float, at_right_end: bool, d1: float, d2: float):
    """Quintic ``q`` on ``[0, L]`` with zero 2-jet at one end and ``(0, d1, d2)`` at the other.

    Kept in factored Hermite form; expanding it loses the second derivative
    to cancellation when ``L`` is small.
    """
    t = X / L if at_right_end else 1 - X / L
    b1 = t ** 3 * (1 - t) * (3 * t - 4)      # unit slope at t=1, zero curvature
    b2 = t ** 3 * (1 - t) ** 2 / 2           # unit curvature at t=1
    sign = 1.0 if at_right_end else -1.0
    return sign * d1 * L * b1 + d2 * L ** 2 * b2


def _corrected_band(left: Metric1D, right: Metric1D, w: float):
    """Band that modifies only the side with the lower second derivatives.

    The correction is a quintic added to the original warping, so the
    unchanged side keeps its curvature and the modified side moves its
    2-jet at the seam onto the other side's.  Needs arclength coordinates.
    """
    if left.lapse is not None or right.lapse is not None:
        return None
    if any(wf.kind != "closed_form" for wf in (*left.warps, *right.warps)):
        return None
    jl = left.arc_jets(left.domain[1], 2)
    jr = right.arc_jets(right.domain[0], 2)
    rel = [(b[2][0] - a[2][0]) / max(abs(a[0][0]), 1e-300) for a, b in zip(jl, jr)]
    fix_left = rel[int(np.argmax(np.abs(rel)))] > 0
    L = 2.0 * w
    side = left if fix_left else right
    x0 = side.domain[1] - L if fix_left else side.domain[0]
    if not side.domain[0] <= x0 <= side.domain[1]:
        return None
    warps = []
    for wf, a, b in zip(side.warps, jl, jr):
        sign = 1.0 if fix_left else -1.0
        q = _one_sided_correction(L, fix_left, sign * (b[1][0] - a[1][0]), sign * (b[2][0] - a[2][0]))
        base = wf.expr.subs(X, X + x0)
        given = [g.subs(X, X + x0) + sp.diff(q, X, k + 1) for k, g in enumerate(wf.given)]
        warps.append(WarpFn.closed_form(base + q, (0.0, L), "seam_correction", given))
    band = Metric1D(side.shape, tuple(warps), (0.0, L), a=side.a, coordinate="arclength",
                    label=f"smoothing band (corrected {side.label})")
    if fix_left:
        return band, x0, right.domain[0]
    return band, left.domain[1], x0 + L


def _mean_curvature_jump(left: Metric1D, right: Metric1D) -> float:
    """``H_left - H_right`` at the seam; positive means the seam concentrates positive curvature."""
    hl = sum(float(j[1][0] / j[0][0]) for j in left.arc_jets(left.domain[1], 1))
    hr = sum(float(j[1][0] / j[0][0]) for j in right.arc_jets(right.domain[0], 1))
    if left.shape == "spherical":
        hl, hr = 2 * hl, 2 * hr
    return hl - hr


def _max_halfwidth(piece: Metric1D, lo: float, hi: float) -> float:
    length = piece.arclength(lo, hi) if np.isfinite(hi) and np.isfinite(lo) else np.inf
    return 0.45 * length


def smooth_seams(g: GluedMetric, floor: float | None = None, halfwidths=None,
                 max_retries: int = MAX_RETRIES, n_band: int | None = None) -> GluedMetric:
    """Replace every non-C2 seam by a quintic band matching two derivatives each side.

    Half-widths are arclengths; per seam they come from ``halfwidths``, then
    ``g.meta["band_halfwidths"]``, then a quarter of the shorter neighbour.
    With a ``floor``, the band's scalar curvature must stay above it; failing
    bands are halved up to ``max_retries`` times.
    """
    n_band = n_band or BAND_REFINEMENT * default_grid_points()
    hw = halfwidths if halfwidths is not None else g.meta.get("band_halfwidths")
    pieces_out: list[Metric1D] = []
    orders: list[str] = []
    records: list[BandRecord] = []
    current = g.pieces[0]
    for i, seam in enumerate(g.seams):
        right = g.pieces[i + 1]
        if is_c2(g, i):
            pieces_out.append(current)
            orders.append(seam.target_order)
            current = right
            continue
        c0 = seam.max_jump("df") > SEAM_TOL
        one_sided = None
        if c0:
            if _mean_curvature_jump(current, right) <= 0:
                raise SeamNotConvexifying(
                    f"seam {i}: mean curvature does not drop across the seam")
            one_sided = float(min(scalar_curvature(current, [current.domain[1]])[0],
                                  scalar_curvature(right, [right.domain[0]])[0]))
        cap = min(_max_halfwidth(current, *current.domain), _max_halfwidth(right, *right.domain))
        w = hw[i] if hw is not None and i < len(hw) and hw[i] is not None else None
        w = min(w if w is not None else cap / 0.45 * 0.25, cap)
        bound = floor
        if one_sided is not None:
            bound = one_sided if floor is None else max(floor, one_sided)
        worst = None
        mode = "symmetric"
        # attempt 1 is the symmetric quintic; retries alternate re-biased and halved bands
        for attempt in range(1, max_retries + 2):
            built = (_band_piece(current, right, w) if mode == "symmetric"
                     else _corrected_band(current, right, w))
            if built is not None:
                band, xl, xr = built
                grid = band.default_grid(n_band)
                s = scalar_curvature(band, grid)
                k = int(np.argmin(s))
                if bound is None or s[k] >= bound - FLOOR_SLACK * float(np.max(np.abs(s))):
                    break
                worst = (float(grid[k]), float(s[k] - bound))
            if attempt == max_retries + 1:
                raise FloorUnachievable(
                    f"seam {i}: band scalar curvature below {bound:.6g} after "
                    f"{max_retries} retries", *(worst or (None, None)))
            if mode == "symmetric":
                mode = "corrected"
            else:
                mode, w = "symmetric", 0.5 * w
        if xl > current.domain[0]:
            pieces_out.append(current.restricted(current.domain[0], xl))
            orders.append("C2")
        pieces_out.append(band)
        records.append(BandRecord(i, w, attempt, mode, len(pieces_out) - 1, float(s[k]),
                                  float(np.max(np.abs(s))), floor, one_sided))
        orders.append("C2")
        current = right.restricted(xr, right.domain[1]) if xr > right.domain[0] else right
    pieces_out.append(current)
    meta = dict(g.meta, bands=records, smoothed=True)
    meta.pop("band_halfwidths", None)
    out = GluedMetric.glue(pieces_out, orders, label=f"{g.label} (smoothed)", meta=meta)
    return out
