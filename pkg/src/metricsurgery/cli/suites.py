"""Check suites run by the harness.

Each suite turns a validated parameter record into a list of assertions.
Tolerance-type bounds are multiplied by the run's tolerance scale;
structural inequalities (a strict sign, a paper bound) are not.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable

import numpy as np
import sympy as sp

from ..functionals import (conformal_ricci, conformal_ricci_first_order, evaluate_functionals, l_star,
                           scale_invariance_check, static_vacuum_residual, zc2_residual)
from ..metric_core import (level_set_gauss_curvature, quad, ricci_profile,
                           scalar_curvature, shape_operator, volume, volume_radius)
from ..model_metrics import (CONFORMALLY_FLAT, CuspSpec, SchwarzschildSpec, annulus_z2,
                             fit_end_asymptotics, flat_space, flat_torus, hyperbolic_ball, make_cusp,
                             make_schwarzschild, round_sphere, solve_cap_matching, static_potential)
from ..surgery import collapse, dehn, sphere
from ..surgery.smoothing import FLOOR_SLACK, smooth_seams
from ..warp import X

PAPER_MAP = json.loads(resources.files(__package__).joinpath("paper_map.json").read_text())


@dataclass
class Assertion:
    name: str
    anchor: str
    measured: float
    bound: float
    relation: str              # "<=", "<", ">=", ">"
    margin: float
    passed: bool


@dataclass
class Ctx:
    suite: str
    tolerance_scale: float = 1.0
    results: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def tol(self, x: float) -> float:
        return x * self.tolerance_scale

    def _add(self, name, measured, bound, relation):
        measured, bound = float(measured), float(bound)
        margin = bound - measured if relation in ("<=", "<") else measured - bound
        ok = margin > 0 if relation in ("<", ">") else margin >= 0
        anchor = PAPER_MAP["suites"][self.suite][name.split(":")[0]]
        self.results.append(Assertion(name, anchor, measured, bound, relation, margin,
                                      bool(ok and np.isfinite(measured))))

    def le(self, name, measured, bound):
        self._add(name, measured, bound, "<=")

    def lt(self, name, measured, bound):
        self._add(name, measured, bound, "<")

    def ge(self, name, measured, bound):
        self._add(name, measured, bound, ">=")

    def gt(self, name, measured, bound):
        self._add(name, measured, bound, ">")


@dataclass(frozen=True)
class Suite:
    name: str
    summary: str
    params: dict                       # name -> (type, default, positive?)
    run: Callable[[dict, Ctx], None]
    series: dict                       # name -> callable(params) -> (header, rows)

    @property
    def assertions(self) -> dict:
        return PAPER_MAP["suites"][self.name]


# ---------------------------------------------------------------------------
# dehn_fill
# ---------------------------------------------------------------------------

def _dehn_spec(p, t0=None):
    return dehn.DehnFillSpec(CuspSpec(p["d1"], p["d2"], p["a"]), p["t0"] if t0 is None else t0,
                             p["r0"])


def dehn_closed_form(r):
    return -2.0 * (1.0 + np.cos(r) + np.sin(r) ** 2 + 0.5 / np.cos(r / 2) ** 2)


def _volume_ratio(spec):
    g = dehn.dehn_fill(spec)
    return dehn.solid_torus_volume(g) / g.meta["cusp_volume"]


def _smoothed_dehn(p):
    return smooth_seams(dehn.bend_core(dehn.dehn_fill(_dehn_spec(p))), floor=-6.0)


def _piece_grid(piece, n, band):
    return piece.default_grid(4 * n if band else n)


def run_dehn(p, ctx):
    n = p["grid"]
    g = dehn.dehn_fill(_dehn_spec(p))
    core = g.pieces[0]
    r = np.linspace(0.0, dehn.HALF_PI, n)
    s = scalar_curvature(core, r)
    ctx.le("s_closed_form", np.max(np.abs(s - dehn_closed_form(r))), ctx.tol(1e-9))
    k = int(np.argmin(s))
    ctx.le("s_min_value", abs(s[k] + 6.0), ctx.tol(1e-6))
    ctx.le("s_min_location", abs(r[k] - dehn.HALF_PI), ctx.tol(1e-6))
    inner = r <= dehn.HALF_PI - 1e-3
    ctx.gt("s_above_floor", np.min(s[inner]), -6.0)
    seam = g.seams[0]
    ctx.le("seam_c1", max(seam.max_jump("f"), seam.max_jump("df")), ctx.tol(1e-12))
    j2 = core.warps[1].jet(0.0, 1)
    ctx.gt("f2_axis:value", j2[0][0], 0.0)
    ctx.le("f2_axis:slope", abs(j2[1][0]), ctx.tol(1e-12))
    val, err = quad(lambda x: np.exp(-np.cos(x)) * np.tan(x / 2), 0.0, dehn.HALF_PI, rtol=1e-13)
    ctx.lt("volume_integral", val, 0.464)
    ctx.lt("volume_integral_error", err, ctx.tol(1e-10))
    ratios = [_volume_ratio(_dehn_spec(p, t0)) for t0 in (3.0, 5.0, 8.0)]
    ctx.lt("volume_ratio", _volume_ratio(_dehn_spec(p)), 0.928)
    ctx.le("volume_ratio_t0_independent", max(ratios) - min(ratios), ctx.tol(1e-10))
    sm = _smoothed_dehn(p)
    bands = {rec.piece for rec in sm.meta["bands"]}
    s_min = min(float(np.min(scalar_curvature(q, _piece_grid(q, n, i in bands))))
                for i, q in enumerate(sm.pieces))
    # s = -6 exactly at r = pi/2; allow a few ulps there so the sign of roundoff cannot decide
    ctx.ge("smoothed_floor", s_min, -6.0 - 16 * np.spacing(6.0))
    bend = sm.pieces[0]
    bg = bend.default_grid(n)
    ctx.gt("bend_positive", np.min(scalar_curvature(bend, bg)), 0.0)
    ctx.le("bend_concave", np.max(bend.warps[0].jet(bg, 2)[2]), 0.0)
    data = sm.meta["bend"]
    ctx.le("bend_volume_change", abs(data.volume_change), 1e-3 * dehn.solid_torus_volume(g))
    ctx.le("f2_perturbation", data.f2_rel_change, 1e-2)


def dehn_series_s(p):
    core = dehn.dehn_fill(_dehn_spec(p)).pieces[0]
    r = np.linspace(0.0, dehn.HALF_PI, p["grid"])
    return ["r [length]", "s [length^-2]"], np.column_stack([r, scalar_curvature(core, r)])


def dehn_series_warp(p):
    core = dehn.dehn_fill(_dehn_spec(p)).pieces[0]
    r = np.linspace(0.0, dehn.HALF_PI, p["grid"])
    j1, j2 = (w.jet(r, 1) for w in core.warps)
    return (["r [length]", "f1 [length]", "f1' [1]", "f2 [length]", "f2' [1]"],
            np.column_stack([r, j1[0], j1[1], j2[0], j2[1]]))


def dehn_series_band(p):
    return _band_series(_smoothed_dehn(p))


def _band_series(g):
    names = (["f", "f'", "f''"] if g.shape == "spherical"
             else ["f1", "f1'", "f1''", "f2", "f2'", "f2''"])
    header = ["r [length]", *names, "s [length^-2]"]
    return header, np.array(sphere.band_rows(g))


# ---------------------------------------------------------------------------
# sphere surgery
# ---------------------------------------------------------------------------

def _conformal_end(mass):
    return make_schwarzschild(SchwarzschildSpec(mass, form=CONFORMALLY_FLAT))


def _surgery(p, side):
    end = _conformal_end(p["mass"])
    spec = sphere.SphereSurgerySpec(end, p["R"], side, p["halfwidth"], p.get("lam", 1.75), p["eps"])
    return sphere.sphere_surgery(spec)


def _ledger(ctx, verdict):
    ctx.extras["verdict"] = verdict.to_dict()
    for name, e in verdict.ledger.items():
        ctx.ge(name, e.margin, sphere.MARGIN_FLOOR if e.strict else -e.slack)


def _band_floor(ctx, glued):
    for rec in glued.meta["bands"]:
        bound = 0.0 if rec.one_sided_min is None else min(rec.one_sided_min, 0.0)
        ctx.ge("band_s_floor", rec.min_s, bound - FLOOR_SLACK * rec.max_abs_s)


def run_case_i(p, ctx):
    glued, v = _surgery(p, sphere.CASE_I)
    d = v.diagnostics
    m, R = p["mass"], p["R"]
    ctx.gt("a_difference_positive", d["a_difference"], 0.0)
    ctx.le("a_difference_leading", abs(d["a_difference"] / (m / R ** 2) - 1.0), ctx.tol(p["a_rel_tol"]))
    ctx.le("volume_deficit", abs(d["volume_deficit_ratio"] / -1.5 - 1.0), ctx.tol(p["deficit_rel_tol"]))
    _band_floor(ctx, glued)
    ctx.le("band_z2_bound", d["band_z2"], d["band_z2_bound"])
    ctx.ge("core_z2_bound", d["core_z2"], d["core_z2_bound"])
    _ledger(ctx, v)


def case_i_series_a(p):
    m = p["mass"]
    end = _conformal_end(m)
    Rs = np.geomspace(10.0 * m, max(p["R"], 100.0 * m), 13)
    diffs = [sphere.flat_fill(end, R)[2] for R in Rs]
    return ["R [length]", "A_flat - A_end [length^-1]", "m/R^2 [length^-1]"], \
        np.column_stack([Rs, diffs, m / Rs ** 2])


def case_i_series_band(p):
    return _band_series(_surgery(p, sphere.CASE_I)[0])


def _cap_slope(p):
    end = _conformal_end(p["mass"])
    Rs = np.geomspace(p["R_min"], p["R_max"], 9)
    diffs = np.array([sphere.cap_fill(end, R, "mismatch", p["lam"])[2] for R in Rs])
    return Rs, diffs


def run_case_ii(p, ctx):
    m, R = p["mass"], p["R"]
    end = _conformal_end(m)
    c1 = solve_cap_matching(R, "C1", m=m)
    ctx.le("cap_residual", max(abs(c1.residuals[0]), abs(c1.residuals[1])), ctx.tol(1e-12))
    cap, sol, diff = sphere.cap_fill(end, R, "C1")
    f_end = float(end.warp_values(R)[0, 0])
    ctx.le("cap_radius_match", abs(np.sin(sol.delta * sol.D) / sol.delta - f_end) / f_end, ctx.tol(1e-10))
    ctx.le("cap_shape_match", abs(diff) * R, ctx.tol(1e-10))
    ctx.ge("delta_order:low", sol.delta ** 2 * R ** 3, 0.5)
    ctx.le("delta_order:high", sol.delta ** 2 * R ** 3, 50.0)
    Rs, diffs = _cap_slope(p)
    ctx.gt("a_difference_positive", np.min(diffs), 0.0)
    slope = np.polyfit(np.log(Rs), np.log(diffs), 1)[0] if np.all(diffs > 0) else np.nan
    ctx.le("a_difference_slope", abs(slope + 1.0 + p["lam"]), ctx.tol(p["slope_tol"]))
    q_hat = fit_end_asymptotics(end, window=(p["z_lo"], p["z_hi"])).q_hat
    ctx.le("z_decay_slope", abs(q_hat + 3.0), ctx.tol(p["z_slope_tol"]))
    glued, v = _surgery(p, sphere.CASE_II)
    ctx.lt("band_to_tail", v.diagnostics["band_to_tail"], p["tail_ratio"])
    _band_floor(ctx, glued)
    _ledger(ctx, v)


def case_ii_series_a(p):
    Rs, diffs = _cap_slope(p)
    return ["R [length]", "A_end - A_cap [length^-1]"], np.column_stack([Rs, diffs])


def case_ii_series_z(p):
    end = _conformal_end(p["mass"])
    Rs = np.geomspace(p["z_lo"], p["z_hi"], 16)
    return ["R [length]", "int_A(R,2R) |z|^2 dV [length^-1]"], \
        np.column_stack([Rs, [annulus_z2(end, R) for R in Rs]])


def case_ii_series_band(p):
    return _band_series(_surgery(p, sphere.CASE_II)[0])


# ---------------------------------------------------------------------------
# catalog identities
# ---------------------------------------------------------------------------

def _area_grid(m, lo, hi, n):
    return np.sqrt(np.linspace(lo, hi, n) - 2.0 * m)


def run_schwarzschild(p, ctx):
    m, n = p["mass"], p["grid"]
    spec = SchwarzschildSpec(m)
    doubled = make_schwarzschild(SchwarzschildSpec(m, doubled=True))
    g = doubled.pieces[1]
    ctx.le("horizon_gauss", abs(level_set_gauss_curvature(g, 0.0) - (2 * m) ** -2), ctx.tol(1e-8))
    a_sides = [abs(shape_operator(q, 0.0)[0][0]) for q in doubled.pieces]
    ctx.le("horizon_shape", max(a_sides), ctx.tol(1e-8))
    y = _area_grid(m, 2.1 * m, 100 * m, n)
    ctx.le("scalar_flat", np.max(np.abs(scalar_curvature(g, y))), ctx.tol(1e-8))
    res = static_vacuum_residual(g, static_potential(spec), _area_grid(m, 2.5 * m, 100 * m, n))
    ctx.le("static_vacuum", res.max_sup, ctx.tol(1e-6))
    conf = _conformal_end(m)
    r = np.linspace(m, 1e3 * m, n)
    ctx.gt("conformal_positive_s", np.min(scalar_curvature(conf, r)), 0.0)
    ctx.le("mass_fit", abs(fit_end_asymptotics(conf).mass - m), ctx.tol(1e-6))


def schwarzschild_series_s(p):
    m = p["mass"]
    g = make_schwarzschild(SchwarzschildSpec(m))
    r = np.linspace(2.1 * m, 100 * m, p["grid"])
    return ["r [length]", "s [length^-2]"], \
        np.column_stack([r, scalar_curvature(g, _area_grid(m, 2.1 * m, 100 * m, p["grid"]))])


def schwarzschild_series_warp(p):
    m = p["mass"]
    g = make_schwarzschild(SchwarzschildSpec(m))
    y = _area_grid(m, 2.1 * m, 100 * m, p["grid"])
    j = g.arc_jets(y, 1)[0]
    return ["r [length]", "f [length]", "f' [1]"], np.column_stack([j[0], j[0], j[1]])


def _cusp(p):
    return make_cusp(CuspSpec(p["d1"], p["d2"], p["a"], p["t0"]))


def run_cusp(p, ctx):
    c = _cusp(p)
    t = np.linspace(p["t0"], p["t0"] + 10.0, p["grid"])
    prof = ricci_profile(c, t)
    ctx.le("ricci_eigs", np.max(np.abs(prof.ricci_eigs + 2.0)), ctx.tol(1e-9))
    ctx.le("scalar", np.max(np.abs(prof.s + 6.0)), ctx.tol(1e-9))
    torus = flat_torus(p["d1"], p["d2"], p["a"])
    expected = 0.5 * np.exp(-2 * p["t0"]) * torus.area
    vol = volume(c)[0]
    ctx.le("volume", abs(vol / expected - 1.0), ctx.tol(1e-9))
    det_area = (2 * np.pi) ** 2 * np.sqrt(np.linalg.det(torus.gram))
    ctx.le("torus_area", abs(torus.area / det_area - 1.0), ctx.tol(1e-12))
    rep = evaluate_functionals(c)
    ctx.le("s_minus_sq", abs(rep.int_s_minus2 / (36.0 * vol) - 1.0), ctx.tol(1e-9))


def cusp_series_s(p):
    c = _cusp(p)
    t = np.linspace(p["t0"], p["t0"] + 10.0, p["grid"])
    return ["t [length]", "s [length^-2]"], np.column_stack([t, scalar_curvature(c, t)])


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

def _catalog(p):
    conf = _conformal_end(1.0)
    return {
        "cusp": make_cusp(CuspSpec()),
        "round_sphere": round_sphere(1.0),
        "hyperbolic_ball": hyperbolic_ball(1.0),
        "schwarzschild_annulus": conf.restricted(1.0, 10.0),
    }


def run_functionals(p, ctx):
    eps, lam = p["eps"], p["lam"]
    for name, m in _catalog(p).items():
        rep = evaluate_functionals(m, eps)
        gap = rep.I_eps - rep.S2_minus - eps * rep.volume ** (1 / 3) * rep.z2
        ctx.le(f"identity:{name}", abs(gap) / max(rep.I_eps, 1e-300), ctx.tol(1e-12))
        ctx.le(f"s_minus_le_s:{name}", rep.S2_minus, rep.S2 * (1 + 1e-15))
        chk = scale_invariance_check(m, lam, eps)
        ctx.le(f"scale_invariance:{name}", max(chk.rel_changes.values()), ctx.tol(p["tol"]))
        if rep.z2 > 1e-20 * rep.volume:
            ctx.le(f"z2_scaling:{name}", abs(chk.z2_ratio * lam - 1.0), ctx.tol(p["tol"]))
        if name == "schwarzschild_annulus":
            ctx.le(f"nonnegative_s_zero:{name}", rep.S2_minus, 0.0)
    flat = evaluate_functionals(flat_space(1.0), eps)
    ctx.le("flat_zero", max(flat.S2, flat.S2_minus, flat.z2, flat.I_eps), 0.0)


def functionals_series_scaling(p):
    m = make_cusp(CuspSpec())
    rows = []
    for lam in (0.5, 1.0, 2.0, 4.0):
        r = evaluate_functionals(m.scaled(lam), p["eps"])
        rows.append([lam, r.S2, r.S2_minus, r.I_eps, r.z2])
    return ["lambda [1]", "S2 [1]", "S2_minus [1]", "I_eps [1]", "Z2 [length^-1]"], np.array(rows)


# ---------------------------------------------------------------------------
# collapse
# ---------------------------------------------------------------------------

def _collapse_eps(p):
    e = p["eps"]
    return [1.0, e, e ** 2, e ** 3] if e < 1.0 else [1.0]


def run_collapse(p, ctx):
    base = collapse.CollapseBase(p["d1"], p["d2"], p["a"])
    eps = _collapse_eps(p)
    fam = collapse.collapse_family(base, eps)
    vols = np.array([volume(m)[0] for m in fam])
    if len(eps) > 1:
        ctx.le("volume_ratio", abs(vols[1] / vols[0] / eps[1] ** 2 - 1.0), ctx.tol(1e-10))
    ctx.le("volume_scaling", max(abs(v / collapse.expected_volume(base, e) - 1.0) for v, e in zip(vols, eps)),
           ctx.tol(1e-10))
    curv = max(float(np.max(np.abs(ricci_profile(m, m.default_grid(64)).ricci_eigs))) for m in fam)
    ctx.le("curvature_zero", curv, 0.0)
    ctx.le("curvature_bound", curv, 1.0)
    nus = [volume_radius(m).value for m in fam]
    steps = np.diff(nus)
    ctx.le("nu_monotone:steps", np.max(steps) if steps.size else 0.0, 0.0)
    ctx.lt("nu_monotone:limit", nus[-1], nus[0] if len(nus) > 1 else np.inf)


def collapse_series_volume(p):
    base = collapse.CollapseBase(p["d1"], p["d2"], p["a"])
    eps = _collapse_eps(p)
    fam = collapse.collapse_family(base, eps)
    rows = [[e, volume(m)[0], volume_radius(m).value] for e, m in zip(eps, fam)]
    return ["eps [1]", "volume [length^3]", "nu [length]"], np.array(rows)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def run_residuals(p, ctx):
    m, n = p["mass"], p["grid"]
    spec = SchwarzschildSpec(m)
    g = make_schwarzschild(spec)
    y = _area_grid(m, 2.5 * m, 100 * m, n)
    u = static_potential(spec)
    sv = static_vacuum_residual(g, u, y)
    ctx.le("static_vacuum", sv.max_sup, ctx.tol(1e-6))
    zc = zc2_residual(g, -u, 0.0, y)
    ctx.le("zc2_alpha_zero", abs(zc.sup["first"] - sv.sup["L_star"]) + abs(zc.sup["second"] - sv.sup["laplacian"]),
           ctx.tol(1e-12))
    w = sp.exp(-X / 10)
    lhs = l_star(g, 2 * u + 3 * w, y)
    rhs = 2 * l_star(g, u, y) + 3 * l_star(g, w, y)
    ctx.le("l_star_linearity", np.max(np.abs(lhs - rhs)) / max(np.max(np.abs(rhs)), 1e-300), ctx.tol(1e-12))
    c = make_cusp(CuspSpec())
    t = np.linspace(0.0, 10.0, n)
    ctx.le("cusp_l_star", np.max(np.abs(l_star(c, 1, t) - 2.0)), ctx.tol(1e-9))
    flat = collapse.collapse_member(collapse.CollapseBase(), 1.0)
    x = flat.default_grid(n)
    ctx.le("flat_affine", static_vacuum_residual(flat, X, x).max_sup, ctx.tol(1e-12))
    s3 = round_sphere(1.0)
    r = np.linspace(0.1, np.pi - 0.1, n)
    tau = p["tau"]
    rz = zc2_residual(s3, tau, 1.0, r)
    ctx.le("round_zc2", abs(rz.sup["first"] - abs(tau) * 2.0 * np.sqrt(3.0)), ctx.tol(1e-9))


def residual_series(p):
    m = p["mass"]
    spec = SchwarzschildSpec(m)
    g = make_schwarzschild(spec)
    y = _area_grid(m, 2.5 * m, 100 * m, p["grid"])
    L = l_star(g, static_potential(spec), y)
    return ["r [length]", "L*u radial [length^-2]", "L*u tangential [length^-2]"], \
        np.column_stack([y ** 2 + 2 * m, L[0], L[1]])


# ---------------------------------------------------------------------------
# conformal
# ---------------------------------------------------------------------------

def _deltas(p):
    return p["delta_max"] * 0.5 ** np.arange(p["halvings"] + 1)


def _conformal_errors(p):
    flat = flat_space(20.0)
    nu = 1 / X
    grid = np.linspace(1.0, 10.0, 257)
    shape, ricci = [], []
    for d in _deltas(p):
        shape.append(sphere.conformal_shape_delta(flat, nu, d, p["r"]).error)
        ricci.append(conformal_ricci_first_order(flat, nu, d, grid)[2])
    return np.array(shape), np.array(ricci)


def run_conformal(p, ctx):
    shape, ricci = _conformal_errors(p)
    ctx.ge("shape_order", np.min(np.log2(shape[:-1] / shape[1:])), 1.9)
    ctx.ge("ricci_order", np.min(np.log2(ricci[:-1] / ricci[1:])), 1.9)
    g = make_schwarzschild(SchwarzschildSpec(1.0, form=CONFORMALLY_FLAT))
    grid = np.linspace(1.0, 50.0, 257)
    ctx.le("ricci_transformation", conformal_ricci(g, 1 + sp.Rational(1, 10) / X, grid).max_deviation,
           ctx.tol(1e-9))
    ctx.le("constant_factor", conformal_ricci(g, 3, grid).max_deviation, ctx.tol(1e-12))
    # isotropic Schwarzschild (1 + m/2rho)^4 delta against the area-radius form
    m = 1.0
    iso = flat_space(np.inf).conformal((1 + m / (2 * X)) ** 2)
    rho = np.linspace(1.0, 50.0, 257)
    area = make_schwarzschild(SchwarzschildSpec(m))
    r = rho * (1 + m / (2 * rho)) ** 2
    a = ricci_profile(iso, rho).ricci_eigs
    b = ricci_profile(area, np.sqrt(r - 2 * m)).ricci_eigs
    ctx.le("isotropic_schwarzschild", np.max(np.abs(a - b)), ctx.tol(1e-8))


def conformal_series(p):
    shape, ricci = _conformal_errors(p)
    return ["delta [1]", "shape error [length^-1]", "ricci error [length^-2]"], \
        np.column_stack([_deltas(p), shape, ricci])


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

F, I, B = float, int, bool
SUITES: dict[str, Suite] = {s.name: s for s in (
    Suite("dehn_fill", "Dehn filling of a hyperbolic cusp: curvature, volume, bend and smoothing",
          {"d1": (F, 1.0, True), "d2": (F, 1.0, True), "a": (F, 0.0, False), "t0": (F, 5.0, True),
           "r0": (F, None, True), "grid": (I, 2048, True)},
          run_dehn, {"s": dehn_series_s, "warp": dehn_series_warp, "band": dehn_series_band}),
    Suite("sphere_case_i", "Flat-ball fill inside a Schwarzschild-type end and its comparison verdict",
          {"mass": (F, 1.0, True), "R": (F, 100.0, True), "eps": (F, 1e-3, True),
           "halfwidth": (F, 1.0, True), "a_rel_tol": (F, 0.2, True), "deficit_rel_tol": (F, 0.05, True)},
          run_case_i, {"a_difference": case_i_series_a, "band": case_i_series_band}),
    Suite("sphere_case_ii", "Round-cap fill outside a Schwarzschild-type end and its comparison verdict",
          {"mass": (F, 0.5, True), "R": (F, 100.0, True), "lam": (F, 1.75, True), "eps": (F, 1e-3, True),
           "halfwidth": (F, 1.0, True), "R_min": (F, 100.0, True), "R_max": (F, 1000.0, True),
           "slope_tol": (F, 0.1, True), "z_lo": (F, 10.0, True), "z_hi": (F, 1000.0, True),
           "z_slope_tol": (F, 0.05, True), "tail_ratio": (F, 0.1, True)},
          run_case_ii, {"a_difference": case_ii_series_a, "z_annulus": case_ii_series_z,
                        "band": case_ii_series_band}),
    Suite("schwarzschild_identities", "Horizon geometry, scalar flatness and the static potential",
          {"mass": (F, 1.0, True), "grid": (I, 2048, True)},
          run_schwarzschild, {"s": schwarzschild_series_s, "warp": schwarzschild_series_warp}),
    Suite("cusp_identities", "Constant curvature, volume and negative scalar curvature of a cusp",
          {"d1": (F, 1.0, True), "d2": (F, 1.0, True), "a": (F, 0.0, False), "t0": (F, 0.0, False),
           "grid": (I, 2048, True)},
          run_cusp, {"s": cusp_series_s}),
    Suite("functional_identities", "Functional identities and scale invariance on catalog metrics",
          {"eps": (F, 1e-3, True), "lam": (F, 2.0, True), "tol": (F, 1e-10, True)},
          run_functionals, {"scaling": functionals_series_scaling}),
    Suite("collapse", "Flat torus bundles collapsing with bounded curvature",
          {"eps": (F, 0.1, True), "d1": (F, 1.0, True), "d2": (F, 1.0, True), "a": (F, 0.0, False)},
          run_collapse, {"volume": collapse_series_volume}),
    Suite("residuals", "Static vacuum and critical-point residuals on model metrics",
          {"mass": (F, 1.0, True), "tau": (F, 1.0, False), "grid": (I, 2048, True)},
          run_residuals, {"l_star": residual_series}),
    Suite("conformal", "First-order conformal change of shape operators and Ricci curvature",
          {"delta_max": (F, 1e-2, True), "halvings": (I, 10, True), "r": (F, 3.0, True)},
          run_conformal, {"order": conformal_series}),
)}
