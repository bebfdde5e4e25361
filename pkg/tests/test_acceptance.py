"""The twelve acceptance criteria, one test each, at their stated tolerances and time limits."""
import time

import numpy as np
import pytest

from metricsurgery.functionals import (conformal_ricci_first_order, evaluate_functionals, scale_invariance_check,
                                       static_vacuum_residual)
from metricsurgery.metric_core import (level_set_gauss_curvature, quad, ricci_profile, scalar_curvature,
                                       shape_operator, volume, volume_radius)
from metricsurgery.model_metrics import (CONFORMALLY_FLAT, CuspSpec, SchwarzschildSpec, annulus_z2,
                                         flat_space, make_cusp, make_schwarzschild, round_sphere,
                                         solve_cap_matching, static_potential)
from metricsurgery.surgery import collapse, dehn, sphere
from metricsurgery.surgery.smoothing import smooth_seams
from metricsurgery.warp import X

from oracles import dehn_closed_form


class Clock:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def conformal_end(m):
    return make_schwarzschild(SchwarzschildSpec(m, form=CONFORMALLY_FLAT))


def area_grid(m, lo, hi, n=2048):
    return np.sqrt(np.linspace(lo, hi, n) - 2 * m)


@pytest.mark.criterion(1, "Dehn-fill scalar curvature matches the closed form; min -6 at pi/2")
def test_dehn_scalar_curvature():
    with Clock(1.0):
        g = dehn.dehn_fill(dehn.DehnFillSpec(CuspSpec(), t0=5.0))
        core = g.pieces[0]
        r = np.linspace(0.0, np.pi / 2, 2048)
        s = scalar_curvature(core, r)
    expected = np.array([dehn_closed_form(x) for x in r])
    assert np.max(np.abs(s - expected)) <= 1e-9
    k = int(np.argmin(s))
    assert abs(s[k] + 6.0) <= 1e-6
    assert abs(r[k] - np.pi / 2) <= 1e-6
    assert np.all(s[r <= np.pi / 2 - 1e-3] > -6.0)


@pytest.mark.criterion(2, "Dehn-fill volume integral below 0.464; ratio below 1 and t0-independent")
def test_dehn_volume():
    with Clock(1.0):
        val, err = quad(lambda x: np.exp(-np.cos(x)) * np.tan(x / 2), 0.0, np.pi / 2, rtol=1e-13)
        ratios = []
        for t0 in (3.0, 5.0, 8.0):
            g = dehn.dehn_fill(dehn.DehnFillSpec(CuspSpec(), t0=t0))
            ratios.append(dehn.solid_torus_volume(g) / g.meta["cusp_volume"])
    assert val < 0.464
    assert err < 1e-10
    assert max(ratios) < 1.0
    assert max(ratios) - min(ratios) <= 1e-10


@pytest.mark.criterion(3, "After bend and smoothing s >= -6 everywhere, bend region s > 0")
@pytest.mark.parametrize("a", [0.0, 0.5])
def test_smoothed_floor(a):
    with Clock(5.0):
        g = dehn.dehn_fill(dehn.DehnFillSpec(CuspSpec(a=a), t0=5.0))
        sm = smooth_seams(dehn.bend_core(g), floor=-6.0)
        bands = {rec.piece for rec in sm.meta["bands"]}
        mins = [float(np.min(scalar_curvature(p, p.default_grid(8192 if i in bands else 2048))))
                for i, p in enumerate(sm.pieces)]
        bend = sm.pieces[0]
        s_bend = scalar_curvature(bend, bend.default_grid())
    assert min(mins) >= -6.0
    assert np.min(s_bend) > 0.0


@pytest.mark.criterion(4, "Schwarzschild horizon, scalar flatness and static vacuum")
def test_schwarzschild_identities():
    m = 1.0
    with Clock(2.0):
        spec = SchwarzschildSpec(m)
        doubled = make_schwarzschild(SchwarzschildSpec(m, doubled=True))
        K = level_set_gauss_curvature(doubled.pieces[1], 0.0)
        A = [shape_operator(p, 0.0)[0][0] for p in doubled.pieces]
        g = make_schwarzschild(spec)
        s = scalar_curvature(g, area_grid(m, 2.1 * m, 100 * m))
        res = static_vacuum_residual(g, static_potential(spec), area_grid(m, 2.5 * m, 100 * m))
    assert abs(K - (2 * m) ** -2) <= 1e-8
    assert max(map(abs, A)) <= 1e-8
    assert np.max(np.abs(s)) <= 1e-8
    assert res.max_sup < 1e-6


@pytest.mark.criterion(5, "Case I shape-operator difference follows m/R^2")
def test_case_i_shape_operators():
    m = 1.0
    with Clock(1.0):
        end = conformal_end(m)
        d2 = sphere.flat_fill(end, 1e2 * m)[2]
        d3 = sphere.flat_fill(end, 1e3 * m)[2]
    assert abs(d2 / (m / 1e4) - 1.0) <= 0.2
    assert abs(d3 / (m / 1e6) - 1.0) <= 0.02


@pytest.mark.criterion(6, "Case I volume deficit ratio tends to -3/2")
def test_case_i_volume_deficit():
    m = 1.0
    with Clock(2.0):
        ratio = sphere.volume_deficit_ratio(conformal_end(m), 1e3 * m, m)
    assert abs(ratio / -1.5 - 1.0) <= 0.05


@pytest.mark.criterion(7, "Case I verdict: four ledger entries hold, I_eps decreases with margin")
def test_case_i_verdict():
    with Clock(10.0):
        spec = sphere.SphereSurgerySpec(conformal_end(1.0), 1e2, sphere.CASE_I, eps=1e-3)
        _, verdict = sphere.sphere_surgery(spec)
    assert all(e.holds for e in verdict.ledger.values()), verdict.ledger
    assert verdict.I_eps_glued < verdict.I_eps_original
    assert verdict.ledger["I_eps_decreased"].margin > 0


@pytest.mark.criterion(8, "Case II cap system, boundary match and A-difference slope")
def test_case_ii_cap():
    m = 0.5
    with Clock(5.0):
        end = conformal_end(m)
        sol = solve_cap_matching(1e2, "C1", m=m)
        cap, fitted, shape_gap = sphere.cap_fill(end, 1e2, "C1")
        f_end = float(end.warp_values(1e2)[0, 0])
        Rs = np.geomspace(1e2, 1e3, 9)
        diffs = np.array([sphere.cap_fill(end, R, "mismatch", 1.75)[2] for R in Rs])
    assert max(map(abs, sol.residuals)) <= 1e-12
    assert abs(np.sin(fitted.delta * fitted.D) / fitted.delta - f_end) <= 1e-10 * f_end
    assert abs(shape_gap) <= 1e-10 * abs(shape_operator(end, 1e2)[0][0])
    assert np.all(diffs > 0)
    slope = np.polyfit(np.log(Rs), np.log(diffs), 1)[0]
    assert abs(slope + 2.75) <= 0.1


@pytest.mark.criterion(9, "z-decay slope -3 and Case II band below a tenth of the tail")
def test_z_decay():
    m = 0.5
    with Clock(5.0):
        end = conformal_end(m)
        Rs = np.geomspace(10.0, 1e3, 16)
        Z = np.array([annulus_z2(end, R) for R in Rs])
        _, verdict = sphere.sphere_surgery(sphere.SphereSurgerySpec(end, 1e2, sphere.CASE_II))
    slope = np.polyfit(np.log(Rs), np.log(Z), 1)[0]
    assert abs(slope + 3.0) <= 0.05
    assert verdict.diagnostics["band_to_tail"] < 0.1


@pytest.mark.criterion(10, "Functional identity and scale invariance on three catalog metrics")
def test_functional_identities():
    eps = 1e-3
    metrics = [make_cusp(CuspSpec()), round_sphere(1.0), conformal_end(1.0).restricted(1.0, 10.0)]
    with Clock(2.0):
        reps = [evaluate_functionals(m, eps) for m in metrics]
        checks = [scale_invariance_check(m, 2.0, eps) for m in metrics]
    for rep in reps:
        tol = eps * rep.volume ** (1 / 3) * rep.errors["z2"] + 1e-15 * rep.I_eps
        assert abs(rep.I_eps - rep.S2_minus - eps * rep.volume ** (1 / 3) * rep.z2) <= tol
    for chk in checks:
        assert max(chk.rel_changes.values()) <= 1e-10


@pytest.mark.criterion(11, "Conformal first-order laws converge at order >= 1.9")
def test_conformal_first_order():
    flat = flat_space(20.0)
    deltas = 1e-2 * 0.5 ** np.arange(11)          # down to 9.8e-6
    grid = np.linspace(1.0, 10.0, 257)
    with Clock(2.0):
        shape = np.array([sphere.conformal_shape_delta(flat, 1 / X, d, 3.0).error for d in deltas])
        ricci = np.array([conformal_ricci_first_order(flat, 1 / X, d, grid)[2] for d in deltas])
    assert deltas[-1] <= 1e-5
    assert np.min(np.log2(shape[:-1] / shape[1:])) >= 1.9
    assert np.min(np.log2(ricci[:-1] / ricci[1:])) >= 1.9


@pytest.mark.criterion(12, "Collapse: volume ~ eps^2, flat, nu-radius decreasing to 0")
def test_collapse():
    base = collapse.CollapseBase()
    eps = [1.0, 1e-1, 1e-2, 1e-3]
    with Clock(1.0):
        fam = collapse.collapse_family(base, eps)
        vols = [volume(m)[0] for m in fam]
        curv = [np.max(np.abs(ricci_profile(m, m.default_grid()).ricci_eigs)) for m in fam]
        nus = [volume_radius(m).value for m in fam]
    for e, v in zip(eps, vols):
        assert abs(v / (e ** 2 * vols[0]) - 1.0) <= 1e-10
    assert max(curv) == 0.0
    assert all(b <= a for a, b in zip(nus, nus[1:]))
    # once unsaturated the radius is linear in eps, so it goes to 0
    assert nus[-1] < nus[-2] < nus[0]
    assert abs((nus[-1] / eps[-1]) / (nus[-2] / eps[-2]) - 1.0) <= 1e-2
