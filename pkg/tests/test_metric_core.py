import numpy as np
import pytest
import sympy as sp
from hypothesis import given, strategies as st

from metricsurgery.errors import GridOutOfDomain, InsufficientSmoothness, WarpingNonpositiveOnGrid
from metricsurgery.metric_core import (Metric1D, quad, richardson_limit, ricci_profile, scalar_curvature,
                                       shape_operator, volume, volume_radius)
from metricsurgery.model_metrics import (CONFORMALLY_FLAT, CuspSpec, SchwarzschildSpec, flat_space,
                                         hyperbolic_ball, make_cusp, make_schwarzschild, round_sphere)
from metricsurgery.surgery.collapse import CollapseBase, collapse_member
from metricsurgery.warp import X, WarpFn

import oracles

lams = st.floats(0.1, 10.0)


def catalog():
    return [
        round_sphere(0.7),
        hyperbolic_ball(2.0),
        make_cusp(CuspSpec(1.3, 0.8, 0.4)),
        make_schwarzschild(SchwarzschildSpec(1.0)).restricted(0.5, 10.0),
        make_schwarzschild(SchwarzschildSpec(1.0, form=CONFORMALLY_FLAT)).restricted(1.0, 50.0),
    ]


# --- constant curvature oracles -------------------------------------------

@pytest.mark.parametrize("m, ric", [
    (flat_space(3.0), 0.0),
    (round_sphere(0.5), 2 * 0.25),
    (round_sphere(2.0), 2 * 4.0),
    (hyperbolic_ball(3.0), -2.0),
    (make_cusp(CuspSpec(2.0, 0.5, 0.3)), -2.0),
])
def test_constant_curvature_profile(m, ric):
    hi = m.domain[1] if np.isfinite(m.domain[1]) else m.domain[0] + 8.0
    prof = ricci_profile(m, np.linspace(m.domain[0], hi, 301))
    scale = max(abs(ric), 1.0)
    assert np.max(np.abs(prof.ricci_eigs - ric)) <= 1e-9 * scale
    assert np.max(np.abs(prof.s - 3 * ric)) <= 1e-9 * scale
    assert np.max(np.abs(prof.z_norm_sq)) <= 1e-9 * scale


def test_cone_endpoints_use_one_sided_limits():
    # both ends of the round sphere are cone-like (f = 0); the limit there is 6 delta^2
    m = round_sphere(0.5)
    s = scalar_curvature(m, [0.0, m.domain[1]])
    assert s == pytest.approx([1.5, 1.5], rel=1e-8)


def test_richardson_limit_of_a_smooth_function():
    val, err = richardson_limit(lambda h: np.sin(h) / h, 0.1)
    assert val == pytest.approx(1.0, abs=1e-12)
    assert err < 1e-10


# --- mpmath dual route ------------------------------------------------------

@given(st.floats(0.05, np.pi / 2 - 0.05))
def test_doubly_warped_ricci_matches_mpmath(r):
    m = Metric1D.doubly_warped(sp.tan(X / 2), sp.exp(-sp.cos(X)), 0.0, (0.0, np.pi / 2))
    ric, s = oracles.doubly_warped_ricci(*oracles.dehn_trial(), r)
    prof = ricci_profile(m, [r])
    assert prof.ricci_eigs[0] == pytest.approx(ric, rel=1e-10, abs=1e-12)
    assert prof.s[0] == pytest.approx(s, rel=1e-10)


@given(st.floats(0.3, 200.0))
def test_lapse_chain_rule_matches_mpmath(r):
    m = make_schwarzschild(SchwarzschildSpec(0.5, form=CONFORMALLY_FLAT))
    expected = oracles.spherical_scalar(*oracles.conformal_end(0.5), r)
    assert scalar_curvature(m, [r])[0] == pytest.approx(expected, rel=1e-8, abs=1e-14)


def test_volume_oracles():
    assert volume(round_sphere(0.5))[0] == pytest.approx(oracles.s3_volume(0.5), rel=1e-10)
    assert volume(hyperbolic_ball(1.5))[0] == pytest.approx(oracles.hyperbolic_ball_volume(1.5), rel=1e-10)
    cusp = make_cusp(CuspSpec(1.2, 0.7, 0.5, 0.3))
    assert volume(cusp)[0] == pytest.approx(oracles.cusp_volume(1.2, 0.7, 0.5, 0.3), rel=1e-10)


# --- invariants ---------------------------------------------------------------

@given(lams, st.integers(0, 4))
def test_scaling_covariance(lam, k):
    m = catalog()[k]
    hi = m.domain[1] if np.isfinite(m.domain[1]) else m.domain[0] + 5.0
    grid = np.linspace(m.domain[0] + 0.01 * (hi - m.domain[0]), hi - 0.01 * (hi - m.domain[0]), 33)
    big = m.scaled(lam)
    s0, s1 = scalar_curvature(m, grid), scalar_curvature(big, grid)
    # scalar-flat pieces: compare against the size of the full curvature
    scale = np.max(np.abs(ricci_profile(m, grid).ricci_eigs))
    assert np.allclose(s1, s0 / lam ** 2, rtol=1e-10, atol=1e-12 * scale / lam ** 2)
    if np.isfinite(m.domain[1]):
        assert volume(big)[0] == pytest.approx(lam ** 3 * volume(m)[0], rel=1e-10)
    x = grid[len(grid) // 2]
    a0 = shape_operator(m, x)[0][0]
    assert shape_operator(big, x)[0][0] == pytest.approx(a0 / lam, rel=1e-10)


@given(st.integers(0, 4))
def test_trace_identity(k):
    m = catalog()[k]
    hi = m.domain[1] if np.isfinite(m.domain[1]) else m.domain[0] + 5.0
    prof = ricci_profile(m, np.linspace(m.domain[0], hi, 101))
    assert np.allclose(prof.ricci_eigs.sum(axis=1), prof.s, rtol=1e-12, atol=1e-12)


def test_finite_difference_order():
    m = make_schwarzschild(SchwarzschildSpec(1.0, form=CONFORMALLY_FLAT)).restricted(1.0, 20.0)
    grid = np.linspace(2.0, 15.0, 27)
    exact = scalar_curvature(m, grid)
    errs = [np.max(np.abs(scalar_curvature(m, grid, "fd", h) - exact)) for h in (1e-2, 5e-3, 2.5e-3)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 1.9)


@pytest.mark.parametrize("k", range(5))
def test_quadrature_converges(k):
    m = catalog()[k]
    if not np.isfinite(m.domain[1]):
        m = m.restricted(m.domain[0], m.domain[0] + 5.0)
    v1, e1 = volume(m, rtol=1e-8)
    v2, _ = volume(m, rtol=5e-9)
    assert abs(v1 - v2) <= max(e1, 1e-15 * abs(v1))


def test_quad_handles_infinite_range():
    val, err = quad(lambda x: np.exp(-x * x), -np.inf, np.inf)
    assert val == pytest.approx(np.sqrt(np.pi), rel=1e-12)


# --- radii ------------------------------------------------------------------------

@given(st.floats(0.2, 5.0))
def test_volume_radius_scales_with_the_metric(lam):
    m = collapse_member(CollapseBase(), 0.01)
    nu0 = volume_radius(m).value
    nu1 = volume_radius(m.scaled(lam)).value
    assert nu1 == pytest.approx(lam * nu0, rel=1e-6)


def test_volume_radius_is_labelled_centered():
    assert volume_radius(flat_space(2.0)).kind == "centered-ball estimate"


# --- errors ------------------------------------------------------------------------

def test_grid_outside_domain():
    with pytest.raises(GridOutOfDomain):
        scalar_curvature(round_sphere(1.0), [4.0])


def test_nonpositive_warping_away_from_cones():
    m = Metric1D.spherical(sp.cos(X), (0.0, 3.0))
    with pytest.raises(WarpingNonpositiveOnGrid):
        scalar_curvature(m, [2.0])


def test_sampled_warping_refuses_high_derivatives():
    x = np.linspace(1.0, 2.0, 50)
    w = WarpFn.sampled(x, x ** 2)
    with pytest.raises(InsufficientSmoothness):
        w.jet(1.5, 3)


def test_metric_validation():
    with pytest.raises(ValueError):
        Metric1D.doubly_warped(1.0, 1.0, 1.0, (0.0, 1.0))
    with pytest.raises(ValueError):
        Metric1D.spherical(X, (1.0, 1.0))
