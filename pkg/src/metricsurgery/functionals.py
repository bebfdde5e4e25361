"""Curvature functionals and operator residuals on reduced metrics.

Tensors that are diagonal in the radial frame ``(e_t, e_1, e_2)`` are stored
as arrays of shape ``(3, n)``; the frame is orthonormal for the metric they
were computed on.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientSmoothness
from .jets import Jet
from .metric_core import Metric1D, check_grid, geometry, quad, ricci_profile, weighted
from .surgery.glued import GluedMetric
from .warp import WarpFn, as_expr

DEFAULT_EPS = 1e-3
SCHEMA_VERSION = 1


def _pieces(m) -> list[Metric1D]:
    if isinstance(m, Metric1D):
        return [m]
    if isinstance(m, GluedMetric):
        return list(m.pieces)
    out = []
    for part in m:              # disjoint union
        out.extend(_pieces(part))
    return out


# ---------------------------------------------------------------------------
# functionals
# ---------------------------------------------------------------------------

@dataclass
class FunctionalReport:
    volume: float
    int_s2: float
    int_s_minus2: float
    z2: float
    S2: float
    S2_minus: float
    I_eps: float
    eps: float
    errors: dict = field(default_factory=dict)

    @property
    def sigma(self) -> float:
        return self.S2_minus

    @property
    def tau_normalization_defined(self) -> bool:
        """``tau = s^- / sigma`` is undefined when ``sigma = 0``."""
        return self.S2_minus > 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tau_normalization"] = "s_minus/sigma" if self.tau_normalization_defined else "undefined"
        return d


def _pointwise_curvature(m: Metric1D, x):
    g = geometry(m, x, 2)
    ric = np.array([r.value for r in g.ricci])
    s = ric.sum(axis=0)
    return s, ((ric - s / 3.0) ** 2).sum(axis=0), (ric ** 2).sum(axis=0)


def _integrals(m: Metric1D, rtol: float) -> dict:
    lo, hi = m.domain
    # s^2 and |z|^2 are bounded by 3|Ric|^2, whose integral sets the absolute
    # tolerance; otherwise roundoff-level integrands never converge
    ric2, _ = quad(weighted(m, lambda x: _pointwise_curvature(m, x)[2]), lo, hi,
                   rtol=rtol, atol=1e-300)
    atol = max(rtol * ric2, 1e-300)

    def q(fn):
        return quad(weighted(m, fn), lo, hi, rtol=rtol, atol=atol)

    def s2(x):
        return _pointwise_curvature(m, x)[0] ** 2

    def sm2(x):
        return np.minimum(_pointwise_curvature(m, x)[0], 0.0) ** 2

    def z2(x):
        return _pointwise_curvature(m, x)[1]

    return {"volume": quad(m.density, lo, hi, rtol=rtol), "int_s2": q(s2),
            "int_s_minus2": q(sm2), "z2": q(z2)}


def evaluate_functionals(m, eps: float = DEFAULT_EPS, rtol: float = 1e-10) -> FunctionalReport:
    """Volume, ``S^2``, ``S^2_-``, ``Z^2`` and ``I_eps^-`` by adaptive quadrature.

    ``m`` may be a single piece, a glued metric, or a sequence of them read as
    a disjoint union.
    """
    totals = {"volume": 0.0, "int_s2": 0.0, "int_s_minus2": 0.0, "z2": 0.0}
    errors = dict.fromkeys(totals, 0.0)
    for piece in _pieces(m):
        for k, (v, e) in _integrals(piece, rtol).items():
            totals[k] += v
            errors[k] += e
    v = totals["volume"]
    cube = v ** (1.0 / 3.0)
    S2 = np.sqrt(cube * totals["int_s2"])
    S2m = np.sqrt(cube * totals["int_s_minus2"])
    I = eps * cube * totals["z2"] + S2m
    return FunctionalReport(v, totals["int_s2"], totals["int_s_minus2"], totals["z2"],
                            float(S2), float(S2m), float(I), eps, errors)


@dataclass
class ScaleCheck:
    lam: float
    S2: bool
    S2_minus: bool
    I_eps: bool
    z2_ratio: float            # Z^2(lam^2 g) / Z^2(g)
    rel_changes: dict


def _scaled(m, lam):
    if isinstance(m, Metric1D):
        return m.scaled(lam)
    if isinstance(m, GluedMetric):
        return GluedMetric(tuple(p.scaled(lam) for p in m.pieces), m.seams, m.label, m.meta)
    return [_scaled(p, lam) for p in m]


def _functional_errors(r: FunctionalReport) -> dict:
    """First-order propagation of the quadrature errors into S2, S2_minus and I_eps."""
    cube = r.volume ** (1.0 / 3.0)
    dv = r.errors.get("volume", 0.0) / (3.0 * r.volume) if r.volume > 0 else 0.0

    def root(value, integral, err):
        return value * (0.5 * err / integral + 0.5 * dv) if integral > 0 else np.sqrt(cube * err)

    s2 = root(r.S2, r.int_s2, r.errors.get("int_s2", 0.0))
    s2m = root(r.S2_minus, r.int_s_minus2, r.errors.get("int_s_minus2", 0.0))
    z = r.eps * cube * (r.errors.get("z2", 0.0) + r.z2 * dv)
    return {"S2": s2, "S2_minus": s2m, "I_eps": s2m + z}


def scale_invariance_check(m, lam: float, eps: float = DEFAULT_EPS, rtol: float = 1e-10) -> ScaleCheck:
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    a = evaluate_functionals(m, eps, rtol=1e-12)
    b = evaluate_functionals(_scaled(m, lam), eps, rtol=1e-12)

    ea, eb = _functional_errors(a), _functional_errors(b)

    def rel(k):
        x, y = getattr(a, k), getattr(b, k)
        # differences inside the propagated quadrature error are noise, e.g. Z^2 of a space form
        if abs(x - y) <= ea[k] + eb[k]:
            return 0.0
        return abs(x - y) / max(abs(x), abs(y))

    ch = {k: rel(k) for k in ("S2", "S2_minus", "I_eps")}
    ratio = b.z2 / a.z2 if a.z2 > 0 else float("nan")
    return ScaleCheck(lam, ch["S2"] <= rtol, ch["S2_minus"] <= rtol, ch["I_eps"] <= rtol, ratio, ch)


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def _u_jet(m: Metric1D, u, x, order: int) -> Jet:
    if isinstance(u, WarpFn):
        return m.arc_jet_of(u, x, order)
    return m.arc_jet_of(WarpFn.closed_form(as_expr(u), m.domain), x, order)


def hessian_frame(A: tuple[Jet, Jet], u: Jet) -> list[Jet]:
    """``D^2 u`` for radial ``u``: ``diag(u'', A1 u', A2 u')``."""
    du = u.d()
    return [du.d(), A[0] * du, A[1] * du]


def laplacian(A: tuple[Jet, Jet], u: Jet) -> Jet:
    du = u.d()
    return du.d() + (A[0] + A[1]) * du


def l_star(m: Metric1D, u, grid) -> np.ndarray:
    """``D^2 u - (Lap u) g - u Ric`` as radial-frame eigencomponents, shape ``(3, n)``."""
    grid = check_grid(m, grid)
    g = geometry(m, grid, 2)
    uj = _u_jet(m, u, grid, 2)
    hess = hessian_frame(g.A, uj)
    lap = laplacian(g.A, uj).value
    return np.array([h.value - lap - uj.value * r.value for h, r in zip(hess, g.ricci)])


def grad_z2(m: Metric1D, grid, order: int = 4):
    """Gradient of ``int |z|^2`` as radial-frame eigencomponents (a jet list).

    ``-tr D^2 z + 1/3 D^2 s - 2 R(z) + 1/2 (|z|^2 - 1/3 Lap s) g`` where ``R``
    is the curvature action on symmetric 2-tensors.  ``order`` is the warp
    derivative order, at least 4; the returned jets have order ``order - 4``.
    """
    if order < 4:
        raise InsufficientSmoothness("the gradient of Z^2 needs four warping derivatives")
    geo = geometry(m, grid, order)
    A1, A2 = (a.truncate(order - 3) for a in geo.A)
    K = {(0, 1): geo.K01, (0, 2): geo.K02, (1, 2): geo.K12}
    z = geo.tracefree
    s = geo.scalar
    H = A1 + A2
    z2 = sum(c * c for c in z)

    def rough_laplacian(T):
        d1 = [c.d() for c in T]
        d2 = [c.d() for c in d1]
        out0 = d2[0] + H * d1[0] - 2.0 * (A1 * A1 * (T[0] - T[1]) + A2 * A2 * (T[0] - T[2]))
        out1 = d2[1] + H * d1[1] + 2.0 * A1 * A1 * (T[0] - T[1])
        out2 = d2[2] + H * d1[2] + 2.0 * A2 * A2 * (T[0] - T[2])
        return [out0, out1, out2]

    def curv_action(T):
        k = lambda i, j: K[(min(i, j), max(i, j))]
        return [sum(k(i, j) * T[j] for j in range(3) if j != i) for i in range(3)]

    trD2 = rough_laplacian(z)
    ds = s.d()
    hess_s = [ds.d(), A1 * ds, A2 * ds]
    lap_s = ds.d() + H * ds
    Rz = curv_action(z)
    iso = 0.5 * (z2 - lap_s * (1.0 / 3.0))
    return [-trD2[i] + hess_s[i] * (1.0 / 3.0) - 2.0 * Rz[i] + iso for i in range(3)]


def radial_divergence(m: Metric1D, T: Sequence[Jet], grid) -> np.ndarray:
    """Radial component of ``div T`` for a diagonal radial-frame tensor ``T``."""
    g = geometry(m, grid, 2)
    A1, A2 = g.A[0].value, g.A[1].value
    T0, T1, T2 = T
    return T0[1] + A1 * (T0.value - T1.value) + A2 * (T0.value - T2.value)


@dataclass
class ResidualReport:
    equation: str
    sup: dict
    l2: dict
    grid: tuple[float, float, int]
    tolerance: float | None = None

    @property
    def max_sup(self) -> float:
        return max(self.sup.values())

    def to_dict(self) -> dict:
        return asdict(self)


def _norms(m: Metric1D, grid, fields: dict) -> tuple[dict, dict]:
    w = m.density(grid)
    sup, l2 = {}, {}
    for name, val in fields.items():
        sq = np.atleast_2d(val) ** 2
        pt = sq.sum(axis=0)
        sup[name] = float(np.sqrt(pt.max()))
        l2[name] = float(np.sqrt(np.trapezoid(pt * w, grid))) if grid.size > 1 else sup[name]
    return sup, l2


def static_vacuum_residual(m: Metric1D, u, grid=None, tolerance: float | None = None) -> ResidualReport:
    """Norms of ``L* u`` and ``Lap u``."""
    grid = check_grid(m, m.default_grid() if grid is None else grid)
    geo = geometry(m, grid, 2)
    uj = _u_jet(m, u, grid, 2)
    fields = {"L_star": l_star(m, u, grid), "laplacian": laplacian(geo.A, uj).value}
    sup, l2 = _norms(m, grid, fields)
    return ResidualReport("static_vacuum", sup, l2, (float(grid[0]), float(grid[-1]), grid.size),
                          tolerance)


def zc2_residual(m: Metric1D, tau, alpha: float, grid=None, tolerance: float | None = None) -> ResidualReport:
    """Norms of ``alpha grad Z^2 + L* tau`` and ``Lap(tau + alpha s / 12) + alpha |z|^2 / 4``."""
    grid = check_grid(m, m.default_grid() if grid is None else grid)
    lstar = l_star(m, tau, grid)
    geo = geometry(m, grid, 4)
    tj = _u_jet(m, tau, grid, 2)
    if alpha == 0.0:
        first = lstar
        second = laplacian(geo.A, tj).value
    else:
        gz = np.array([c.value for c in grad_z2(m, grid)])
        first = alpha * gz + lstar
        s = geo.scalar.truncate(2)
        A2 = tuple(a.truncate(1) for a in geo.A)
        z2 = sum(c.value ** 2 for c in geo.tracefree)
        second = laplacian(A2, tj + s * (alpha / 12.0)).value + alpha * z2 / 4.0
    sup, l2 = _norms(m, grid, {"first": first, "second": second})
    return ResidualReport("zc2", sup, l2, (float(grid[0]), float(grid[-1]), grid.size), tolerance)


# ---------------------------------------------------------------------------
# conformal change
# ---------------------------------------------------------------------------

@dataclass
class ConformalRicciReport:
    grid: np.ndarray
    predicted: np.ndarray          # (3, n), in a g-orthonormal frame
    exact: np.ndarray
    max_deviation: float


def conformal_ricci(m: Metric1D, u, grid) -> ConformalRicciReport:
    """Ricci of ``u^2 g`` from the transformation law versus direct computation."""
    grid = check_grid(m, grid)
    geo = geometry(m, grid, 2)
    uj = _u_jet(m, u, grid, 2)
    uv = uj.value
    hess = hessian_frame(geo.A, uj)
    lap = laplacian(geo.A, uj).value
    dlog = uj[1] / uv
    pred = np.array([r.value - h.value / uv - lap / uv for r, h in zip(geo.ricci, hess)])
    pred[0] += 2.0 * dlog ** 2
    exact = ricci_profile(m.conformal(as_expr(u) if not isinstance(u, WarpFn) else u.expr),
                          grid).ricci_eigs.T * uv ** 2
    return ConformalRicciReport(grid, pred, exact, float(np.max(np.abs(pred - exact))))


def conformal_ricci_first_order(m: Metric1D, nu, delta: float, grid):
    """Linearised Ricci of ``(1 + 2 nu delta) g`` against the exact value.

    Returns ``(prediction, exact, max error)``, all in a g-orthonormal frame.
    """
    grid = check_grid(m, grid)
    nu = as_expr(nu)
    u = (1 + 2 * nu * delta) ** 0.5
    geo = geometry(m, grid, 2)
    nj = _u_jet(m, nu, grid, 2)
    hess = hessian_frame(geo.A, nj)
    lap = laplacian(geo.A, nj).value
    pred = np.array([r.value - delta * (h.value + lap) for r, h in zip(geo.ricci, hess)])
    uv = _u_jet(m, u, grid, 0).value
    exact = ricci_profile(m.conformal(u), grid).ricci_eigs.T * uv ** 2
    return pred, exact, float(np.max(np.abs(exact - pred)))
