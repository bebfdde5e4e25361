"""One-dimensional warping functions.

Three representations share one interface (``jet(x, order)``):

* closed form -- a sympy expression in the coordinate symbol ``X``; all
  derivatives are exact (differentiated symbolically, then lambdified);
* sampled -- a grid of (x, f) pairs; derivatives by second-order divided
  differences, at most two of them;
* hermite -- piecewise polynomials matching prescribed derivatives at
  breakpoints (cubic when slopes are given, quintic with second derivatives).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Mapping, Sequence

import numpy as np
import sympy as sp
from scipy.interpolate import BPoly

from .errors import InsufficientSmoothness
from .jets import Jet

X = sp.Symbol("x", real=True)

MAX_ORDER = 6


@lru_cache(maxsize=512)
def _derivative_funcs(expr: sp.Expr, order: int, given: tuple = ()):
    """Lambdified derivatives; ``given`` supplies explicit forms of the first few."""
    funcs = []
    cur = expr
    for k in range(order + 1):
        if 1 <= k <= len(given):
            cur = given[k - 1]
        funcs.append(sp.lambdify(X, cur, modules="numpy", cse=True))
        cur = sp.diff(cur, X)
    return tuple(funcs)


def as_expr(value) -> sp.Expr:
    """Accept a sympy expression, a number, or a string in ``x``."""
    if isinstance(value, sp.Expr):
        return value
    if isinstance(value, (int, float)):
        return sp.Float(value)
    if isinstance(value, str):
        return sp.sympify(value, locals={"x": X})
    raise TypeError(f"cannot interpret {value!r} as a radial function")


@dataclass(frozen=True, eq=False)
class WarpFn:
    kind: str
    domain: tuple[float, float]
    expr: sp.Expr | None = None
    catalog_id: str | None = None
    params: Mapping[str, Any] = field(default_factory=dict)
    nodes: np.ndarray | None = None
    values: np.ndarray | None = None
    bpoly: BPoly | None = None
    given: tuple = ()                # explicit derivative expressions (orders 1, 2, ...)

    # --- constructors -------------------------------------------------
    @classmethod
    def closed_form(cls, expr, domain, catalog_id=None, derivatives=(), **params) -> "WarpFn":
        """``derivatives`` optionally gives better-conditioned forms of f', f'', ..."""
        return cls("closed_form", (float(domain[0]), float(domain[1])), as_expr(expr),
                   catalog_id, dict(params), given=tuple(as_expr(d) for d in derivatives))

    @classmethod
    def sampled(cls, nodes, values) -> "WarpFn":
        nodes = np.asarray(nodes, float)
        values = np.asarray(values, float)
        if nodes.ndim != 1 or nodes.shape != values.shape or np.any(np.diff(nodes) <= 0):
            raise ValueError("sampled warp needs strictly increasing nodes and matching values")
        return cls("sampled", (nodes[0], nodes[-1]), nodes=nodes, values=values)

    @classmethod
    def hermite(cls, breaks: Sequence[float], derivs: Sequence[Sequence[float]]) -> "WarpFn":
        """``derivs[i] = [f, f', (f'', ...)]`` at ``breaks[i]``."""
        breaks = np.asarray(breaks, float)
        bp = BPoly.from_derivatives(breaks, [list(map(float, d)) for d in derivs])
        return cls("hermite", (breaks[0], breaks[-1]), bpoly=bp,
                   params={"breaks": breaks, "derivs": [list(d) for d in derivs]})

    # --- evaluation ---------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.kind != "sampled"

    def __call__(self, x):
        return self.jet(x, 0).value

    def jet(self, x, order: int = 2) -> Jet:
        x = np.atleast_1d(np.asarray(x, float))
        if self.kind == "closed_form":
            funcs = _derivative_funcs(self.expr, max(order, 0), self.given)
            rows = [np.broadcast_to(np.asarray(f(x), float), x.shape) for f in funcs[: order + 1]]
            return Jet(np.array(rows))
        if self.kind == "hermite":
            rows = [self.bpoly(x, nu=k) if k else self.bpoly(x) for k in range(order + 1)]
            return Jet(np.array(rows))
        if order > 2:
            raise InsufficientSmoothness(
                f"sampled warping supports derivatives up to order 2, {order} requested")
        rows = [self.values]
        for _ in range(order):
            rows.append(np.gradient(rows[-1], self.nodes, edge_order=2))
        return Jet(np.array([np.interp(x, self.nodes, r) for r in rows]))

    # --- algebra used by scaling and conformal changes ----------------
    def scaled(self, c: float) -> "WarpFn":
        if self.kind == "closed_form":
            return WarpFn.closed_form(c * self.expr, self.domain, self.catalog_id,
                                      [c * d for d in self.given], **self.params)
        if self.kind == "sampled":
            return WarpFn.sampled(self.nodes, c * self.values)
        derivs = [[c * v for v in d] for d in self.params["derivs"]]
        return WarpFn.hermite(self.params["breaks"], derivs)

    def times(self, other) -> "WarpFn":
        """Pointwise product with a closed-form radial function."""
        if self.kind != "closed_form":
            raise InsufficientSmoothness("products are only formed for closed-form warpings")
        return WarpFn.closed_form(self.expr * as_expr(other), self.domain)

    def restricted(self, lo: float, hi: float) -> "WarpFn":
        if self.kind == "closed_form":
            return WarpFn.closed_form(self.expr, (lo, hi), self.catalog_id, self.given, **self.params)
        return self


def constant(value: float, domain) -> WarpFn:
    return WarpFn.closed_form(sp.Float(value), domain, "constant", value=value)
