"""Piecewise metrics joined at seams."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import SeamMismatch
from ..metric_core import Metric1D, quad, ricci_profile, volume, weighted

SEAM_TOL = 1e-10
ORDERS = ("C0", "C1", "C2")


@dataclass(frozen=True)
class Seam:
    index: int                      # joins pieces[index] and pieces[index + 1]
    location: float                 # right end of the left piece, in its coordinate
    target_order: str
    jumps: dict                     # "f", "df", "d2f": per-warping jumps in arclength derivatives
    band: tuple[float, float] | None = None

    def max_jump(self, key: str) -> float:
        return float(np.max(np.abs(self.jumps[key])))

    @property
    def achieved_order(self) -> str:
        if self.max_jump("f") > SEAM_TOL:
            return "discontinuous"
        if self.max_jump("df") > SEAM_TOL:
            return "C0"
        return "C1" if self.max_jump("d2f") > SEAM_TOL else "C2"


def seam_data(left: Metric1D, right: Metric1D) -> dict:
    jl = left.arc_jets(left.domain[1], 2)
    jr = right.arc_jets(right.domain[0], 2)
    keys = ("f", "df", "d2f")
    return {k: [float(b[i][0] - a[i][0]) for a, b in zip(jl, jr)] for i, k in enumerate(keys)}


@dataclass(frozen=True, eq=False)
class GluedMetric:
    pieces: tuple[Metric1D, ...]
    seams: tuple[Seam, ...]
    label: str = ""
    meta: dict = field(default_factory=dict)

    @classmethod
    def glue(cls, pieces: Sequence[Metric1D], orders: Sequence[str] | str = "C1",
             label: str = "", bands=None, meta=None) -> "GluedMetric":
        pieces = tuple(pieces)
        if isinstance(orders, str):
            orders = [orders] * (len(pieces) - 1)
        if len(orders) != len(pieces) - 1:
            raise ValueError("one matching order per seam")
        shapes = {(p.shape, p.a) for p in pieces}
        if len(shapes) != 1:
            raise SeamMismatch("pieces disagree on shape or torus angle")
        seams = []
        for i, (l, r, order) in enumerate(zip(pieces, pieces[1:], orders)):
            if order not in ORDERS:
                raise ValueError(f"unknown matching order {order!r}")
            jumps = seam_data(l, r)
            jets = l.arc_jets(l.domain[1], 2)
            left = [np.array([j[k][0] for j in jets]) for k in range(3)]
            need = ORDERS.index(order)
            for k, key in enumerate(("f", "df", "d2f")[: need + 1]):
                scale = max(1.0, float(np.max(np.abs(left[k]))))
                if max(abs(v) for v in jumps[key]) > SEAM_TOL * scale:
                    raise SeamMismatch(f"seam {i}: {key} jumps by {jumps[key]} (target {order})")
            band = None if bands is None else bands[i]
            seams.append(Seam(i, float(l.domain[1]), order, jumps, band))
        return cls(pieces, tuple(seams), label, dict(meta or {}))

    @property
    def shape(self) -> str:
        return self.pieces[0].shape

    @property
    def a(self) -> float:
        return self.pieces[0].a

    def volume(self, rtol: float = 1e-10) -> tuple[float, float]:
        vals = [volume(p, rtol=rtol) for p in self.pieces]
        return sum(v for v, _ in vals), sum(e for _, e in vals)

    def integrate(self, pointwise: Callable[[Metric1D, np.ndarray], np.ndarray],
                  rtol: float = 1e-10, atol: float = 0.0) -> tuple[float, float]:
        """Sum over pieces of ``int pointwise(piece, x) dV``."""
        total, err = 0.0, 0.0
        for p in self.pieces:
            v, e = quad(weighted(p, lambda x, p=p: pointwise(p, x)), *p.domain, rtol=rtol, atol=atol)
            total += v
            err += e
        return total, err

    def arclength_offsets(self) -> list[float]:
        """Arclength position of each piece's lower end, the first one at 0."""
        out = [0.0]
        for p in self.pieces[:-1]:
            out.append(out[-1] + p.arclength(*p.domain))
        return out

    def profiles(self, n: int | None = None):
        """``(piece index, grid, CurvatureProfile)`` for every finite piece."""
        return [(i, p.default_grid(n), ricci_profile(p, p.default_grid(n)))
                for i, p in enumerate(self.pieces)]
