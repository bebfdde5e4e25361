"""Flat torus bundles whose fibers shrink: volume collapse with bounded curvature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..metric_core import Metric1D


@dataclass(frozen=True)
class CollapseBase:
    d1: float = 1.0
    d2: float = 1.0
    a: float = 0.0
    length: float = 1.0          # base interval

    def __post_init__(self):
        if not (self.d1 > 0 and self.d2 > 0 and self.length > 0):
            raise ValueError("collapse base needs positive fiber lengths and interval")
        if not 0.0 <= self.a < 1.0:
            raise ValueError("torus cosine must lie in [0, 1)")


def collapse_member(base: CollapseBase, eps: float) -> Metric1D:
    if not 0.0 < eps <= 1.0:
        raise ValueError("collapse parameter must lie in (0, 1]")
    return Metric1D.doubly_warped(eps * base.d1, eps * base.d2, base.a, (0.0, base.length),
                                  label=f"collapsing torus bundle eps={eps:g}",
                                  meta={"eps": eps})


def collapse_family(base: CollapseBase, eps_values) -> list[Metric1D]:
    """Members with fibers scaled by each ``eps``; flat, with volume ``eps^2`` times the base volume."""
    return [collapse_member(base, float(e)) for e in eps_values]


def expected_volume(base: CollapseBase, eps: float) -> float:
    return eps ** 2 * (2 * np.pi) ** 2 * base.d1 * base.d2 * np.sqrt(1 - base.a ** 2) * base.length
