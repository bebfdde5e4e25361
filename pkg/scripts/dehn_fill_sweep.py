"""Sweep the cusp cut-off and report the Dehn filling volume ratio and curvature floor.

The ratio should not move with t0 or the torus shape; the printed spread is the check.
"""
import argparse

import numpy as np

from metricsurgery.metric_core import scalar_curvature
from metricsurgery.model_metrics import CuspSpec
from metricsurgery.surgery import dehn


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t0", type=float, nargs="+", default=[3.0, 5.0, 8.0])
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--d1", type=float, default=1.0)
    ap.add_argument("--d2", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=2048)
    args = ap.parse_args()

    ratios = []
    print(f"{'t0':>6} {'cone angle':>12} {'vol ratio':>14} {'min s':>10}")
    for t0 in args.t0:
        g = dehn.dehn_fill(dehn.DehnFillSpec(CuspSpec(args.d1, args.d2, args.a), t0=t0))
        piece = g.pieces[0]
        s = scalar_curvature(piece, piece.default_grid(args.grid))
        ratio = dehn.solid_torus_volume(g) / g.meta["cusp_volume"]
        ratios.append(ratio)
        print(f"{t0:6.2f} {g.meta['cone_angle']:12.4e} {ratio:14.10f} {s.min():10.6f}")
    print(f"spread {np.ptp(ratios):.3e}")


if __name__ == "__main__":
    main()
