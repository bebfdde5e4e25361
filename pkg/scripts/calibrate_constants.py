"""Measure the Case I band and core constants at m=1, R=100.

The frozen values in ``metricsurgery.surgery.sphere`` were produced by this
script; rerun it after changing the smoothing or the core and update them
by hand.  Safety factors: the band constant is padded upward, the core
density downward, so the frozen bounds hold with room at R=100.
"""
import argparse

from metricsurgery.model_metrics import CONFORMALLY_FLAT, SchwarzschildSpec, make_schwarzschild
from metricsurgery.surgery import sphere

BAND_PAD = 1.25
CORE_PAD = 0.5


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--R", type=float, default=100.0)
    args = ap.parse_args()
    end = make_schwarzschild(SchwarzschildSpec(args.mass, form=CONFORMALLY_FLAT))
    _, verdict = sphere.sphere_surgery(sphere.SphereSurgerySpec(end, args.R))
    d = verdict.diagnostics
    c = d["band_z2"] * args.R ** 2
    density = d["core_z2"] / (d["core_z2_bound"] / sphere.CORE_Z2_DENSITY)
    print(f"band  R^2 int|z|^2     = {c:.6g}   -> BAND_Z2_CONST  ~ {BAND_PAD * c:.2g}")
    print(f"core  int|z|^2 / vol   = {density:.6g}   -> CORE_Z2_DENSITY ~ {CORE_PAD * density:.2g}")
    print(f"frozen: BAND_Z2_CONST = {sphere.BAND_Z2_CONST}, CORE_Z2_DENSITY = {sphere.CORE_Z2_DENSITY}")


if __name__ == "__main__":
    main()
