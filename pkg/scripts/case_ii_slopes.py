"""Log-log slopes of the Case II shape mismatch and of the annulus |z|^2 integral."""
import argparse

import numpy as np

from metricsurgery.model_metrics import CONFORMALLY_FLAT, SchwarzschildSpec, annulus_z2, make_schwarzschild
from metricsurgery.surgery import sphere


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=1.75)
    ap.add_argument("--R-min", type=float, default=100.0)
    ap.add_argument("--R-max", type=float, default=1000.0)
    ap.add_argument("--n", type=int, default=8)
    args = ap.parse_args()

    end = make_schwarzschild(SchwarzschildSpec(0.5, form=CONFORMALLY_FLAT))
    Rs = np.geomspace(args.R_min, args.R_max, args.n)
    diffs = np.array([sphere.cap_fill(end, R, "mismatch", args.lam)[2] for R in Rs])
    z2 = np.array([annulus_z2(end, R) for R in Rs])
    for R, d, z in zip(Rs, diffs, z2):
        print(f"R={R:10.3f}  A_end-A_cap={d:.6e}  z2(R,2R)={z:.6e}")
    print(f"mismatch slope {np.polyfit(np.log(Rs), np.log(diffs), 1)[0]:.4f}  (expected {-1 - args.lam:.4f})")
    print(f"annulus slope  {np.polyfit(np.log(Rs), np.log(z2), 1)[0]:.4f}  (expected -3)")


if __name__ == "__main__":
    main()
