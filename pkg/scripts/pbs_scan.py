"""Exact ensemble (G, F) at the strongest setting as the PBS H-reflectivity grows.

    python scripts/pbs_scan.py --max-rh 0.1 --steps 11
"""

import argparse

import numpy as np

from mdm.ensembles import FOUR_STATES, SIX_STATES
from mdm.optics import PbsModel, click_table, ideal_ensemble


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-rh", type=float, default=0.1)
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--theta", type=float, default=0.0)
    args = ap.parse_args()

    print("r_h,coincidence_univ,g_univ,f_univ,g_cov,f_cov")
    for rh in np.linspace(0, args.max_rh, args.steps):
        pbs = PbsModel(r_h=rh)
        pc = np.mean([click_table(s, args.theta, pbs).coincidence_probability for s in SIX_STATES.values()])
        gu, fu = ideal_ensemble(args.theta, SIX_STATES, pbs)
        gc, fc = ideal_ensemble(args.theta, FOUR_STATES, pbs)
        print(",".join(f"{x:.6g}" for x in (rh, pc, gu, fu, gc, fc)))


if __name__ == "__main__":
    main()
