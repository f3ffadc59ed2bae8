"""Theory frontier plus simulated (G, F) points over a sweep of waveplate settings.

Writes one CSV per family with columns
theta,g_theory,f_theory,g_ideal,f_ideal,g_rh,f_rh,stderr_g_rh,stderr_f_rh
where the *_ideal columns are exact optics predictions with a perfect PBS and
the *_rh columns are Monte Carlo estimates with the imperfect one.

    python scripts/fig3_points.py --rh 0.03 --trials 1000000 --outdir out/
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from mdm.ensembles import FOUR_STATES, SIX_STATES, covariant_average, universal_average
from mdm.optics import ExperimentConfig, PbsModel, ideal_ensemble, run_ensemble


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rh", type=float, default=0.03)
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--steps", type=int, default=9, help="waveplate settings from 0 to 22.5 deg")
    ap.add_argument("--outdir", type=Path, default=Path("."))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    pbs = PbsModel(r_h=args.rh)
    for name, states, theory in (
        ("universal", SIX_STATES, universal_average),
        ("covariant", FOUR_STATES, covariant_average),
    ):
        path = args.outdir / f"fig3_{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["theta", "g_theory", "f_theory", "g_ideal", "f_ideal", "g_rh", "f_rh", "stderr_g_rh", "stderr_f_rh"])
            for theta in np.linspace(0, np.pi / 4, args.steps):
                g_th, f_th = theory(theta)
                g_id, f_id = ideal_ensemble(theta, states)
                res = run_ensemble(ExperimentConfig(theta=theta, pbs=pbs, trials=args.trials, seed=args.seed), states)
                w.writerow([f"{x:.6g}" for x in (theta, g_th, f_th, g_id, f_id, res.g, res.f, res.stderr_g, res.stderr_f)])
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
