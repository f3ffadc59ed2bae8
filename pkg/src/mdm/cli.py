"""Command-line front end.

    mdm curve --family universal --points 101 --out curve.csv
    mdm experiment --theta-frac 1/8 --ensemble universal6 --trials 100000 --out exp.csv
    mdm mc-average --theta 0 --ensemble haar --trials 1000000
    mdm reproduce --out reproduce.csv

Every written CSV gets a ``<out>.manifest.json`` sidecar with the resolved
configuration.  Exit codes: 0 ok, 2 usage error, 3 I/O error, 4 reproduce
comparison failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .bounds import BoundFamily, curve, saturation_residual
from .ensembles import FOUR_STATES, SIX_STATES, Family, average_tradeoff, mc_average
from .optics import ExperimentConfig, PbsModel, run_ensemble
from .protocol import THETA_MAX
from .quantum_core import equatorial_state, haar_sample

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_COMPARE = 0, 2, 3, 4

DEFAULTS = {
    "family": "universal",
    "points": 101,
    "theta": None,
    "theta_frac": None,
    "ensemble": "universal6",
    "rh": 0.0,
    "rv": 1.0,
    "trials": 100_000,
    "seed": 0,
    "workers": 1,
    "states": 20,
    "no_feed_forward": False,
    "out": None,
}


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Fixed 6-significant-digit formatting for CSV cells."""
    if isinstance(x, str):
        return x
    return f"{float(x):.6g}"


def parse_theta(cfg: dict) -> float:
    if cfg.get("theta_frac") is not None:
        try:
            theta = float(Fraction(str(cfg["theta_frac"]))) * math.pi
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad --theta-frac {cfg['theta_frac']!r}: {exc}") from None
    elif cfg.get("theta") is not None:
        theta = float(cfg["theta"])
    else:
        theta = 0.0
    if not (0.0 <= theta <= THETA_MAX + 1e-12):
        raise UsageError(f"theta={theta!r} outside the valid range [0, pi/4]")
    return min(theta, THETA_MAX)


def write_table(path: Optional[str], header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_manifest(path: Optional[str], command: str, cfg: dict) -> None:
    if path is None:
        return
    manifest = {
        "command": command,
        "config": cfg,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def cmd_curve(cfg: dict) -> int:
    if cfg["family"] not in ("universal", "covariant"):
        raise UsageError("--family must be universal or covariant")
    if int(cfg["points"]) < 2:
        raise UsageError("--points must be at least 2")
    fam = BoundFamily(cfg["family"])
    rows = [
        [p.theta, p.g, p.f, saturation_residual(p.theta, fam)]
        for p in curve(fam, int(cfg["points"]))
    ]
    write_table(cfg["out"], ["theta", "g", "f", "residual"], rows)
    write_manifest(cfg["out"], "curve", cfg)
    return EXIT_OK


def _state_set(cfg: dict) -> dict:
    ens = cfg["ensemble"]
    if ens == "universal6":
        return dict(SIX_STATES)
    if ens == "covariant4":
        return dict(FOUR_STATES)
    rng = np.random.default_rng(np.random.SeedSequence(int(cfg["seed"]), spawn_key=(2**31,)))
    n = int(cfg["states"])
    if ens == "haar":
        return {f"haar{i}": haar_sample(rng) for i in range(n)}
    if ens == "equatorial":
        return {f"eq{i}": equatorial_state(rng.uniform(0, 2 * np.pi)) for i in range(n)}
    raise UsageError(f"unknown --ensemble {ens!r}")


def _experiment_config(cfg: dict, theta: float, rh: Optional[float] = None) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            theta=theta,
            pbs=PbsModel(r_h=float(cfg["rh"] if rh is None else rh), r_v=float(cfg["rv"])),
            trials=int(cfg["trials"]),
            seed=int(cfg["seed"]),
            feed_forward_enabled=not cfg["no_feed_forward"],
            workers=int(cfg["workers"]),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_experiment(cfg: dict) -> int:
    theta = parse_theta(cfg)
    cfg = dict(cfg, theta=theta)
    result = run_ensemble(_experiment_config(cfg, theta), _state_set(cfg))
    rows = [
        [s.label, s.f, s.g, s.stderr_f, s.stderr_g, s.discarded_fraction] for s in result.states
    ]
    rows.append(
        ["average", result.f, result.g, result.stderr_f, result.stderr_g, result.discarded_fraction]
    )
    write_table(cfg["out"], ["state", "f", "g", "stderr_f", "stderr_g", "discarded_fraction"], rows)
    write_manifest(cfg["out"], "experiment", cfg)
    return EXIT_OK


def cmd_mc_average(cfg: dict) -> int:
    theta = parse_theta(cfg)
    cfg = dict(cfg, theta=theta)
    try:
        family = Family(cfg["ensemble"])
    except ValueError:
        raise UsageError(f"unknown --ensemble {cfg['ensemble']!r}") from None
    exact = average_tradeoff(theta, family)
    if family.is_discrete:
        pt = exact
    else:
        if int(cfg["trials"]) < 100:
            raise UsageError("--trials must be at least 100 for mc-average")
        rng = np.random.default_rng(int(cfg["seed"]))
        pt = mc_average(theta, family, int(cfg["trials"]), rng, workers=int(cfg["workers"]))
    rows = [[theta, pt.g, pt.f, pt.stderr_g, pt.stderr_f, exact.g, exact.f]]
    write_table(cfg["out"], ["theta", "g", "f", "stderr_g", "stderr_f", "g_exact", "f_exact"], rows)
    write_manifest(cfg["out"], "mc-average", cfg)
    return EXIT_OK


@dataclass(frozen=True)
class HeadlineSetting:
    family: str
    theta: float
    g_theory: float
    f_theory: float
    g_exp: float
    g_exp_err: float
    f_exp: float
    f_exp_err: float


# reported extreme points, theory and measurement
HEADLINE = [
    HeadlineSetting("universal", 0.0, 0.666, 0.666, 0.666, 0.001, 0.654, 0.004),
    HeadlineSetting("universal", math.pi / 4, 0.5, 1.0, 0.507, 0.004, 0.929, 0.002),
    HeadlineSetting("covariant", 0.0, 0.75, 0.75, 0.750, 0.001, 0.735, 0.004),
    HeadlineSetting("covariant", math.pi / 4, 0.5, 1.0, 0.511, 0.006, 0.945, 0.003),
]


def in_bracket(value: float, sigma: float, ideal: float, exp: float, exp_err: float) -> bool:
    """value lies between the ideal value and exp - 3 error bars, with 3 sigma slack."""
    floor = exp - 3 * exp_err
    lo, hi = min(ideal, floor), max(ideal, floor)
    slack = 3 * sigma + 1e-12
    return lo - slack <= value <= hi + slack


def reproduce_rows(cfg: dict) -> tuple[list[list], bool]:
    rows, ok = [], True
    for h in HEADLINE:
        states = SIX_STATES if h.family == "universal" else FOUR_STATES
        family = Family.UNIVERSAL_SIX if h.family == "universal" else Family.COVARIANT_FOUR
        exact = average_tradeoff(h.theta, family)
        for column, rh in (("ideal", 0.0), ("imperfect", float(cfg["rh"]))):
            res = run_ensemble(_experiment_config(cfg, h.theta, rh), states)
            if column == "ideal":
                passed = abs(res.g - exact.g) <= 3 * res.stderr_g + 1e-12 and abs(
                    res.f - exact.f
                ) <= 3 * res.stderr_f + 1e-12
            else:
                passed = in_bracket(res.f, res.stderr_f, exact.f, h.f_exp, h.f_exp_err) and in_bracket(
                    res.g, res.stderr_g, exact.g, h.g_exp, h.g_exp_err
                )
            ok &= passed
            rows.append(
                [
                    h.family,
                    h.theta,
                    column,
                    rh,
                    res.g,
                    res.f,
                    res.stderr_g,
                    res.stderr_f,
                    h.g_theory,
                    h.f_theory,
                    h.g_exp,
                    h.g_exp_err,
                    h.f_exp,
                    h.f_exp_err,
                    "pass" if passed else "FAIL",
                ]
            )
    return rows, ok


REPRODUCE_HEADER = [
    "family", "theta", "column", "rh", "g", "f", "stderr_g", "stderr_f",
    "g_theory", "f_theory", "g_exp", "g_exp_err", "f_exp", "f_exp_err", "check",
]


def cmd_reproduce(cfg: dict) -> int:
    rows, ok = reproduce_rows(cfg)
    write_table(cfg["out"], REPRODUCE_HEADER, rows)
    write_manifest(cfg["out"], "reproduce", cfg)
    return EXIT_OK if ok else EXIT_COMPARE


COMMANDS = {
    "curve": cmd_curve,
    "experiment": cmd_experiment,
    "mc-average": cmd_mc_average,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdm", description="Minimal disturbance measurement simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON file with defaults for any flag")
        p.add_argument("--out", help="output CSV path (stdout if omitted)")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        if name == "curve":
            p.add_argument("--family", choices=["universal", "covariant"])
            p.add_argument("--points", type=int)
            continue
        p.add_argument("--trials", type=int)
        if name in ("experiment", "mc-average"):
            p.add_argument("--theta", type=float, help="measurement strength in radians")
            p.add_argument("--theta-frac", help="measurement strength as a fraction k/n of pi")
            p.add_argument("--ensemble", choices=["universal6", "covariant4", "haar", "equatorial"])
        if name in ("experiment", "reproduce"):
            p.add_argument("--rh", type=float, help="PBS reflectivity for H")
            p.add_argument("--rv", type=float, help="PBS reflectivity for V")
            p.add_argument("--no-feed-forward", action="store_true", default=None)
        if name == "experiment":
            p.add_argument("--states", type=int, help="number of random states for haar/equatorial")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """flags > config file > defaults."""
    cfg = dict(DEFAULTS)
    if args.command == "reproduce":
        cfg.update(trials=1_000_000, rh=0.03)
    if args.config is not None:
        cfg.update(json.loads(args.config.read_text()))
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.error(str(exc))  # exits with 2
    except OSError as exc:
        print(f"mdm: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"mdm: bad config file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
