"""Input-state families and ensemble averages of the guess and the fidelity."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .protocol import (
    check_theta,
    fidelity_from_populations,
    fidelity_phi,
    guess_from_populations,
    guess_phi,
)
from .quantum_core import PureQubit, haar_amplitudes

S2 = 1 / np.sqrt(2)

SIX_STATES: dict[str, PureQubit] = {
    "H": PureQubit(1, 0),
    "V": PureQubit(0, 1),
    "L+": PureQubit(S2, S2),
    "L-": PureQubit(S2, -S2),
    "C+": PureQubit(S2, 1j * S2),
    "C-": PureQubit(S2, -1j * S2),
}
FOUR_STATES: dict[str, PureQubit] = {k: SIX_STATES[k] for k in ("H", "V", "L+", "L-")}


class Family(enum.Enum):
    UNIVERSAL_HAAR = "haar"
    UNIVERSAL_SIX = "universal6"
    COVARIANT_EQUATORIAL = "equatorial"
    COVARIANT_FOUR = "covariant4"

    @property
    def is_discrete(self) -> bool:
        return self in (Family.UNIVERSAL_SIX, Family.COVARIANT_FOUR)

    @property
    def is_universal(self) -> bool:
        return self in (Family.UNIVERSAL_HAAR, Family.UNIVERSAL_SIX)


def discrete_states(family: Family) -> dict[str, PureQubit]:
    if family is Family.UNIVERSAL_SIX:
        return dict(SIX_STATES)
    if family is Family.COVARIANT_FOUR:
        return dict(FOUR_STATES)
    raise ValueError(f"{family.value} is not a discrete state set")


class Provenance(enum.Enum):
    ANALYTIC = "analytic"
    CHANNEL_AVERAGE = "channel-average"
    OPTICS_MC = "optics-mc"


@dataclass(frozen=True)
class TradeoffPoint:
    g: float
    f: float
    theta: float
    family: Family
    provenance: Provenance
    stderr_g: float = 0.0
    stderr_f: float = 0.0

    def __post_init__(self):
        for name in ("g", "f"):
            v = getattr(self, name)
            if not (-1e-12 <= v <= 1 + 1e-12):
                raise ValueError(f"{name}={v!r} outside [0, 1]")


def universal_average(theta: float) -> tuple[float, float]:
    """Haar-averaged (G, F)."""
    return (3 + np.cos(2 * theta)) / 6, (2 + np.sin(2 * theta)) / 3


def covariant_average(theta: float) -> tuple[float, float]:
    """Equatorial-averaged (G, F)."""
    return (2 + np.cos(2 * theta)) / 4, (3 + np.sin(2 * theta)) / 4


def average_tradeoff(theta: float, family: Family) -> TradeoffPoint:
    """Exact ensemble average: closed forms for continuous families, sums for discrete ones."""
    theta = check_theta(theta)
    if family.is_discrete:
        states = discrete_states(family).values()
        g = float(np.mean([guess_phi(s, theta) for s in states]))
        f = float(np.mean([fidelity_phi(s, theta) for s in states]))
        return TradeoffPoint(g, f, theta, family, Provenance.CHANNEL_AVERAGE)
    avg = universal_average if family.is_universal else covariant_average
    g, f = avg(theta)
    return TradeoffPoint(float(g), float(f), theta, family, Provenance.ANALYTIC)


def sample_populations(family: Family, n: int, rng: np.random.Generator) -> np.ndarray:
    """|alpha|^2 of ``n`` random members of a continuous family."""
    if family is Family.UNIVERSAL_HAAR:
        alpha, _ = haar_amplitudes(rng, n)
        return np.abs(alpha) ** 2
    if family is Family.COVARIANT_EQUATORIAL:
        return np.cos(rng.uniform(0.0, 2 * np.pi, n)) ** 2
    raise ValueError(f"Monte Carlo needs a continuous family, got {family.value}")


def mc_average(
    theta: float,
    family: Family,
    n: int,
    rng: Optional[np.random.Generator] = None,
    workers: int = 1,
) -> TradeoffPoint:
    """Sample means of G and F over ``n`` random inputs, with standard errors.

    Draws are split into ``workers`` chunks, each on its own child stream, and
    the partial sums are merged; the result depends on (seed, workers) only.
    """
    if n < 100:
        raise ValueError("mc_average needs n >= 100")
    theta = check_theta(theta)
    rng = np.random.default_rng() if rng is None else rng
    sizes = [len(c) for c in np.array_split(np.arange(n), workers)]
    sums = np.zeros(4)  # sum g, sum g^2, sum f, sum f^2
    for child, size in zip(rng.spawn(workers), sizes):
        p0 = sample_populations(family, size, child)
        g = guess_from_populations(p0, theta)
        f = fidelity_from_populations(p0, theta)
        sums += [g.sum(), (g * g).sum(), f.sum(), (f * f).sum()]
    mg, mf = sums[0] / n, sums[2] / n
    var_g = max(sums[1] / n - mg * mg, 0.0) * n / (n - 1)
    var_f = max(sums[3] / n - mf * mf, 0.0) * n / (n - 1)
    return TradeoffPoint(
        float(mg),
        float(mf),
        theta,
        family,
        Provenance.CHANNEL_AVERAGE,
        stderr_g=float(np.sqrt(var_g / n)),
        stderr_f=float(np.sqrt(var_f / n)),
    )
