"""Optimal fidelity-versus-guess frontiers and their saturation by the protocol."""

from __future__ import annotations

import enum

import numpy as np

from .ensembles import Family, Provenance, TradeoffPoint, covariant_average, universal_average
from .protocol import THETA_MAX, check_theta

RADICAND_CLAMP = 1e-12


class BoundFamily(enum.Enum):
    UNIVERSAL = "universal"
    COVARIANT = "covariant"


# frontier f = offset + scale * sqrt(1 - (k*g - k/2)**2) on [1/2, g_hi]
# entries: (offset, scale, k, g_hi)
_PARAMS = {
    BoundFamily.UNIVERSAL: (2 / 3, 1 / 3, 6.0, 2 / 3),
    BoundFamily.COVARIANT: (3 / 4, 1 / 4, 4.0, 3 / 4),
}


def g_domain(family: BoundFamily) -> tuple[float, float]:
    return 0.5, _PARAMS[family][3]


def bound_f(g: float, family: BoundFamily) -> float:
    """Largest output fidelity compatible with guess ``g``."""
    offset, scale, k, g_hi = _PARAMS[family]
    if not (0.5 - 1e-12 <= g <= g_hi + 1e-12):
        raise ValueError(
            f"g={g!r} outside the {family.value} frontier domain [0.5, {g_hi:.6g}]"
        )
    rad = 1.0 - (k * g - k / 2) ** 2
    if rad < -RADICAND_CLAMP:
        raise ValueError(f"negative radicand {rad!r} at g={g!r}")
    return offset + scale * np.sqrt(max(rad, 0.0))


def _analytic(theta: float, family: BoundFamily) -> tuple[float, float]:
    if family is BoundFamily.UNIVERSAL:
        return universal_average(theta)
    return covariant_average(theta)


def saturation_residual(theta: float, family: BoundFamily) -> float:
    """bound_f(G(theta)) - F(theta) for the analytic ensemble averages."""
    theta = check_theta(theta)
    g, f = _analytic(theta, family)
    return bound_f(g, family) - f


def curve(family: BoundFamily, n_points: int) -> list[TradeoffPoint]:
    if n_points < 2:
        raise ValueError("a curve needs at least 2 points")
    ens = Family.UNIVERSAL_HAAR if family is BoundFamily.UNIVERSAL else Family.COVARIANT_EQUATORIAL
    out = []
    for theta in np.linspace(0.0, THETA_MAX, n_points):
        g, f = _analytic(theta, family)
        out.append(TradeoffPoint(float(g), float(f), float(theta), ens, Provenance.ANALYTIC))
    return out
