"""The minimal-disturbance measurement as an exact qubit channel.

Signal and probe go through a parity check (E0 even, E1 odd), the probe is
read out in the rotated basis

    |G0> = cos(theta)|0> + sin(theta)|1>,   |G1> = sin(theta)|0> - cos(theta)|1>,

and a sigma_z correction is fed forward onto the signal.  theta = 0 is the
strongest measurement (best guess), theta = pi/4 leaves the signal intact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .quantum_core import (
    E0,
    E1,
    TOL,
    DensityMatrix2,
    EmptyBranch,
    PureQubit,
    TwoQubitState,
    ket0,
    ket1,
)

THETA_MAX = np.pi / 4
PLUS = PureQubit(1 / np.sqrt(2), 1 / np.sqrt(2))


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1

    @property
    def projector(self) -> np.ndarray:
        return E0 if self is Parity.EVEN else E1


class Readout(enum.Enum):
    G0 = 0
    G1 = 1


class Regime(enum.Enum):
    """Which parity branches are kept before renormalizing."""

    ABSTRACT = "abstract"  # both parities, feed-forward in each
    OPTICS = "optics"  # even parity only, odd events discarded


def check_theta(theta: float) -> float:
    theta = float(theta)
    if not (-TOL <= theta <= THETA_MAX + TOL):
        raise ValueError(f"measurement strength theta={theta!r} outside [0, pi/4]")
    return min(max(theta, 0.0), THETA_MAX)


def readout_basis(theta: float) -> tuple[np.ndarray, np.ndarray]:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([c, s], dtype=complex), np.array([s, -c], dtype=complex)


def parity_project(
    signal: PureQubit, probe: PureQubit, outcome: Parity
) -> TwoQubitState:
    """Apply E0 or E1 to signal (x) probe; the weight is the outcome probability.

    Raises EmptyBranch when the projection annihilates the state.
    """
    a, b = signal.alpha, signal.beta
    c, d = probe.alpha, probe.beta
    if outcome is Parity.EVEN:
        psi = [a * c, 0j, 0j, b * d]
    else:
        psi = [0j, a * d, b * c, 0j]
    return TwoQubitState.from_unnormalized(psi)


def readout_probe(
    joint: TwoQubitState, theta: float
) -> list[tuple[Readout, float, PureQubit]]:
    """Measure the probe in the rotated basis.

    Returns both outcomes with their probabilities (conditional on ``joint``)
    and the collapsed signal.  A zero-probability outcome carries |0> as a
    placeholder state.
    """
    theta = check_theta(theta)
    (m00, m01), (m10, m11) = joint.as_matrix().tolist()
    c, s = math.cos(theta), math.sin(theta)
    rows = []
    # <G|_probe applied to the joint vector; the basis is real
    for tag, (g0, g1) in ((Readout.G0, (c, s)), (Readout.G1, (s, -c))):
        v0, v1 = m00 * g0 + m01 * g1, m10 * g0 + m11 * g1
        p = abs(v0) ** 2 + abs(v1) ** 2
        if p <= TOL**2:
            rows.append((tag, 0.0, _KET0))
        else:
            n = math.sqrt(p)
            rows.append((tag, p, PureQubit._trusted(v0 / n, v1 / n)))
    total = rows[0][1] + rows[1][1]
    return [(tag, p / total, s) for tag, p, s in rows]


def feed_forward(
    state: PureQubit, parity: Parity, readout: Readout, enabled: bool = True
) -> PureQubit:
    """Conditional sigma_z on the signal.

    The correction fires on a |G1> click for either parity: in both branches
    that is the outcome whose collapsed signal carries the relative minus sign.
    ``parity`` only changes which basis state is guessed, see ``guess_state``.
    """
    if enabled and readout is Readout.G1:
        return PureQubit._trusted(state.alpha, -state.beta)
    return state


_KET0, _KET1 = ket0(), ket1()


_GUESS = {
    (Parity.EVEN, Readout.G0): _KET0,
    (Parity.EVEN, Readout.G1): _KET1,
    (Parity.ODD, Readout.G0): _KET1,
    (Parity.ODD, Readout.G1): _KET0,
}


def guess_state(parity: Parity, readout: Readout) -> PureQubit:
    """|0> after (even, G0) or (odd, G1), |1> otherwise."""
    return _GUESS[parity, readout]


@dataclass(frozen=True)
class Branch:
    parity: Parity
    readout: Readout
    probability: float  # renormalized over the kept branches
    state: PureQubit  # signal after feed-forward
    guess: PureQubit


@dataclass(frozen=True)
class MdmResult:
    rho_f: DensityMatrix2
    rho_g: DensityMatrix2
    branches: list[Branch] = field(default_factory=list)
    kept_weight: float = 1.0  # total probability of kept branches before renormalizing


def mdm_channel(
    signal: PureQubit,
    theta: float,
    regime: Regime = Regime.ABSTRACT,
    feed_forward_enabled: bool = True,
    probe: PureQubit = PLUS,
) -> MdmResult:
    """Enumerate every kept branch and assemble the output and guess states."""
    theta = check_theta(theta)
    parities = [Parity.EVEN] if regime is Regime.OPTICS else [Parity.EVEN, Parity.ODD]
    raw = []
    kept = 0.0
    for parity in parities:
        try:
            joint = parity_project(signal, probe, parity)
        except EmptyBranch:
            continue
        kept += joint.weight
        for readout, p, collapsed in readout_probe(joint, theta):
            out = feed_forward(collapsed, parity, readout, feed_forward_enabled)
            raw.append((parity, readout, joint.weight * p, out))
    if kept <= 0.0:
        raise EmptyBranch("no kept branch has nonzero weight")
    branches = [
        Branch(par, rd, w / kept, out, guess_state(par, rd)) for par, rd, w, out in raw
    ]
    weights = [b.probability for b in branches]
    rho_f = DensityMatrix2.mixture(weights, [b.state for b in branches])
    p_guess0 = sum(b.probability for b in branches if b.guess is _KET0)
    rho_g = DensityMatrix2([[p_guess0, 0.0], [0.0, 1.0 - p_guess0]])
    return MdmResult(rho_f, rho_g, branches, kept)


def fidelity_phi(signal: PureQubit, theta: float) -> float:
    """Closed form 1 - 2|a|^2|b|^2 (1 - sin 2theta)."""
    theta = check_theta(theta)
    return 1.0 - 2.0 * signal.p0 * signal.p1 * (1.0 - math.sin(2 * theta))


def guess_phi(signal: PureQubit, theta: float) -> float:
    """Closed form 1/2 + cos(2theta)/2 (1 - 4|a|^2|b|^2)."""
    theta = check_theta(theta)
    return 0.5 + 0.5 * math.cos(2 * theta) * (1.0 - 4.0 * signal.p0 * signal.p1)


def fidelity_from_populations(p0, theta):
    """Vectorized fidelity_phi over an array of |alpha|^2 values."""
    ab = np.asarray(p0) * (1.0 - np.asarray(p0))
    return 1.0 - 2.0 * ab * (1.0 - np.sin(2 * theta))


def guess_from_populations(p0, theta):
    ab = np.asarray(p0) * (1.0 - np.asarray(p0))
    return 0.5 + 0.5 * np.cos(2 * theta) * (1.0 - 4.0 * ab)
