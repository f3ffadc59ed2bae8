"""Two-photon linear-optics model of the measurement apparatus.

Four modes, ordered (spatial 0, H), (spatial 0, V), (spatial 1, H),
(spatial 1, V).  Before the central PBS spatial 0/1 are the signal and probe
inputs S/P; after it they are the output channel F and the guess arm G.

Chain for one shot: PBS_M -> coincidence post-selection (one photon per
output) -> half-waveplate at theta/2 plus PBS_G on the G photon (detectors D_H,
D_V) -> Pockels sigma_z on the F photon when D_V fires -> analysis of the F
photon in {|phi>, |phi_perp>}.

Phase conventions: a beam-splitter reflection carries a factor i.  The V light
routed into the G arm gets an extra fixed pi phase (a compensation plate that
in the lab is absorbed into the WP(G) alignment), so that the even-parity
coincidence state is a|HH> + b|VV> and not a|HH> - b|VV>.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .protocol import check_theta
from .quantum_core import TOL, EmptyBranch, PureQubit, TwoQubitState

H, V = 0, 1
N_MODES = 4


def mode(spatial: int, pol: int) -> int:
    return 2 * spatial + pol


Occupation = tuple[int, int, int, int]


@dataclass(frozen=True)
class PhotonConfig:
    """Fock-space amplitudes {occupation tuple: amplitude}."""

    amplitudes: dict

    def __post_init__(self):
        for occ in self.amplitudes:
            if len(occ) != N_MODES or any(n < 0 for n in occ):
                raise ValueError(f"bad occupation {occ!r}")

    @property
    def norm(self) -> float:
        return float(math.sqrt(sum(abs(a) ** 2 for a in self.amplitudes.values())))

    @property
    def photon_numbers(self) -> set[int]:
        return {sum(occ) for occ in self.amplitudes}

    def amplitude(self, occ: Iterable[int]) -> complex:
        return self.amplitudes.get(tuple(occ), 0.0)

    def probability(self, occ: Iterable[int]) -> float:
        return abs(self.amplitude(occ)) ** 2


@dataclass(frozen=True)
class PbsModel:
    """Polarizing beam splitter with intensity reflectivities per polarization.

    The ideal device transmits H (r_h = 0) and reflects V (r_v = 1).
    """

    r_h: float = 0.0
    r_v: float = 1.0
    compensate: bool = True

    def __post_init__(self):
        for name in ("r_h", "r_v"):
            r = getattr(self, name)
            if not (0.0 <= r <= 1.0):
                raise ValueError(f"{name}={r!r} outside [0, 1]")

    def spatial_matrix(self, pol: int) -> np.ndarray:
        """2x2 transfer [out, in] for one polarization; S->F and P->G are transmission."""
        r = self.r_h if pol == H else self.r_v
        t, rr = math.sqrt(1.0 - r), 1j * math.sqrt(r)
        m = np.array([[t, rr], [rr, t]], dtype=complex)
        if pol == V and self.compensate:
            m[1] *= -1
        return m

    def mode_matrix(self) -> np.ndarray:
        u = np.zeros((N_MODES, N_MODES), dtype=complex)
        for pol in (H, V):
            m = self.spatial_matrix(pol)
            for out_s, in_s in itertools.product(range(2), repeat=2):
                u[mode(out_s, pol), mode(in_s, pol)] = m[out_s, in_s]
        return u


IDEAL_PBS = PbsModel()


def _creation_list(occ: Occupation) -> list[int]:
    return [m for m, n in enumerate(occ) for _ in range(n)]


def _occupation(modes: Iterable[int]) -> Occupation:
    occ = [0] * N_MODES
    for m in modes:
        occ[m] += 1
    return tuple(occ)


def _fact_norm(occ: Occupation) -> float:
    return math.sqrt(math.prod(math.factorial(n) for n in occ))


def apply_linear_optics(field: PhotonConfig, u: np.ndarray) -> PhotonConfig:
    """Transform creation operators a_k^dag -> sum_j u[j, k] a_j^dag and re-expand.

    |n> = prod_k (a_k^dag)^n_k / sqrt(n_k!) |vac>, so each amplitude is
    turned into a polynomial coefficient, pushed through the product, and
    turned back with the output factorials.
    """
    out: dict = defaultdict(complex)
    for occ, amp in field.amplitudes.items():
        coeff = amp / _fact_norm(occ)
        ins = _creation_list(occ)
        for outs in itertools.product(range(N_MODES), repeat=len(ins)):
            w = coeff
            for j, k in zip(outs, ins):
                w *= u[j, k]
                if w == 0:
                    break
            if w != 0:
                out[_occupation(outs)] += w
    amps = {}
    for occ, c in out.items():
        a = c * _fact_norm(occ)
        if abs(a) > 1e-15:
            amps[occ] = a
    return PhotonConfig(amps)


def pbs_transform(field: PhotonConfig, pbs: PbsModel = IDEAL_PBS) -> PhotonConfig:
    return apply_linear_optics(field, pbs.mode_matrix())


def build_input(signal: PureQubit) -> PhotonConfig:
    """Signal polarization on input S, probe (|H>+|V>)/sqrt2 on input P."""
    s = 1 / math.sqrt(2)
    amps = {}
    for sp, a in ((H, signal.alpha), (V, signal.beta)):
        for pp in (H, V):
            if a != 0:
                amps[_occupation([mode(0, sp), mode(1, pp)])] = a * s
    return PhotonConfig(amps)


def postselect_coincidence(field: PhotonConfig) -> tuple[float, TwoQubitState]:
    """Keep one photon in each output arm.

    Returns the kept probability and the normalized F (x) G polarization state.
    """
    vec = np.zeros(4, dtype=complex)
    for pf, pg in itertools.product((H, V), repeat=2):
        vec[2 * pf + pg] = field.amplitude(_occupation([mode(0, pf), mode(1, pg)]))
    p = float(np.vdot(vec, vec).real)
    if p <= TOL**2:
        raise EmptyBranch("no coincidence component")
    return p, TwoQubitState(vec / math.sqrt(p), p)


def half_waveplate(angle: float) -> np.ndarray:
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]], dtype=complex)


def analyzer_unitary(phi: PureQubit) -> np.ndarray:
    """WP_phi^-1: sends |phi> to |H> and |phi_perp> to |V>."""
    perp = phi.orthogonal()
    return np.array([phi.vector.conj(), perp.vector.conj()])


POCKELS_HALF_WAVE = np.diag([1.0, -1.0]).astype(complex)


class Detector(enum.Enum):
    D_H = "H"
    D_V = "V"


class Analyzer(enum.Enum):
    PHI = "phi"
    PHI_PERP = "phiperp"


# categorical order used for counting
OUTCOMES = [
    (Detector.D_H, Analyzer.PHI),
    (Detector.D_V, Analyzer.PHI),
    (Detector.D_H, Analyzer.PHI_PERP),
    (Detector.D_V, Analyzer.PHI_PERP),
]


@dataclass(frozen=True)
class ClickTable:
    """Exact detection statistics for one (signal, theta, PBS) setting."""

    coincidence_probability: float
    # P(detector, analyzer | coincidence), keyed like OUTCOMES
    conditional: dict
    # P(detector | coincidence) and the F photon after the Pockels cell
    readout_probability: dict
    output_state: dict

    @property
    def discard_probability(self) -> float:
        return 1.0 - self.coincidence_probability

    def categorical(self) -> np.ndarray:
        """Unconditional probabilities in OUTCOMES order, then 'discarded'."""
        pc = self.coincidence_probability
        p = [pc * self.conditional[o] for o in OUTCOMES] + [1.0 - pc]
        p = np.clip(np.array(p), 0.0, None)
        return p / p.sum()


def click_table(
    signal: PureQubit,
    theta: float,
    pbs: PbsModel = IDEAL_PBS,
    feed_forward_enabled: bool = True,
) -> ClickTable:
    theta = check_theta(theta)
    field = pbs_transform(build_input(signal), pbs)
    pc, joint = postselect_coincidence(field)
    m = joint.as_matrix()  # [F pol, G pol]
    wp = half_waveplate(theta / 2)
    analyzer = analyzer_unitary(signal)
    cond, readout_p, out_states = {}, {}, {}
    for det, row in ((Detector.D_H, 0), (Detector.D_V, 1)):
        # amplitude for the G photon to exit PBS_G on port `row` after WP(G)
        f_vec = m @ wp[row]
        p = float(np.vdot(f_vec, f_vec).real)
        readout_p[det] = p
        if p <= TOL**2:
            out_states[det] = None
            for an in Analyzer:
                cond[(det, an)] = 0.0
            continue
        if det is Detector.D_V and feed_forward_enabled:
            f_vec = POCKELS_HALF_WAVE @ f_vec
        out_states[det] = PureQubit.from_vector(f_vec / math.sqrt(p))
        a = analyzer @ f_vec
        cond[(det, Analyzer.PHI)] = abs(a[0]) ** 2
        cond[(det, Analyzer.PHI_PERP)] = abs(a[1]) ** 2
    return ClickTable(pc, cond, readout_p, out_states)


@dataclass(frozen=True)
class ExperimentConfig:
    theta: float
    pbs: PbsModel = IDEAL_PBS
    trials: int = 100_000
    seed: int = 0
    feed_forward_enabled: bool = True
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "theta", check_theta(self.theta))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def waveplate_angle(self) -> float:
        """Angular position of WP(G)."""
        return self.theta / 2


@dataclass(frozen=True)
class Shot:
    discarded: bool
    readout: Optional[Detector] = None
    analyzer: Optional[Analyzer] = None


def run_shot(
    config: ExperimentConfig,
    signal: PureQubit,
    rng: np.random.Generator,
    table: Optional[ClickTable] = None,
) -> Shot:
    """One trial of the full chain, drawn from the exact outcome distribution."""
    if table is None:
        table = click_table(signal, config.theta, config.pbs, config.feed_forward_enabled)
    k = rng.choice(len(OUTCOMES) + 1, p=table.categorical())
    if k == len(OUTCOMES):
        return Shot(True)
    det, an = OUTCOMES[k]
    return Shot(False, det, an)


@dataclass(frozen=True)
class CoincidenceCounts:
    n_h_phi: int
    n_v_phi: int
    n_h_phiperp: int
    n_v_phiperp: int
    n_discarded: int
    total_trials: int

    def __post_init__(self):
        vals = [self.n_h_phi, self.n_v_phi, self.n_h_phiperp, self.n_v_phiperp, self.n_discarded]
        if any(v < 0 for v in vals):
            raise ValueError("counts must be nonnegative")
        if self.total_trials < 1 or sum(vals) != self.total_trials:
            raise ValueError("coincidences plus discarded must equal total_trials")

    @classmethod
    def from_coincidences(cls, n_h_phi, n_v_phi, n_h_phiperp, n_v_phiperp, n_discarded=0):
        total = n_h_phi + n_v_phi + n_h_phiperp + n_v_phiperp + n_discarded
        return cls(n_h_phi, n_v_phi, n_h_phiperp, n_v_phiperp, n_discarded, total)

    @property
    def coincidences(self) -> int:
        return self.n_h_phi + self.n_v_phi + self.n_h_phiperp + self.n_v_phiperp

    def __add__(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        return CoincidenceCounts(
            *(a + b for a, b in zip(self.as_tuple(), other.as_tuple()))
        )

    def as_tuple(self) -> tuple[int, ...]:
        return (
            self.n_h_phi,
            self.n_v_phi,
            self.n_h_phiperp,
            self.n_v_phiperp,
            self.n_discarded,
            self.total_trials,
        )


def worker_streams(seed: int, workers: int, stream_key: int = 0) -> list[np.random.Generator]:
    root = np.random.SeedSequence(seed, spawn_key=(stream_key,))
    return [np.random.default_rng(s) for s in root.spawn(workers)]


def simulate_counts(
    config: ExperimentConfig, signal: PureQubit, stream_key: int = 0
) -> CoincidenceCounts:
    """Aggregate ``config.trials`` shots.

    Trials are split across ``config.workers`` streams derived from
    (seed, stream_key, worker index); each chunk is one multinomial draw over
    the same categorical distribution ``run_shot`` samples from.
    """
    table = click_table(signal, config.theta, config.pbs, config.feed_forward_enabled)
    probs = table.categorical()
    chunks = [len(c) for c in np.array_split(np.arange(config.trials), config.workers)]
    total = np.zeros(len(probs), dtype=np.int64)
    for rng, size in zip(worker_streams(config.seed, config.workers, stream_key), chunks):
        if size:
            total += rng.multinomial(size, probs)
    return CoincidenceCounts(*(int(x) for x in total), config.trials)


class UndefinedEstimate(ValueError):
    pass


def _require_coincidences(counts: CoincidenceCounts) -> int:
    n = counts.coincidences
    if n == 0:
        raise UndefinedEstimate("no coincidences recorded")
    return n


def estimate_f(counts: CoincidenceCounts) -> float:
    """F = p_Hphi + p_Vphi."""
    n = _require_coincidences(counts)
    return (counts.n_h_phi + counts.n_v_phi) / n


def estimate_g(counts: CoincidenceCounts, signal: PureQubit) -> float:
    """G = P_H |<phi|H>|^2 + P_V |<phi|V>|^2 with P_i = p_iphi + p_iphiperp."""
    n = _require_coincidences(counts)
    p_h = (counts.n_h_phi + counts.n_h_phiperp) / n
    p_v = (counts.n_v_phi + counts.n_v_phiperp) / n
    return p_h * signal.p0 + p_v * signal.p1


def stderr_f(counts: CoincidenceCounts) -> float:
    n = _require_coincidences(counts)
    f = estimate_f(counts)
    return math.sqrt(max(f * (1 - f), 0.0) / n)


def stderr_g(counts: CoincidenceCounts, signal: PureQubit) -> float:
    n = _require_coincidences(counts)
    p_h = (counts.n_h_phi + counts.n_h_phiperp) / n
    return abs(signal.p0 - signal.p1) * math.sqrt(max(p_h * (1 - p_h), 0.0) / n)


@dataclass(frozen=True)
class StateResult:
    label: str
    signal: PureQubit
    counts: CoincidenceCounts
    f: float
    g: float
    stderr_f: float
    stderr_g: float

    @property
    def discarded_fraction(self) -> float:
        return self.counts.n_discarded / self.counts.total_trials


@dataclass(frozen=True)
class EnsembleResult:
    config: ExperimentConfig
    states: list[StateResult] = field(default_factory=list)

    @property
    def f(self) -> float:
        return float(np.mean([s.f for s in self.states]))

    @property
    def g(self) -> float:
        return float(np.mean([s.g for s in self.states]))

    @property
    def stderr_f(self) -> float:
        return float(math.sqrt(sum(s.stderr_f**2 for s in self.states)) / len(self.states))

    @property
    def stderr_g(self) -> float:
        return float(math.sqrt(sum(s.stderr_g**2 for s in self.states)) / len(self.states))

    @property
    def discarded_fraction(self) -> float:
        return float(np.mean([s.discarded_fraction for s in self.states]))


def run_ensemble(config: ExperimentConfig, states: dict[str, PureQubit]) -> EnsembleResult:
    """Simulate every labelled state on its own stream and average the estimates."""
    results = []
    for key, (label, signal) in enumerate(states.items()):
        counts = simulate_counts(config, signal, stream_key=key)
        results.append(
            StateResult(
                label,
                signal,
                counts,
                estimate_f(counts),
                estimate_g(counts, signal),
                stderr_f(counts),
                stderr_g(counts, signal),
            )
        )
    return EnsembleResult(config, results)


def ideal_ensemble(theta: float, states: dict[str, PureQubit], pbs: PbsModel = IDEAL_PBS,
                   feed_forward_enabled: bool = True) -> tuple[float, float]:
    """Exact (G, F) averaged over ``states``, no sampling."""
    gs, fs = [], []
    for signal in states.values():
        t = click_table(signal, theta, pbs, feed_forward_enabled)
        fs.append(t.conditional[OUTCOMES[0]] + t.conditional[OUTCOMES[1]])
        p_h = t.readout_probability[Detector.D_H]
        gs.append(p_h * signal.p0 + (1 - p_h) * signal.p1)
    return float(np.mean(gs)), float(np.mean(fs))
