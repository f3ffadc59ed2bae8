"""One- and two-qubit state algebra.

Basis convention, used by every module: index 0 is |0> = |H>, index 1 is
|1> = |V>.  Two-qubit vectors are ordered |00>, |01>, |10>, |11> with the
signal qubit first and the probe second.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

TOL = 1e-12
# inputs closer than this to unit norm are renormalized, worse ones rejected
RENORM_TOL = 1e-9


class EmptyBranch(Exception):
    """Raised when a projection or post-selection leaves zero weight."""


def _normalized(vec, what: str) -> np.ndarray:
    vals = [complex(x) for x in np.ravel(vec)]
    norm2 = sum(abs(x) ** 2 for x in vals)
    if not math.isfinite(norm2):
        raise ValueError(f"{what}: non-finite amplitude")
    if abs(norm2 - 1.0) > RENORM_TOL:
        raise ValueError(f"{what}: squared norm {norm2!r} is not 1")
    n = math.sqrt(norm2)
    return np.array([x / n for x in vals], dtype=complex)


@dataclass(frozen=True)
class PureQubit:
    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not (cmath.isfinite(a) and cmath.isfinite(b)):
            raise ValueError("PureQubit: non-finite amplitude")
        norm2 = abs(a) ** 2 + abs(b) ** 2
        if abs(norm2 - 1.0) > RENORM_TOL:
            raise ValueError(f"PureQubit: squared norm {norm2!r} is not 1")
        norm = math.sqrt(norm2)
        object.__setattr__(self, "alpha", a / norm)
        object.__setattr__(self, "beta", b / norm)

    @classmethod
    def from_vector(cls, vec) -> "PureQubit":
        a, b = vec
        return cls(a, b)

    @classmethod
    def _trusted(cls, alpha: complex, beta: complex) -> "PureQubit":
        # caller guarantees unit norm; skips validation on hot paths
        q = object.__new__(cls)
        object.__setattr__(q, "alpha", alpha)
        object.__setattr__(q, "beta", beta)
        return q

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @property
    def p0(self) -> float:
        """Population |alpha|^2."""
        return abs(self.alpha) ** 2

    @property
    def p1(self) -> float:
        return abs(self.beta) ** 2

    def projector(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        ac, bc = a.conjugate(), b.conjugate()
        return np.array([[a * ac, a * bc], [b * ac, b * bc]])

    def density(self) -> "DensityMatrix2":
        return DensityMatrix2(self.projector())

    def orthogonal(self) -> "PureQubit":
        """The state orthogonal to this one (fixed phase convention)."""
        return PureQubit(-self.beta.conjugate(), self.alpha.conjugate())


@dataclass(frozen=True)
class DensityMatrix2:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"DensityMatrix2 needs shape (2, 2), got {m.shape}")
        (a, b), (c, d) = m.tolist()
        if not math.isfinite(abs(a) + abs(b) + abs(c) + abs(d)):
            raise ValueError("DensityMatrix2: non-finite entry")
        if max(abs(a.imag), abs(d.imag), abs(b - c.conjugate())) > RENORM_TOL:
            raise ValueError("DensityMatrix2: not Hermitian")
        tr = a.real + d.real
        if abs(tr - 1.0) > RENORM_TOL:
            raise ValueError(f"DensityMatrix2: trace {tr!r} is not 1")
        off = 0.5 * (b + c.conjugate()) / tr
        p0, p1 = a.real / tr, d.real / tr
        # smallest eigenvalue of a 2x2 Hermitian matrix
        lam_min = 0.5 - math.sqrt(((p0 - p1) / 2) ** 2 + abs(off) ** 2)
        if lam_min < -TOL:
            raise ValueError("DensityMatrix2: not positive semidefinite")
        m = np.array([[p0, off], [off.conjugate(), p1]], dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def mixture(cls, weights, states) -> "DensityMatrix2":
        """Probability-weighted mixture of pure states."""
        p0 = p1 = 0.0
        off = 0j
        for w, s in zip(weights, states):
            a, b = s.alpha, s.beta
            p0 += w * abs(a) ** 2
            p1 += w * abs(b) ** 2
            off += w * a * b.conjugate()
        return cls([[p0, off], [off.conjugate(), p1]])

    def is_diagonal(self, tol: float = TOL) -> bool:
        return abs(self.matrix[0, 1]) <= tol


@dataclass(frozen=True)
class TwoQubitState:
    """Normalized signal (x) probe vector together with its branch weight."""

    vector: np.ndarray
    weight: float = 1.0

    def __post_init__(self):
        v = _normalized(self.vector, "TwoQubitState")
        if v.shape != (4,):
            raise ValueError(f"TwoQubitState needs 4 amplitudes, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        if not (-TOL <= self.weight <= 1.0 + TOL):
            raise ValueError(f"TwoQubitState weight {self.weight!r} outside [0, 1]")
        object.__setattr__(self, "weight", float(min(max(self.weight, 0.0), 1.0)))

    @classmethod
    def _trusted(cls, vector: np.ndarray, weight: float) -> "TwoQubitState":
        st = object.__new__(cls)
        vector.setflags(write=False)
        object.__setattr__(st, "vector", vector)
        object.__setattr__(st, "weight", weight)
        return st

    @classmethod
    def from_unnormalized(cls, vec, weight_scale: float = 1.0) -> "TwoQubitState":
        """Normalize ``vec``; its squared norm times ``weight_scale`` becomes the weight."""
        if isinstance(vec, np.ndarray):
            vec = vec.ravel().tolist()
        vals = [complex(x) for x in vec]
        norm2 = sum([abs(x) ** 2 for x in vals])
        if norm2 <= TOL**2:
            raise EmptyBranch("zero-weight two-qubit branch")
        n = math.sqrt(norm2)
        weight = norm2 * weight_scale
        if not (-TOL <= weight <= 1.0 + TOL):
            raise ValueError(f"TwoQubitState weight {weight!r} outside [0, 1]")
        return cls._trusted(
            np.array([x / n for x in vals], dtype=complex), min(max(weight, 0.0), 1.0)
        )

    @classmethod
    def product(cls, signal: PureQubit, probe: PureQubit) -> "TwoQubitState":
        return cls(np.kron(signal.vector, probe.vector))

    def as_matrix(self) -> np.ndarray:
        """Amplitudes as a 2x2 array indexed [signal, probe]."""
        return self.vector.reshape(2, 2)


SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
IDENTITY2 = np.eye(2, dtype=complex)
# parity check projectors on signal (x) probe
E0 = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)
E1 = np.eye(4, dtype=complex) - E0


def ket0() -> PureQubit:
    return PureQubit(1, 0)


def ket1() -> PureQubit:
    return PureQubit(0, 1)


def fidelity(phi: PureQubit, rho: DensityMatrix2) -> float:
    """Overlap <phi|rho|phi> of a pure state with a density matrix."""
    a, b = phi.alpha, phi.beta
    m = rho.matrix
    val = (
        a.conjugate() * (m[0, 0] * a + m[0, 1] * b)
        + b.conjugate() * (m[1, 0] * a + m[1, 1] * b)
    )
    assert abs(val.imag) <= 1e-10, val
    return float(min(max(val.real, 0.0), 1.0))


def partial_trace_probe(state: TwoQubitState) -> tuple[DensityMatrix2, float]:
    """Reduced signal density matrix and the branch weight, reported separately."""
    if state.weight <= 0.0:
        raise EmptyBranch("cannot reduce a zero-weight branch")
    m = state.as_matrix()
    # rho_S[i, j] = sum_k psi[i, k] conj(psi[j, k])
    return DensityMatrix2(m @ m.conj().T), state.weight


def equatorial_state(gamma: float) -> PureQubit:
    """Real-amplitude qubit cos(gamma)|0> + sin(gamma)|1>."""
    if not np.isfinite(gamma):
        raise ValueError("gamma must be finite")
    return PureQubit(np.cos(gamma), np.sin(gamma))


def haar_amplitudes(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude arrays (alpha, beta) of ``n`` Haar-random qubits.

    |alpha|^2 is uniform on [0, 1] and the relative phase uniform on [0, 2pi),
    which is exactly the unitarily invariant measure for a qubit.
    """
    p = rng.random(n)
    phase = rng.uniform(0.0, 2 * np.pi, n)
    return np.sqrt(p).astype(complex), np.sqrt(1.0 - p) * np.exp(1j * phase)


def haar_sample(rng: np.random.Generator) -> PureQubit:
    a, b = haar_amplitudes(rng, 1)
    return PureQubit(a[0], b[0])


def random_two_qubit(rng: np.random.Generator, weight: Optional[float] = None) -> TwoQubitState:
    """Haar-random two-qubit vector, used by the property tests."""
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    return TwoQubitState(v, 1.0 if weight is None else weight)
