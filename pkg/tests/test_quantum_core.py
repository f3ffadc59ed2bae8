import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import qubits
from mdm.quantum_core import (
    DensityMatrix2,
    EmptyBranch,
    PureQubit,
    TwoQubitState,
    equatorial_state,
    fidelity,
    haar_amplitudes,
    haar_sample,
    partial_trace_probe,
    random_two_qubit,
)

S2 = 1 / np.sqrt(2)


def brute_partial_trace(vec):
    """Reduce |psi><psi| over the second qubit with explicit index loops."""
    full = np.outer(vec, np.conj(vec))
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                out[i, j] += full[2 * i + k, 2 * j + k]
    return out


def test_fidelity_examples():
    zero, one = PureQubit(1, 0), PureQubit(0, 1)
    assert fidelity(zero, zero.density()) == 1.0
    assert fidelity(zero, one.density()) == 0.0
    mixed = DensityMatrix2(np.eye(2) / 2)
    assert fidelity(PureQubit(S2, S2), mixed) == pytest.approx(0.5, abs=1e-12)


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        PureQubit(1, 1)
    with pytest.raises(ValueError):
        DensityMatrix2(np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix2([[1.5, 0], [0, -0.5]])
    with pytest.raises(ValueError):
        DensityMatrix2([[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError):
        PureQubit(np.nan, 0)


def test_constructor_renormalizes_rounding_drift():
    q = PureQubit(1 + 1e-10, 0)
    assert abs(q.p0 - 1) < 1e-15


@given(qubits())
def test_fidelity_with_own_projector(phi):
    assert fidelity(phi, phi.density()) == pytest.approx(1.0, abs=1e-12)


@given(qubits(), qubits(), qubits(), st.floats(0, 1))
def test_fidelity_linear_in_rho(phi, a, b, p):
    rho = DensityMatrix2.mixture([p, 1 - p], [a, b])
    expected = p * fidelity(phi, a.density()) + (1 - p) * fidelity(phi, b.density())
    assert fidelity(phi, rho) == pytest.approx(expected, abs=1e-12)


@given(qubits(), qubits(), st.floats(0, 1))
def test_mixture_invariants(a, b, p):
    m = DensityMatrix2.mixture([p, 1 - p], [a, b]).matrix
    assert np.allclose(m, m.conj().T, atol=1e-12)
    assert abs(np.trace(m) - 1) < 1e-12
    assert np.linalg.eigvalsh(m).min() >= -1e-12


def test_partial_trace_examples():
    rho, w = partial_trace_probe(TwoQubitState([1, 0, 0, 0]))
    assert w == 1.0
    assert np.allclose(rho.matrix, [[1, 0], [0, 0]], atol=1e-12)
    rho, _ = partial_trace_probe(TwoQubitState([S2, 0, 0, S2]))
    assert np.allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)
    a, b = 0.6, 0.8j
    rho, _ = partial_trace_probe(TwoQubitState([a, 0, 0, b]))
    assert np.allclose(rho.matrix, brute_partial_trace(np.array([a, 0, 0, b])), atol=1e-12)
    assert np.allclose(rho.matrix, np.diag([0.36, 0.64]), atol=1e-12)


def test_partial_trace_matches_brute_force(rng):
    for _ in range(1000):
        state = random_two_qubit(rng)
        rho, _ = partial_trace_probe(state)
        assert np.max(np.abs(rho.matrix - brute_partial_trace(state.vector))) <= 1e-12


def test_zero_weight_branch_is_explicit():
    with pytest.raises(EmptyBranch):
        TwoQubitState.from_unnormalized([0, 0, 0, 0])
    with pytest.raises(EmptyBranch):
        partial_trace_probe(TwoQubitState([1, 0, 0, 0], weight=0.0))


@pytest.mark.parametrize(
    "gamma, vec",
    [(0, [1, 0]), (np.pi / 4, [S2, S2]), (np.pi / 2, [0, 1])],
)
def test_equatorial_state(gamma, vec):
    assert np.allclose(equatorial_state(gamma).vector, vec, atol=1e-15)


def test_haar_sample_deterministic():
    a = haar_sample(np.random.default_rng(7))
    b = haar_sample(np.random.default_rng(7))
    assert a == b


@settings(max_examples=20)
@given(st.integers(0, 2**32))
def test_haar_sample_normalized(seed):
    q = haar_sample(np.random.default_rng(seed))
    assert abs(q.p0 + q.p1 - 1) < 1e-12


def test_haar_moments(rng):
    n = 10**6
    a, b = haar_amplitudes(rng, n)
    assert np.allclose(np.abs(a) ** 2 + np.abs(b) ** 2, 1, atol=1e-12)
    t = np.abs(a) ** 2
    assert abs(t.mean() - 0.5) <= 3 * np.sqrt(1 / 12 / n)
    # Var[4t(1-t)] = 16/30 - 4/9 = 4/45 for t ~ U(0, 1)
    x = 4 * t * (1 - t)
    assert abs(x.mean() - 2 / 3) <= 3 * np.sqrt(4 / 45 / n)
    phase = np.angle(b[np.abs(b) > 0] / a[np.abs(b) > 0]) % (2 * np.pi)
    assert abs(phase.mean() - np.pi) <= 3 * np.sqrt(np.pi**2 / 3 / len(phase))


def test_haar_sample_matches_vectorized_draw():
    q = haar_sample(np.random.default_rng(3))
    a, b = haar_amplitudes(np.random.default_rng(3), 1)
    assert q.alpha == pytest.approx(a[0]) and q.beta == pytest.approx(b[0])
