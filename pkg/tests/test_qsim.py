"""State-vector simulator tests: preparation, gates, marginals, sampling."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsofm.qsim import (
    Circuit,
    GateKind,
    StateVector,
    apply_gate,
    basis_index,
    bits_to_string,
    cnot,
    compose_state,
    controlled_phase,
    exact_probabilities,
    hadamard,
    index_bits,
    parse_bits,
    pauli_x,
    prepare_uniform_superposition,
    run_circuit,
    sample,
    sample_counts,
    zero_state,
)

INV_SQRT2 = 1 / math.sqrt(2)


def state_from_bits(bits):
    amps = np.zeros(1 << len(bits), dtype=complex)
    amps[basis_index(parse_bits(bits))] = 1.0
    return StateVector(len(parse_bits(bits)), amps)


# ---------------------------------------------------------------------------
# bit conventions


def test_basis_index_qubit0_is_lsb():
    assert basis_index((1, 0, 0)) == 1
    assert basis_index((0, 0, 1)) == 4
    assert index_bits(4, 3) == (0, 0, 1)


@given(st.integers(min_value=0, max_value=255))
def test_index_bits_roundtrip(value):
    assert basis_index(index_bits(value, 8)) == value


def test_parse_bits_rejects_junk():
    with pytest.raises(ValueError):
        parse_bits("01x")
    with pytest.raises(ValueError):
        parse_bits("")
    with pytest.raises(ValueError):
        parse_bits((0, 2))


# ---------------------------------------------------------------------------
# state preparation


def test_uniform_superposition_single_state():
    frag = prepare_uniform_superposition((0, 1), ["00"])
    assert frag.amplitudes[0] == 1.0
    assert np.count_nonzero(frag.amplitudes) == 1


def test_uniform_superposition_matches_hadamard():
    frag = prepare_uniform_superposition((0,), ["0", "1"])
    np.testing.assert_allclose(frag.amplitudes, [INV_SQRT2, INV_SQRT2])


def test_uniform_superposition_three_states():
    # expected support computed by direct enumeration of the three indices
    states = ["001", "010", "100"]
    frag = prepare_uniform_superposition((0, 1, 2), states)
    expected_support = sorted(basis_index(parse_bits(s)) for s in states)
    support = sorted(np.flatnonzero(frag.amplitudes))
    assert support == expected_support
    np.testing.assert_allclose(frag.amplitudes[support], 1 / math.sqrt(3))
    assert abs(np.vdot(frag.amplitudes, frag.amplitudes).real - 1.0) < 1e-12


def test_uniform_superposition_rejects_duplicates():
    with pytest.raises(ValueError, match="duplicate"):
        prepare_uniform_superposition((0, 1), ["01", "01"])


def test_uniform_superposition_rejects_width_mismatch():
    with pytest.raises(ValueError):
        prepare_uniform_superposition((0, 1), ["011"])


def test_uniform_superposition_rejects_empty():
    with pytest.raises(ValueError):
        prepare_uniform_superposition((0, 1), [])


def test_compose_state_places_fragments_and_zero_fills():
    x = prepare_uniform_superposition((0,), ["1"])
    y = prepare_uniform_superposition((2,), ["0", "1"])
    state = compose_state(3, [x, y])
    # qubit0 = 1 always, qubit1 = 0 (uncovered), qubit2 in superposition
    np.testing.assert_allclose(
        state.amplitudes,
        [0, INV_SQRT2, 0, 0, 0, INV_SQRT2, 0, 0],
        atol=1e-15,
    )


def test_compose_state_rejects_overlap():
    a = prepare_uniform_superposition((0,), ["1"])
    b = prepare_uniform_superposition((0,), ["0"])
    with pytest.raises(ValueError, match="assigned"):
        compose_state(2, [a, b])


# ---------------------------------------------------------------------------
# gates


def test_hadamard_on_zero():
    state = apply_gate(zero_state(1), hadamard(0))
    np.testing.assert_allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2])


def test_cnot_flips_target_when_control_set():
    state = state_from_bits("01")  # qubit0=0, qubit1=1
    state = apply_gate(state, cnot(1, 0))
    np.testing.assert_allclose(state.amplitudes, state_from_bits("11").amplitudes)


def test_cnot_leaves_target_when_control_clear():
    state = state_from_bits("10")
    state = apply_gate(state, cnot(1, 0))
    np.testing.assert_allclose(state.amplitudes, state_from_bits("10").amplitudes)


def test_controlled_phase_minus_sign_convention():
    # phi = pi/2 on |11> must give amplitude exp(-i*pi/2) = -i
    state = state_from_bits("11")
    state = apply_gate(state, controlled_phase(0, 1, math.pi / 2))
    assert state.amplitudes[3] == pytest.approx(-1j)


def test_controlled_phase_stores_phi_exactly():
    gate = controlled_phase(0, 1, math.pi / 7)
    assert gate.phi == math.pi / 7


def test_pauli_x_flips():
    state = apply_gate(zero_state(2), pauli_x(1))
    np.testing.assert_allclose(state.amplitudes, state_from_bits("01").amplitudes)


def test_gate_index_out_of_range_rejected():
    with pytest.raises(ValueError):
        apply_gate(zero_state(2), pauli_x(2))
    with pytest.raises(ValueError):
        Circuit(2, (cnot(1, 2),))


def test_gate_control_equal_target_rejected():
    with pytest.raises(ValueError):
        cnot(1, 1)


def _random_state(rng, num_qubits):
    amps = rng.normal(size=1 << num_qubits) + 1j * rng.normal(size=1 << num_qubits)
    amps /= np.linalg.norm(amps)
    return StateVector(num_qubits, amps)


def _random_circuit(rng, num_qubits, num_gates):
    gates = []
    for _ in range(num_gates):
        kind = rng.integers(4)
        if kind == 0:
            gates.append(pauli_x(int(rng.integers(num_qubits))))
        elif kind == 1:
            gates.append(hadamard(int(rng.integers(num_qubits))))
        else:
            control, target = rng.choice(num_qubits, size=2, replace=False)
            if kind == 2:
                gates.append(cnot(int(control), int(target)))
            else:
                gates.append(controlled_phase(int(control), int(target), float(rng.uniform(0, 2 * math.pi))))
    return Circuit(num_qubits, tuple(gates))


@pytest.mark.parametrize("num_qubits,num_gates", [(3, 200), (10, 200), (19, 60)])
def test_norm_preserved_over_random_circuits(num_qubits, num_gates):
    rng = np.random.default_rng(num_qubits * 1000 + num_gates)
    state = _random_state(rng, num_qubits)
    circuit = _random_circuit(rng, num_qubits, num_gates)
    out = run_circuit(state, circuit)
    assert abs(np.vdot(out.amplitudes, out.amplitudes).real - 1.0) < 1e-9


def test_gate_then_inverse_restores_state():
    rng = np.random.default_rng(7)
    state = _random_state(rng, 4)
    gates = [
        pauli_x(2),
        hadamard(1),
        cnot(0, 3),
        controlled_phase(2, 1, 0.813),
    ]
    for gate in gates:
        back = apply_gate(apply_gate(state, gate), gate.inverse())
        np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-10)


@given(st.integers(min_value=0, max_value=2**31 - 1))
@settings(max_examples=25, deadline=None)
def test_cnot_is_involution(seed):
    rng = np.random.default_rng(seed)
    state = _random_state(rng, 3)
    control, target = rng.choice(3, size=2, replace=False)
    gate = cnot(int(control), int(target))
    twice = apply_gate(apply_gate(state, gate), gate)
    np.testing.assert_allclose(twice.amplitudes, state.amplitudes, atol=1e-12)


# ---------------------------------------------------------------------------
# probabilities


def test_marginal_of_basis_state():
    assert exact_probabilities(state_from_bits("01"), (0,)) == {"0": 1.0, "1": 0.0}


def test_marginal_of_bell_state():
    state = run_circuit(zero_state(2), Circuit(2, (hadamard(0), cnot(0, 1))))
    marginal = exact_probabilities(state, (1,))
    assert marginal["0"] == pytest.approx(0.5)
    assert marginal["1"] == pytest.approx(0.5)


def test_marginal_key_order_follows_requested_qubits():
    state = state_from_bits("01")  # qubit0=0, qubit1=1
    assert exact_probabilities(state, (1, 0))["10"] == pytest.approx(1.0)
    assert exact_probabilities(state, (0, 1))["01"] == pytest.approx(1.0)


def test_marginals_sum_to_one():
    rng = np.random.default_rng(3)
    state = _random_state(rng, 5)
    table = exact_probabilities(state, (0, 2, 4))
    assert sum(table.values()) == pytest.approx(1.0, abs=1e-10)


def test_marginal_rejects_bad_subsets():
    state = zero_state(2)
    with pytest.raises(ValueError):
        exact_probabilities(state, ())
    with pytest.raises(ValueError):
        exact_probabilities(state, (0, 0))
    with pytest.raises(ValueError):
        exact_probabilities(state, (5,))


# ---------------------------------------------------------------------------
# sampling


def test_sample_deterministic_state():
    state = state_from_bits("1")
    draws = sample(state, 50, seed=1)
    assert all(s.bitstring == "1" for s in draws)


def test_sample_balanced_superposition_within_binomial_bound():
    state = apply_gate(zero_state(1), hadamard(0))
    draws = sample(state, 100_000, seed=42)
    ones = sum(s.bits[0] for s in draws)
    assert abs(ones / 100_000 - 0.5) < 0.01  # ~6 sigma


def test_sample_seed_reproducible():
    rng = np.random.default_rng(11)
    state = _random_state(rng, 4)
    assert sample(state, 200, seed=5) == sample(state, 200, seed=5)


def test_sample_rejects_zero_shots():
    with pytest.raises(ValueError):
        sample(zero_state(1), 0, seed=0)
    with pytest.raises(ValueError):
        sample_counts(zero_state(1), 0, seed=0)


def test_sample_counts_deterministic_and_worker_invariant():
    rng = np.random.default_rng(23)
    state = _random_state(rng, 6)
    base = sample_counts(state, 200_000, seed=9, workers=1)
    again = sample_counts(state, 200_000, seed=9, workers=1)
    pooled = sample_counts(state, 200_000, seed=9, workers=4)
    assert base.sum() == 200_000
    np.testing.assert_array_equal(base, again)
    np.testing.assert_array_equal(base, pooled)


def test_sampling_matches_exact_distribution_chi_squared():
    from scipy import stats

    rng = np.random.default_rng(17)
    state = _random_state(rng, 4)
    shots = 100_000
    counts = sample_counts(state, shots, seed=3)
    expected = state.probabilities() * shots
    keep = expected > 0
    result = stats.chisquare(counts[keep], expected[keep] * counts[keep].sum() / expected[keep].sum())
    assert result.pvalue > 0.001


def test_sampled_marginal_chi_squared_on_subset():
    from scipy import stats

    rng = np.random.default_rng(29)
    state = _random_state(rng, 6)
    shots = 100_000
    counts = sample_counts(state, shots, seed=4)
    # marginal over qubits (0, 3): fold counts by those two bits
    observed = np.zeros(4)
    for idx, c in enumerate(counts):
        key = ((idx >> 0) & 1) | (((idx >> 3) & 1) << 1)
        observed[key] += c
    exact = exact_probabilities(state, (0, 3))
    expected = np.array([exact[bits_to_string(index_bits(k, 2))] for k in range(4)]) * shots
    result = stats.chisquare(observed, expected * observed.sum() / expected.sum())
    assert result.pvalue > 0.001


def test_statevector_rejects_unnormalized():
    with pytest.raises(ValueError, match="normalized"):
        StateVector(1, np.array([1.0, 1.0]))


def test_circuit_gate_count_helper():
    circuit = Circuit(3, (hadamard(0), cnot(0, 1), hadamard(2)))
    assert circuit.count(GateKind.HADAMARD) == 2
    assert circuit.count(GateKind.CNOT) == 1
