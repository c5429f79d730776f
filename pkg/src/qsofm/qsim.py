"""Dense state-vector simulation for small qubit registers.

Supports exactly the gate set the distance circuits need: Pauli-X, Hadamard,
CNOT and a controlled phase rotation.  Conventions are pinned so that
downstream tests can be bit-exact:

* qubit ``q`` contributes the ``2**q`` bit of a basis-state index, i.e.
  qubit 0 is the least significant bit;
* bit sequences are written in position order, so element ``i`` of a
  bitstring refers to qubit ``i`` of the register it describes;
* the controlled phase multiplies the ``|11>`` amplitude by
  ``exp(-1j * phi)`` (minus sign in the exponent).
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

MAX_QUBITS = 24

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_SAMPLE_CHUNK = 1 << 16

BitLike = Sequence[int] | str


def parse_bits(bits: BitLike) -> tuple[int, ...]:
    """Normalize a bitstring such as ``"011"`` (or any 0/1 sequence) to a tuple."""
    if isinstance(bits, str):
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"bits must be a non-empty string of 0/1: {bits!r}")
        return tuple(int(c) for c in bits)
    values = tuple(int(b) for b in bits)
    if not values or any(v not in (0, 1) for v in values):
        raise ValueError(f"bits must be a non-empty sequence of 0/1: {bits!r}")
    return values


def bits_to_string(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def basis_index(bits: Sequence[int]) -> int:
    """Index of the basis state with qubit ``i`` set to ``bits[i]``."""
    index = 0
    for position, bit in enumerate(bits):
        index |= (bit & 1) << position
    return index


def index_bits(index: int, width: int) -> tuple[int, ...]:
    """Inverse of :func:`basis_index`; qubit 0 first."""
    return tuple((index >> position) & 1 for position in range(width))


class GateKind(Enum):
    PAULI_X = "x"
    HADAMARD = "h"
    CNOT = "cnot"
    CONTROLLED_PHASE = "cphase"


@dataclass(frozen=True)
class Gate:
    """One gate application over named qubit indices."""

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    phi: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "controls", tuple(self.controls))
        controlled = self.kind in (GateKind.CNOT, GateKind.CONTROLLED_PHASE)
        if len(self.targets) != 1:
            raise ValueError(f"{self.kind.value} takes exactly one target")
        expected_controls = 1 if controlled else 0
        if len(self.controls) != expected_controls:
            raise ValueError(f"{self.kind.value} takes {expected_controls} control qubit(s)")
        touched = self.targets + self.controls
        if any(q < 0 for q in touched):
            raise ValueError(f"negative qubit index in {touched}")
        if len(set(touched)) != len(touched):
            raise ValueError(f"control and target must be distinct: {touched}")
        if self.kind is GateKind.CONTROLLED_PHASE:
            if self.phi is None:
                raise ValueError("controlled phase requires phi")
        elif self.phi is not None:
            raise ValueError(f"{self.kind.value} does not take phi")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def inverse(self) -> "Gate":
        """Gate undoing this one (X, H and CNOT are involutions)."""
        if self.kind is GateKind.CONTROLLED_PHASE:
            assert self.phi is not None
            return Gate(self.kind, self.targets, self.controls, -self.phi)
        return self


def pauli_x(target: int) -> Gate:
    return Gate(GateKind.PAULI_X, (target,))


def hadamard(target: int) -> Gate:
    return Gate(GateKind.HADAMARD, (target,))


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (target,), (control,))


def controlled_phase(control: int, target: int, phi: float) -> Gate:
    return Gate(GateKind.CONTROLLED_PHASE, (target,), (control,), float(phi))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over a fixed register size."""

    num_qubits: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        for gate in self.gates:
            if max(gate.qubits) >= self.num_qubits:
                raise ValueError(f"gate on qubits {gate.qubits} exceeds {self.num_qubits}-qubit register")

    def count(self, kind: GateKind) -> int:
        return sum(1 for gate in self.gates if gate.kind is kind)


@dataclass
class StateVector:
    """Normalized complex amplitudes over the 2**num_qubits basis states."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in 1..{MAX_QUBITS}, got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError(f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}")
        norm_sq = float(np.vdot(amps, amps).real)
        if abs(norm_sq - 1.0) > 1e-8:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        self.amplitudes = amps

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def zero_state(num_qubits: int) -> StateVector:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


@dataclass(frozen=True)
class RegisterFragment:
    """Amplitudes for one register, addressed by absolute qubit indices."""

    qubits: tuple[int, ...]
    amplitudes: np.ndarray


def prepare_uniform_superposition(
    register_qubits: Sequence[int], basis_states: Iterable[BitLike]
) -> RegisterFragment:
    """Equal-weight superposition of the given basis states on one register.

    Duplicate basis states are rejected: an amplitude collision would break
    the uniform 1/sqrt(K) weighting.
    """
    qubits = tuple(register_qubits)
    if not qubits:
        raise ValueError("register must contain at least one qubit")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"register qubits must be distinct: {qubits}")
    states = [parse_bits(s) for s in basis_states]
    if not states:
        raise ValueError("basis_states must be non-empty")
    width = len(qubits)
    for state in states:
        if len(state) != width:
            raise ValueError(f"basis state {bits_to_string(state)} does not span {width} qubit(s)")
    indices = [basis_index(state) for state in states]
    if len(set(indices)) != len(indices):
        raise ValueError("duplicate basis state in superposition")
    amplitudes = np.zeros(1 << width, dtype=np.complex128)
    amplitudes[indices] = 1.0 / math.sqrt(len(indices))
    return RegisterFragment(qubits, amplitudes)


def compose_state(num_qubits: int, fragments: Iterable[RegisterFragment]) -> StateVector:
    """Tensor product of register fragments; uncovered qubits start in |0>."""
    fragments = tuple(fragments)
    covered: set[int] = set()
    for fragment in fragments:
        for qubit in fragment.qubits:
            if not 0 <= qubit < num_qubits:
                raise ValueError(f"fragment qubit {qubit} outside 0..{num_qubits - 1}")
            if qubit in covered:
                raise ValueError(f"qubit {qubit} assigned by two fragments")
            covered.add(qubit)
    indices = np.arange(1 << num_qubits, dtype=np.int64)
    amplitudes = np.ones(1 << num_qubits, dtype=np.complex128)
    for fragment in fragments:
        local = np.zeros(indices.shape, dtype=np.int64)
        for position, qubit in enumerate(fragment.qubits):
            local |= ((indices >> qubit) & 1) << position
        amplitudes *= fragment.amplitudes[local]
    for qubit in range(num_qubits):
        if qubit not in covered:
            amplitudes[((indices >> qubit) & 1) == 1] = 0.0
    return StateVector(num_qubits, amplitudes)


def _full_index(num_qubits: int, assignments: dict[int, int]) -> tuple:
    # numpy axis for qubit q is num_qubits - 1 - q (axis 0 is the MSB)
    index: list = [slice(None)] * num_qubits
    for qubit, bit in assignments.items():
        index[num_qubits - 1 - qubit] = bit
    return tuple(index)


def _apply_inplace(amplitudes: np.ndarray, gate: Gate, num_qubits: int) -> None:
    view = amplitudes.reshape((2,) * num_qubits)
    target = gate.targets[0]
    if gate.kind is GateKind.PAULI_X:
        i0 = _full_index(num_qubits, {target: 0})
        i1 = _full_index(num_qubits, {target: 1})
        swap = view[i0].copy()
        view[i0] = view[i1]
        view[i1] = swap
    elif gate.kind is GateKind.HADAMARD:
        i0 = _full_index(num_qubits, {target: 0})
        i1 = _full_index(num_qubits, {target: 1})
        a0 = view[i0].copy()
        a1 = view[i1].copy()
        view[i0] = (a0 + a1) * _INV_SQRT2
        view[i1] = (a0 - a1) * _INV_SQRT2
    elif gate.kind is GateKind.CNOT:
        control = gate.controls[0]
        i10 = _full_index(num_qubits, {control: 1, target: 0})
        i11 = _full_index(num_qubits, {control: 1, target: 1})
        swap = view[i10].copy()
        view[i10] = view[i11]
        view[i11] = swap
    elif gate.kind is GateKind.CONTROLLED_PHASE:
        control = gate.controls[0]
        i11 = _full_index(num_qubits, {control: 1, target: 1})
        view[i11] = view[i11] * np.exp(-1j * gate.phi)
    else:  # pragma: no cover
        raise ValueError(f"unsupported gate kind {gate.kind}")


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate, returning a new state; the input is untouched."""
    if max(gate.qubits) >= state.num_qubits:
        raise ValueError(f"gate on qubits {gate.qubits} exceeds {state.num_qubits}-qubit state")
    amplitudes = state.amplitudes.copy()
    _apply_inplace(amplitudes, gate, state.num_qubits)
    return StateVector(state.num_qubits, amplitudes)


def run_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply every gate of the circuit in order."""
    if circuit.num_qubits != state.num_qubits:
        raise ValueError(
            f"circuit spans {circuit.num_qubits} qubits but state has {state.num_qubits}"
        )
    amplitudes = state.amplitudes.copy()
    for gate in circuit.gates:
        _apply_inplace(amplitudes, gate, circuit.num_qubits)
    return StateVector(circuit.num_qubits, amplitudes)


def exact_probabilities(state: StateVector, qubits: Sequence[int]) -> dict[str, float]:
    """Marginal probability table over a qubit subset.

    Keys are bitstrings in position order: character ``j`` is the value of
    ``qubits[j]``.
    """
    qubits = tuple(qubits)
    if not qubits:
        raise ValueError("qubit subset must be non-empty")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit subset has duplicates: {qubits}")
    for qubit in qubits:
        if not 0 <= qubit < state.num_qubits:
            raise ValueError(f"qubit {qubit} outside 0..{state.num_qubits - 1}")
    num_qubits = state.num_qubits
    keep = set(qubits)
    table = state.probabilities().reshape((2,) * num_qubits)
    drop_axes = tuple(num_qubits - 1 - q for q in range(num_qubits) if q not in keep)
    if drop_axes:
        table = table.sum(axis=drop_axes)
    kept_desc = sorted(qubits, reverse=True)  # axis order that survives the sum
    table = table.transpose([kept_desc.index(q) for q in qubits])
    result: dict[str, float] = {}
    for local in range(1 << len(qubits)):
        bits = index_bits(local, len(qubits))
        result[bits_to_string(bits)] = float(table[bits])
    return result


@dataclass(frozen=True)
class MeasurementSample:
    """One full-register readout, bit ``i`` being the value of qubit ``i``."""

    bits: tuple[int, ...]

    @property
    def bitstring(self) -> str:
        return bits_to_string(self.bits)


def sample(state: StateVector, shots: int, seed: int) -> list[MeasurementSample]:
    """Draw i.i.d. full-register readouts; reproducible for a fixed seed."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    probabilities = state.probabilities()
    probabilities = probabilities / probabilities.sum()
    draws = rng.choice(probabilities.size, size=shots, p=probabilities)
    return [MeasurementSample(index_bits(int(d), state.num_qubits)) for d in draws]


def sample_counts(
    state: StateVector,
    shots: int,
    seed: int | np.random.SeedSequence,
    workers: int = 1,
) -> np.ndarray:
    """Histogram of sampled basis-state indices.

    Draws happen in fixed-size chunks with per-chunk child seeds, so the
    result is identical for any worker count.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probabilities = state.probabilities()
    probabilities = probabilities / probabilities.sum()
    dim = probabilities.size
    sizes = [_SAMPLE_CHUNK] * (shots // _SAMPLE_CHUNK)
    if shots % _SAMPLE_CHUNK:
        sizes.append(shots % _SAMPLE_CHUNK)
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = root.spawn(len(sizes))

    def draw(task: tuple[np.random.SeedSequence, int]) -> np.ndarray:
        child, size = task
        rng = np.random.default_rng(child)
        return np.bincount(rng.choice(dim, size=size, p=probabilities), minlength=dim)

    tasks = list(zip(children, sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(draw, tasks))
    else:
        chunks = [draw(task) for task in tasks]
    return np.sum(chunks, axis=0)
