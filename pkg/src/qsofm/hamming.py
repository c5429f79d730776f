"""Pairwise Hamming distances from ancilla interference statistics.

One circuit execution scores every (input, cluster) pair at once.  The
register layout for ``n``-bit vectors is ``[input register: qubits 0..n-1,
cluster register: n..2n-1, ancilla: 2n]``.  The circuit has three stages:

* encode: CNOTs from cluster to input qubits XOR the registers in place;
* extract: Hadamard, ``n`` controlled phases of ``pi/n`` onto the ancilla,
  Hadamard, leaving the ancilla 1-probability at ``sin^2(pi*d / 2n)`` within
  each (input, cluster) subspace;
* decode (optional): the same CNOTs again, restoring the input register so
  a readout identifies which pair was measured.

Conditioning ancilla statistics on the register readout and averaging the
two outcome estimates gives a normalized distance in [0, 1], inverted to an
exact integer by the arcsine map.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .qsim import (
    MAX_QUBITS,
    BitLike,
    Circuit,
    Gate,
    StateVector,
    bits_to_string,
    cnot,
    compose_state,
    controlled_phase,
    hadamard,
    parse_bits,
    prepare_uniform_superposition,
    run_circuit,
    sample_counts,
)

# 2n + 1 qubits must fit in the simulator; n <= 9 is the supported envelope.
MAX_DIMENSION = (MAX_QUBITS - 1) // 2


@dataclass(frozen=True)
class BinaryVector:
    """Fixed-length bit vector; element ``i`` maps to register qubit ``i``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", parse_bits(self.bits))

    @classmethod
    def from_string(cls, text: str) -> "BinaryVector":
        return cls(parse_bits(text))

    @property
    def dimension(self) -> int:
        return len(self.bits)

    @property
    def as_int(self) -> int:
        value = 0
        for position, bit in enumerate(self.bits):
            value |= bit << position
        return value

    def __str__(self) -> str:
        return bits_to_string(self.bits)


def classical_hamming(x: BinaryVector, y: BinaryVector) -> int:
    """Number of differing positions; the classical oracle."""
    if x.dimension != y.dimension:
        raise ValueError(f"dimension mismatch: {x.dimension} vs {y.dimension}")
    return (x.as_int ^ y.as_int).bit_count()


def random_distinct_vectors(count: int, dimension: int, rng: np.random.Generator) -> tuple[BinaryVector, ...]:
    """Draw ``count`` distinct vectors uniformly from the 2**dimension space."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > (1 << dimension):
        raise ValueError(f"cannot draw {count} distinct vectors of dimension {dimension}")
    values = rng.choice(1 << dimension, size=count, replace=False)
    return tuple(
        BinaryVector(tuple((int(v) >> p) & 1 for p in range(dimension))) for v in values
    )


def normalized_for_distance(distance: int, dimension: int) -> float:
    """Closed-form estimator value for a known integer distance."""
    if not 0 <= distance <= dimension:
        raise ValueError(f"distance {distance} outside 0..{dimension}")
    return math.sin(math.pi * distance / (2 * dimension)) ** 2


def recover_integer_distance(normalized: float, dimension: int) -> int:
    """Nearest integer d with sin^2(pi*d / 2n) equal to the estimate."""
    value = min(max(float(normalized), 0.0), 1.0)
    return round(2 * dimension * math.asin(math.sqrt(value)) / math.pi)


@dataclass(frozen=True)
class DistanceEstimate:
    """Ancilla statistics for one (input, cluster) pair."""

    normalized: float
    integer_distance: int
    a0: float
    a1: float


def _estimate(p0: float, p1: float, dimension: int) -> DistanceEstimate:
    total = p0 + p1
    if total <= 0.0:
        raise ValueError("subspace carries zero probability")
    a0 = p0 / total
    a1 = p1 / total
    normalized = 1.0 - 0.5 * (a0 + (1.0 - a1))
    normalized = min(max(normalized, 0.0), 1.0)
    return DistanceEstimate(
        normalized=normalized,
        integer_distance=recover_integer_distance(normalized, dimension),
        a0=a0,
        a1=a1,
    )


def _as_vectors(vectors: Iterable[BinaryVector | BitLike]) -> tuple[BinaryVector, ...]:
    return tuple(v if isinstance(v, BinaryVector) else BinaryVector(parse_bits(v)) for v in vectors)


def _validate_set(vectors: tuple[BinaryVector, ...], label: str) -> int:
    if not vectors:
        raise ValueError(f"{label} set must be non-empty")
    dimension = vectors[0].dimension
    if any(v.dimension != dimension for v in vectors):
        raise ValueError(f"{label} set mixes dimensions")
    if len({v.as_int for v in vectors}) != len(vectors):
        raise ValueError(f"{label} set contains duplicate vectors")
    return dimension


def _validate_sets(
    inputs: tuple[BinaryVector, ...], clusters: tuple[BinaryVector, ...]
) -> int:
    dim_inputs = _validate_set(inputs, "input")
    dim_clusters = _validate_set(clusters, "cluster")
    if dim_inputs != dim_clusters:
        raise ValueError(f"dimension mismatch: inputs {dim_inputs}, clusters {dim_clusters}")
    if 2 * dim_inputs + 1 > MAX_QUBITS:
        raise ValueError(
            f"dimension {dim_inputs} needs {2 * dim_inputs + 1} qubits, over the {MAX_QUBITS}-qubit cap"
        )
    return dim_inputs


def register_layout(dimension: int) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """(input qubits, cluster qubits, ancilla) for an n-bit problem."""
    x_qubits = tuple(range(dimension))
    y_qubits = tuple(range(dimension, 2 * dimension))
    return x_qubits, y_qubits, 2 * dimension


def prepare_state(
    inputs: Iterable[BinaryVector | BitLike], clusters: Iterable[BinaryVector | BitLike]
) -> StateVector:
    """Initial state: uniform superpositions on both registers, ancilla |0>."""
    inputs = _as_vectors(inputs)
    clusters = _as_vectors(clusters)
    dimension = _validate_sets(inputs, clusters)
    x_qubits, y_qubits, _ = register_layout(dimension)
    fragments = [
        prepare_uniform_superposition(x_qubits, [v.bits for v in inputs]),
        prepare_uniform_superposition(y_qubits, [v.bits for v in clusters]),
    ]
    return compose_state(2 * dimension + 1, fragments)


def build_distance_circuit(
    inputs: Iterable[BinaryVector | BitLike],
    clusters: Iterable[BinaryVector | BitLike],
    include_decoding: bool = True,
) -> Circuit:
    """Gate sequence after state preparation: 3n+2 gates, 2n+2 without decode."""
    inputs = _as_vectors(inputs)
    clusters = _as_vectors(clusters)
    dimension = _validate_sets(inputs, clusters)
    x_qubits, y_qubits, ancilla = register_layout(dimension)
    gates: list[Gate] = [cnot(y_qubits[a], x_qubits[a]) for a in range(dimension)]
    gates.append(hadamard(ancilla))
    gates.extend(
        controlled_phase(x_qubits[a], ancilla, math.pi / dimension) for a in range(dimension)
    )
    gates.append(hadamard(ancilla))
    if include_decoding:
        gates.extend(cnot(y_qubits[a], x_qubits[a]) for a in range(dimension))
    return Circuit(2 * dimension + 1, tuple(gates))


def run_distance_circuit(
    inputs: Iterable[BinaryVector | BitLike],
    clusters: Iterable[BinaryVector | BitLike],
    include_decoding: bool = True,
) -> StateVector:
    inputs = _as_vectors(inputs)
    clusters = _as_vectors(clusters)
    state = prepare_state(inputs, clusters)
    return run_circuit(state, build_distance_circuit(inputs, clusters, include_decoding))


def _subspace_table(state: StateVector, dimension: int) -> np.ndarray:
    # index k = ancilla*2^(2n) + y*2^n + x, so reshape gives [ancilla, y, x]
    return state.probabilities().reshape(2, 1 << dimension, 1 << dimension)


@dataclass(frozen=True)
class DistanceMatrix:
    """Estimates for every (input, cluster) pair; None marks missing entries."""

    rows: int
    cols: int
    dimension: int
    entries: tuple[tuple[DistanceEstimate | None, ...], ...]
    mode: str  # "exact" or "sampled"
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be exact or sampled, got {self.mode!r}")
        if self.mode == "sampled" and self.shots is None:
            raise ValueError("sampled mode requires shots")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entries grid does not match rows x cols")

    def entry(self, i: int, j: int) -> DistanceEstimate | None:
        return self.entries[i][j]

    def missing(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (i, j)
            for i in range(self.rows)
            for j in range(self.cols)
            if self.entries[i][j] is None
        )

    def normalized_values(self) -> np.ndarray:
        """Grid of normalized estimates with NaN for missing entries."""
        grid = np.full((self.rows, self.cols), np.nan)
        for i in range(self.rows):
            for j in range(self.cols):
                e = self.entries[i][j]
                if e is not None:
                    grid[i, j] = e.normalized
        return grid

    def integer_values(self) -> np.ndarray:
        """Grid of recovered integer distances with -1 for missing entries."""
        grid = np.full((self.rows, self.cols), -1, dtype=int)
        for i in range(self.rows):
            for j in range(self.cols):
                e = self.entries[i][j]
                if e is not None:
                    grid[i, j] = e.integer_distance
        return grid

    def to_csv(self) -> str:
        lines = ["input," + ",".join(str(j) for j in range(self.cols))]
        for i, row in enumerate(self.entries):
            cells = ["" if e is None else _fmt12(e.normalized) for e in row]
            lines.append(f"{i}," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_integer_csv(self) -> str:
        lines = ["input," + ",".join(str(j) for j in range(self.cols))]
        for i, row in enumerate(self.entries):
            cells = ["" if e is None else str(e.integer_distance) for e in row]
            lines.append(f"{i}," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def cell(e: DistanceEstimate | None) -> dict | None:
            if e is None:
                return None
            return {
                "normalized": _round12(e.normalized),
                "integer_distance": e.integer_distance,
                "a0": _round12(e.a0),
                "a1": _round12(e.a1),
            }

        payload = {
            "mode": self.mode,
            "shots": self.shots,
            "seed": self.seed,
            "rows": self.rows,
            "cols": self.cols,
            "dimension": self.dimension,
            "entries": [[cell(e) for e in row] for row in self.entries],
        }
        return json.dumps(payload, indent=2) + "\n"


def _fmt12(value: float) -> str:
    return format(value, ".12g")


def _round12(value: float) -> float:
    return float(_fmt12(value))


def exact_distance_matrix(
    inputs: Iterable[BinaryVector | BitLike], clusters: Iterable[BinaryVector | BitLike]
) -> DistanceMatrix:
    """Distance estimates from exact final-state amplitudes (decoded circuit)."""
    inputs = _as_vectors(inputs)
    clusters = _as_vectors(clusters)
    dimension = _validate_sets(inputs, clusters)
    final = run_distance_circuit(inputs, clusters, include_decoding=True)
    table = _subspace_table(final, dimension)
    entries = tuple(
        tuple(
            _estimate(float(table[0, y.as_int, x.as_int]), float(table[1, y.as_int, x.as_int]), dimension)
            for y in clusters
        )
        for x in inputs
    )
    return DistanceMatrix(
        rows=len(inputs), cols=len(clusters), dimension=dimension, entries=entries, mode="exact"
    )


def sampled_distance_matrix(
    inputs: Iterable[BinaryVector | BitLike],
    clusters: Iterable[BinaryVector | BitLike],
    shots: int,
    seed: int,
    workers: int = 1,
) -> DistanceMatrix:
    """Distance estimates from finite-shot readout frequencies.

    Entries whose (input, cluster) subspace is never observed are reported as
    None rather than guessed.
    """
    inputs = _as_vectors(inputs)
    clusters = _as_vectors(clusters)
    dimension = _validate_sets(inputs, clusters)
    final = run_distance_circuit(inputs, clusters, include_decoding=True)
    counts = sample_counts(final, shots, seed, workers=workers).reshape(
        2, 1 << dimension, 1 << dimension
    )
    entries = []
    for x in inputs:
        row: list[DistanceEstimate | None] = []
        for y in clusters:
            c0 = int(counts[0, y.as_int, x.as_int])
            c1 = int(counts[1, y.as_int, x.as_int])
            row.append(None if c0 + c1 == 0 else _estimate(float(c0), float(c1), dimension))
        entries.append(tuple(row))
    return DistanceMatrix(
        rows=len(inputs),
        cols=len(clusters),
        dimension=dimension,
        entries=tuple(entries),
        mode="sampled",
        shots=shots,
        seed=seed,
    )


def single_sample_distances(
    sample_vector: BinaryVector | BitLike,
    clusters: Iterable[BinaryVector | BitLike],
    shots: int | None = None,
    seed: int | np.random.SeedSequence | None = None,
    workers: int = 1,
) -> list[DistanceEstimate | None]:
    """Distances from one probe vector to every cluster in one execution.

    Uses the reduced circuit without the restore stage: with a single input
    the readout no longer needs to identify which input was measured, so
    conditioning on the cluster register alone is enough.  Exact mode
    (``shots=None``) never returns None entries.
    """
    probe = sample_vector if isinstance(sample_vector, BinaryVector) else BinaryVector(parse_bits(sample_vector))
    clusters = _as_vectors(clusters)
    dimension = _validate_sets((probe,), clusters)
    final = run_distance_circuit((probe,), clusters, include_decoding=False)
    if shots is None:
        table = _subspace_table(final, dimension)
        per_cluster = table.sum(axis=2)  # marginal over the input register
        return [
            _estimate(float(per_cluster[0, y.as_int]), float(per_cluster[1, y.as_int]), dimension)
            for y in clusters
        ]
    if seed is None:
        raise ValueError("sampled mode requires a seed")
    counts = sample_counts(final, shots, seed, workers=workers).reshape(
        2, 1 << dimension, 1 << dimension
    )
    per_cluster = counts.sum(axis=2)
    results: list[DistanceEstimate | None] = []
    for y in clusters:
        c0 = int(per_cluster[0, y.as_int])
        c1 = int(per_cluster[1, y.as_int])
        results.append(None if c0 + c1 == 0 else _estimate(float(c0), float(c1), dimension))
    return results
