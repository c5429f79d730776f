"""Self-organizing feature maps over continuous and binary data.

The continuous map follows the classic competitive-learning update: the best
matching unit (and, with a gaussian neighborhood, its lattice neighbors) move
toward each presented sample by a learning-rate fraction.  The binary map is
the Hamming variant used for text clustering: per sample, the winning cluster
vector flips its first mismatching bit.  Distance backends are pluggable so
the same loop runs against the classical popcount oracle or the quantum
distance circuit (exact amplitudes or finite shots), with per-epoch
accounting of how many distance evaluations each backend spends.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .hamming import (
    BinaryVector,
    classical_hamming,
    random_distinct_vectors,
    single_sample_distances,
)

BACKENDS = ("classical", "quantum_exact", "quantum_sampled")

# Domain-separation tags for the seed streams derived from one run seed.
_ORDER_STREAM = 11
_SHOT_STREAM = 13


class InsufficientShotsError(RuntimeError):
    """Raised when sampled distances are missing for some cluster."""


@dataclass(frozen=True)
class BinaryMap:
    """Cluster vectors of one binary map; pairwise distinct by construction."""

    clusters: tuple[BinaryVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", tuple(self.clusters))
        if not self.clusters:
            raise ValueError("map must contain at least one cluster vector")
        dimension = self.clusters[0].dimension
        if any(c.dimension != dimension for c in self.clusters):
            raise ValueError("cluster vectors mix dimensions")
        if len({c.as_int for c in self.clusters}) != len(self.clusters):
            raise ValueError("cluster vectors must be pairwise distinct")

    @property
    def dimension(self) -> int:
        return self.clusters[0].dimension

    def __len__(self) -> int:
        return len(self.clusters)


def random_binary_map(num_clusters: int, dimension: int, rng: np.random.Generator) -> BinaryMap:
    return BinaryMap(random_distinct_vectors(num_clusters, dimension, rng))


def initial_map(
    samples: Sequence[BinaryVector],
    num_clusters: int,
    rng: np.random.Generator,
    strategy: str = "spread",
) -> BinaryMap:
    """Starting cluster vectors for training.

    ``spread`` seeds a random sample and then repeatedly takes the sample
    farthest from the chosen set (farthest-first traversal, ties to the
    earliest sample).  With the delta neighborhood only winners ever move, so
    a spread start is what keeps every region of the data covered; uniform
    random starts can leave a cluster permanently idle.  ``uniform`` draws
    distinct vectors uniformly from the whole bit space instead.
    """
    samples = tuple(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    dimension = samples[0].dimension
    if any(s.dimension != dimension for s in samples):
        raise ValueError("samples mix dimensions")
    if num_clusters < 1:
        raise ValueError("num_clusters must be >= 1")
    if num_clusters > (1 << dimension):
        raise ValueError(f"cannot place {num_clusters} distinct clusters in {dimension} bits")
    if strategy == "uniform":
        return random_binary_map(num_clusters, dimension, rng)
    if strategy != "spread":
        raise ValueError(f"strategy must be spread or uniform, got {strategy!r}")
    distinct: list[BinaryVector] = []
    seen: set[int] = set()
    for vector in samples:
        if vector.as_int not in seen:
            distinct.append(vector)
            seen.add(vector.as_int)
    chosen: list[BinaryVector] = [distinct[int(rng.integers(len(distinct)))]]
    while len(chosen) < min(num_clusters, len(distinct)):
        best: BinaryVector | None = None
        best_distance = -1
        for vector in distinct:
            if vector.as_int in {c.as_int for c in chosen}:
                continue
            distance = min(classical_hamming(vector, c) for c in chosen)
            if distance > best_distance:
                best, best_distance = vector, distance
        assert best is not None
        chosen.append(best)
    if len(chosen) < num_clusters:
        # more clusters than distinct samples: top up with fresh random vectors
        taken = {c.as_int for c in chosen}
        free = np.array([v for v in range(1 << dimension) if v not in taken])
        extra = rng.choice(free, size=num_clusters - len(chosen), replace=False)
        chosen.extend(
            BinaryVector(tuple((int(v) >> p) & 1 for p in range(dimension))) for v in extra
        )
    return BinaryMap(tuple(chosen))


@dataclass
class ContinuousMap:
    """Real-valued weight vectors on a 1-D or 2-D lattice."""

    weights: np.ndarray
    grid_shape: tuple[int, ...]

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 2:
            raise ValueError("weights must be an (M, dimension) array")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")
        self.grid_shape = tuple(int(s) for s in self.grid_shape)
        if len(self.grid_shape) not in (1, 2) or any(s < 1 for s in self.grid_shape):
            raise ValueError(f"grid_shape must be a 1-D or 2-D lattice, got {self.grid_shape}")
        if int(np.prod(self.grid_shape)) != self.weights.shape[0]:
            raise ValueError("grid size does not match the number of weight vectors")

    def grid_positions(self) -> np.ndarray:
        """Lattice coordinates of each unit, shape (M, len(grid_shape))."""
        coords = np.indices(self.grid_shape).reshape(len(self.grid_shape), -1).T
        return coords.astype(float)


@dataclass(frozen=True)
class TrainConfig:
    """Training parameters; one seed drives every random choice."""

    epochs: int = 16
    backend: str = "classical"
    shots: int = 8192
    rng_seed: int = 0
    learning_rate: float | Callable[[int], float] = 0.5
    neighborhood: str = "delta"  # delta | gaussian
    gaussian_width: float | Callable[[int], float] = 1.0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")
        if self.neighborhood not in ("delta", "gaussian"):
            raise ValueError(f"neighborhood must be delta or gaussian, got {self.neighborhood!r}")
        if not callable(self.learning_rate) and not 0.0 < float(self.learning_rate) <= 1.0:
            raise ValueError("learning_rate must lie in (0, 1]")


@dataclass(frozen=True)
class EpochTrace:
    """Per-epoch record: labels, cluster snapshot, evaluation accounting."""

    epoch: int
    labels: tuple[int, ...]
    clusters: tuple[BinaryVector, ...]
    distance_evaluations: int
    skipped: tuple[tuple[int, int], ...] = ()


class ClassicalBackend:
    """Popcount oracle; one evaluation per (sample, cluster) pair."""

    name = "classical"

    def distances(self, sample: BinaryVector, clusters: Sequence[BinaryVector]) -> list[float]:
        return [float(classical_hamming(sample, c)) for c in clusters]

    def evaluations_per_sample(self, num_clusters: int) -> int:
        return num_clusters


class QuantumExactBackend:
    """Exact-amplitude circuit; one evaluation scores all clusters at once."""

    name = "quantum_exact"

    def distances(self, sample: BinaryVector, clusters: Sequence[BinaryVector]) -> list[float]:
        estimates = single_sample_distances(sample, clusters)
        return [e.normalized for e in estimates]  # type: ignore[union-attr]

    def evaluations_per_sample(self, num_clusters: int) -> int:
        return 1


class QuantumSampledBackend:
    """Finite-shot circuit; one evaluation per sample, seeded per call."""

    name = "quantum_sampled"

    def __init__(self, shots: int, rng_seed: int, workers: int = 1) -> None:
        if shots < 1:
            raise ValueError("shots must be >= 1")
        self.shots = shots
        self.rng_seed = rng_seed
        self.workers = workers
        self._calls = 0

    def distances(self, sample: BinaryVector, clusters: Sequence[BinaryVector]) -> list[float]:
        seed = np.random.SeedSequence([self.rng_seed, _SHOT_STREAM, self._calls])
        self._calls += 1
        estimates = single_sample_distances(
            sample, clusters, shots=self.shots, seed=seed, workers=self.workers
        )
        values: list[float] = []
        for j, estimate in enumerate(estimates):
            if estimate is None:
                raise InsufficientShotsError(
                    f"no readouts landed in the subspace of cluster {j} "
                    f"after {self.shots} shots; increase shots"
                )
            values.append(estimate.normalized)
        return values

    def evaluations_per_sample(self, num_clusters: int) -> int:
        return 1


def make_backend(config: TrainConfig):
    if config.backend == "classical":
        return ClassicalBackend()
    if config.backend == "quantum_exact":
        return QuantumExactBackend()
    return QuantumSampledBackend(config.shots, config.rng_seed, config.workers)


def select_bmu(distances: Iterable[float]) -> int:
    """Index of the smallest distance; ties go to the lowest index."""
    values = np.asarray(list(distances), dtype=float)
    if values.size == 0:
        raise ValueError("distance list is empty")
    if not np.all(np.isfinite(values)):
        raise ValueError("distances must be finite")
    return int(np.argmin(values))


def _rate_at(rate: float | Callable[[int], float], step: int) -> float:
    value = float(rate(step)) if callable(rate) else float(rate)
    if not 0.0 < value <= 1.0:
        raise ValueError(f"learning rate at step {step} must lie in (0, 1], got {value}")
    return value


def _neighborhood_factors(map_: ContinuousMap, bmu: int, step: int, config: TrainConfig) -> np.ndarray:
    if config.neighborhood == "delta":
        theta = np.zeros(map_.weights.shape[0])
        theta[bmu] = 1.0
        return theta
    width = config.gaussian_width(step) if callable(config.gaussian_width) else config.gaussian_width
    width = float(width)
    if width <= 0.0:
        raise ValueError(f"gaussian width at step {step} must be positive, got {width}")
    positions = map_.grid_positions()
    sq_dist = np.sum((positions - positions[bmu]) ** 2, axis=1)
    return np.exp(-sq_dist / (2.0 * width**2))


def continuous_update(
    map_: ContinuousMap,
    sample: Sequence[float],
    bmu: int,
    step: int,
    config: TrainConfig,
) -> ContinuousMap:
    """Move weights toward the sample by their neighborhood-scaled rate."""
    sample = np.asarray(sample, dtype=float)
    if sample.shape != (map_.weights.shape[1],):
        raise ValueError(f"sample shape {sample.shape} does not match weight dimension")
    if not 0 <= bmu < map_.weights.shape[0]:
        raise ValueError(f"bmu index {bmu} out of range")
    alpha = _rate_at(config.learning_rate, step)
    theta = _neighborhood_factors(map_, bmu, step, config)
    weights = map_.weights + (theta * alpha)[:, None] * (sample - map_.weights)
    return ContinuousMap(weights, map_.grid_shape)


def binary_update(cluster: BinaryVector, sample: BinaryVector) -> BinaryVector:
    """Flip the lowest-index mismatching bit of the cluster toward the sample."""
    if cluster.dimension != sample.dimension:
        raise ValueError(f"dimension mismatch: {cluster.dimension} vs {sample.dimension}")
    for position, (have, want) in enumerate(zip(cluster.bits, sample.bits)):
        if have != want:
            bits = list(cluster.bits)
            bits[position] = want
            return BinaryVector(tuple(bits))
    return cluster


def _epoch_order(config: TrainConfig, epoch: int, count: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence([config.rng_seed, _ORDER_STREAM, epoch]))
    return rng.permutation(count)


def train_epoch(
    map_: BinaryMap,
    samples: Sequence[BinaryVector],
    backend,
    config: TrainConfig,
    epoch: int = 0,
) -> tuple[BinaryMap, EpochTrace]:
    """One pass over every sample in a seed-fixed order.

    Each sample is labeled with its best matching cluster, which then takes a
    one-bit step toward it.  A step that would duplicate another cluster
    vector is skipped and recorded, since the distance circuit cannot encode
    duplicate cluster states.
    """
    samples = tuple(samples)
    if not samples:
        raise ValueError("samples must be non-empty")
    if any(s.dimension != map_.dimension for s in samples):
        raise ValueError("sample dimension does not match the map")
    clusters = list(map_.clusters)
    labels = [-1] * len(samples)
    skipped: list[tuple[int, int]] = []
    evaluations = 0
    for position in _epoch_order(config, epoch, len(samples)):
        position = int(position)
        sample = samples[position]
        distances = backend.distances(sample, clusters)
        evaluations += backend.evaluations_per_sample(len(clusters))
        bmu = select_bmu(distances)
        labels[position] = bmu
        updated = binary_update(clusters[bmu], sample)
        if updated == clusters[bmu]:
            continue
        if any(updated == other for k, other in enumerate(clusters) if k != bmu):
            skipped.append((position, bmu))
            continue
        clusters[bmu] = updated
    new_map = BinaryMap(tuple(clusters))
    trace = EpochTrace(
        epoch=epoch,
        labels=tuple(labels),
        clusters=new_map.clusters,
        distance_evaluations=evaluations,
        skipped=tuple(skipped),
    )
    return new_map, trace


def train(
    map_: BinaryMap, samples: Sequence[BinaryVector], config: TrainConfig
) -> list[EpochTrace]:
    """Run epochs until labels repeat between consecutive epochs or the cap.

    The trace list includes the confirming epoch; the final map is the
    cluster snapshot of the last trace.
    """
    backend = make_backend(config)
    traces: list[EpochTrace] = []
    previous: tuple[int, ...] | None = None
    current = map_
    for epoch in range(config.epochs):
        current, trace = train_epoch(current, samples, backend, config, epoch=epoch)
        traces.append(trace)
        if previous is not None and trace.labels == previous:
            break
        previous = trace.labels
    return traces


def converged(traces: Sequence[EpochTrace]) -> bool:
    return len(traces) >= 2 and traces[-1].labels == traces[-2].labels


def train_continuous(
    map_: ContinuousMap, samples: Sequence[Sequence[float]], config: TrainConfig
) -> tuple[ContinuousMap, list[tuple[int, ...]]]:
    """Euclidean training loop mirroring the binary one; returns label history."""
    data = [np.asarray(s, dtype=float) for s in samples]
    if not data:
        raise ValueError("samples must be non-empty")
    current = map_
    history: list[tuple[int, ...]] = []
    step = 0
    for epoch in range(config.epochs):
        labels = [-1] * len(data)
        for position in _epoch_order(config, epoch, len(data)):
            position = int(position)
            sample = data[position]
            distances = np.linalg.norm(current.weights - sample, axis=1)
            bmu = select_bmu(distances)
            labels[position] = bmu
            current = continuous_update(current, sample, bmu, step, config)
            step += 1
        history.append(tuple(labels))
        if len(history) >= 2 and history[-1] == history[-2]:
            break
    return current, history


def label_purity(labels: Sequence[int], tags: Sequence[str]) -> float:
    """Fraction of samples whose cluster's majority tag matches their own."""
    if len(labels) != len(tags) or not labels:
        raise ValueError("labels and tags must be non-empty and equally long")
    by_cluster: dict[int, Counter] = {}
    for label, tag in zip(labels, tags):
        by_cluster.setdefault(label, Counter())[tag] += 1
    majority = {
        label: sorted(counts.items(), key=lambda item: (-item[1], item[0]))[0][0]
        for label, counts in by_cluster.items()
    }
    matched = sum(1 for label, tag in zip(labels, tags) if majority[label] == tag)
    return matched / len(labels)


def traces_to_jsonl(traces: Sequence[EpochTrace]) -> str:
    """One epoch per line.  Evaluation counts are serialized separately
    (:func:`evaluations_to_csv`) so traces from different backends compare
    byte-for-byte."""
    lines = [
        json.dumps(
            {
                "epoch": t.epoch,
                "labels": list(t.labels),
                "clusters": [str(c) for c in t.clusters],
                "skipped": [[i, j] for i, j in t.skipped],
            },
            separators=(",", ":"),
        )
        for t in traces
    ]
    return "\n".join(lines) + "\n"


def labels_to_csv(traces: Sequence[EpochTrace]) -> str:
    """Label matrix: rows are epochs, columns are samples."""
    if not traces:
        raise ValueError("no traces to serialize")
    count = len(traces[0].labels)
    lines = ["epoch," + ",".join(str(i) for i in range(count))]
    for t in traces:
        lines.append(f"{t.epoch}," + ",".join(str(v) for v in t.labels))
    return "\n".join(lines) + "\n"


def evaluations_to_csv(traces: Sequence[EpochTrace]) -> str:
    lines = ["epoch,distance_evaluations"]
    for t in traces:
        lines.append(f"{t.epoch},{t.distance_evaluations}")
    return "\n".join(lines) + "\n"


def clusters_to_csv(map_or_clusters: BinaryMap | Sequence[BinaryVector]) -> str:
    clusters = map_or_clusters.clusters if isinstance(map_or_clusters, BinaryMap) else tuple(map_or_clusters)
    lines = ["cluster,vector"]
    for index, vector in enumerate(clusters):
        lines.append(f"{index},{vector}")
    return "\n".join(lines) + "\n"
