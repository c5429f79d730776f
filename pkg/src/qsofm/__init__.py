"""Binary self-organizing map with a simulated quantum Hamming-distance kernel."""

from .hamming import (
    BinaryVector,
    DistanceEstimate,
    DistanceMatrix,
    build_distance_circuit,
    classical_hamming,
    exact_distance_matrix,
    normalized_for_distance,
    prepare_state,
    random_distinct_vectors,
    recover_integer_distance,
    run_distance_circuit,
    sampled_distance_matrix,
    single_sample_distances,
)
from .qsim import (
    Circuit,
    Gate,
    GateKind,
    MeasurementSample,
    StateVector,
    apply_gate,
    cnot,
    compose_state,
    controlled_phase,
    exact_probabilities,
    hadamard,
    pauli_x,
    prepare_uniform_superposition,
    run_circuit,
    sample,
    sample_counts,
    zero_state,
)
from .sofm import (
    BinaryMap,
    ContinuousMap,
    EpochTrace,
    InsufficientShotsError,
    TrainConfig,
    binary_update,
    continuous_update,
    initial_map,
    label_purity,
    make_backend,
    random_binary_map,
    select_bmu,
    train,
    train_continuous,
    train_epoch,
)
from .textvec import (
    Corpus,
    Document,
    Vocabulary,
    build_vocabulary,
    load_corpus,
    sample_corpus,
    tokenize,
    vectorize,
)

__version__ = "0.1.0"
