"""Break minimization for round-robin tournaments as a QUBO, plus classical
samplers, minor-embedding tools, and a reproducible experiment harness."""

from .schedule import (
    HAAssignment,
    Kind,
    Timetable,
    ValidationReport,
    count_breaks,
    kirkman_rrt,
    lower_bound,
    mirror,
    random_drrt,
    random_mdrrt,
    shuffle_slots,
    validate,
    validate_assignment,
)
from .qubo import (
    IsingModel,
    PairIndex,
    Qubo,
    SourceGraph,
    VariableMap,
    build_pairs,
    build_qubo,
    decode,
    degree_stats,
    encode,
    qubo_to_ising,
    source_graph,
)
from .solver import (
    AnnealConfig,
    CapacityError,
    SampleRecord,
    SampleSet,
    energy,
    exhaustive_solve,
    local_search,
    simulated_annealing,
    time_to_target,
)
from .embedding import (
    Embedding,
    EmbeddingStats,
    HardwareGraph,
    chimera_graph,
    embedding_stats,
    find_embedding,
    pegasus_graph,
    verify_embedding,
)
from .penalty import (
    FeasibilityStats,
    feasibility_experiment,
    permutation_qubo,
    violated_constraints,
)

__all__ = [name for name in dir() if not name.startswith("_")]
