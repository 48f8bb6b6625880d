"""Finite stochastic systems, their Hilbert-space representation, and unistochastic dilation."""
from .analysis import (
    DivisibilityReport,
    UnistochasticityResult,
    check_markov_chain,
    check_markov_triple,
    classify_unistochastic,
    is_doubly_stochastic,
    search_unistochastic,
    solve_divisibility,
    unistochastic_verdict_3x3,
    unistochastic_witness_2x2,
)
from .config import TOL, Limits, Tolerances
from .core import (
    RandomVariable,
    StochasticSystem,
    TimeGrid,
    ValidationReport,
    Violation,
    evolve_probabilities,
    expectation,
    validate_system,
)
from .dilation import (
    DilatedSystem,
    DilatedUnitary,
    PartialIsometry,
    build_partial_isometry,
    complete_to_unitary,
    dilate_system,
    dilated_dictionary_probability,
    dilated_transition_matrix,
    subsystem_marginals,
    verify_marginalization,
)
from .generators import (
    FiniteRDS,
    PermutationSpec,
    hamiltonian_from_permutation,
    markov_chain_system,
    permutation_power_interpolation,
    permutation_unistochastic_system,
    random_stochastic_system,
    rds_to_stochastic_system,
)
from .hilbert import (
    DensityMatrix,
    EvolutionOperator,
    KrausSet,
    ObservableMatrix,
    apply_channel,
    born_probability,
    build_evolution_operator,
    classical_wavefunction,
    dictionary_probability,
    evolve_density,
    expectation_trace,
    initial_density,
    kraus_from_evolution,
    observable_matrix,
)

__version__ = "0.1.0"
