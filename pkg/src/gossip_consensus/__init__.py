"""Unconstrained gossip consensus: simulation and exact absorbing-Markov-chain analysis."""

__version__ = "0.1.0"

from .errors import (
    CapExceededError,
    GossipError,
    InfeasibleDensityError,
    SingularMatrixError,
    StructuralError,
)
from .gossip import (
    PROPORTIONAL,
    AdoptionMatrix,
    ConflictResolver,
    ProportionalSelection,
    TransmissionMatrix,
    apply_adoption,
    enumerate_adoptions,
    enumerate_transmissions,
    is_consensus,
    proportional_select,
    sample_transmission,
)
from .graph import (
    DirectedGraph,
    density,
    from_edge_list,
    generate,
    has_directed_spanning_tree,
    is_directed_ring,
    random_at_density,
)
from .markov import (
    AbsorptionReport,
    CanonicalForm,
    MarkovChain,
    absorption_probabilities,
    absorption_time_variance,
    analyze,
    build_chain,
    canonicalize,
    distribution_at_time,
    enumerate_states,
    expected_absorption_time,
    fundamental_matrix,
    is_absorbing_chain,
    markov_tail_bound,
)
from .simulator import SimulationConfig, SimulationOutcome, run_experiment, run_replication, sweep_initial_states
