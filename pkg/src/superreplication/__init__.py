"""Deterministic super-replication of one-parameter diagonal unitaries.

From N uses of U(theta) = |0><0| + exp(-i theta)|1><1| the protocol builds an
operation close to U(theta)^{(x)M} with M ~ N^2, by routing the phases of
the typical Hamming-weight sectors onto an ancilla register.
"""
from .combinatorics import (
    binomial_weights,
    bulk_mass,
    gaussian_bulk_estimate,
    log_binomial,
    multinomial_bulk_mass,
)
from .emulation import (
    QuditEvolution,
    QuditSpec,
    bang_bang_effective_spectrum,
    emulate_qubits_from_qudit,
    ladder_spec,
    min_ancilla_count,
    single_use_super_replication,
)
from .errors import ConsistencyError, DomainError, UnsupportedScaleError
from .metrology import (
    SymmetricState,
    bulk_state,
    ghz_state,
    plus_state,
    precision_resource_table,
    qfi,
    state_fidelity_under_protocol,
)
from .oracle import (
    DenseState,
    PermutationSpec,
    apply_protocol_statevector,
    build_permutation_A,
    choi_overlap_bruteforce,
    ideal_action,
)
from .protocol import (
    FidelityReport,
    GammaPolicy,
    ReplicationConfig,
    SectorPhaseMap,
    average_process_fidelity,
    average_state_fidelity,
    build_sector_map,
    fidelity_sweep,
    plan_for_budget,
    plan_replication,
    process_fidelity,
    uniform_thetas,
    worst_case_bound,
)

__version__ = "0.1.0"
