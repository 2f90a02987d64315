"""Crossing prediction and elimination for transverse-field anneals of
maximum independent set instances: exact cost-landscape enumeration,
second-order perturbation theory for the level structure near the end of
the anneal, exact spectral verification, and driver assignments that
certifiably remove avoided crossings.
"""

from .graph import (
    Graph,
    GraphParseError,
    MinimaCatalog,
    degenerate_neighbors,
    enumerate_maximal_independent_sets,
    from_edges,
    generate_graph,
    greedy_repair,
    parse_graph,
)
from .model import (
    AnnealInstance,
    DriverField,
    IsingProblem,
    apply_hamiltonian,
    build_problem_hamiltonian,
    classical_energy,
    flip_cost,
    hamiltonian_matvec,
)
from .perturb import (
    LAMBDA_CRITICAL,
    DegenerateManifold,
    DegeneratePartnerWarning,
    EffectiveSecondOrder,
    NotMaximalError,
    PredictedCrossing,
    degenerate_effective_matrix,
    energy_to_second_order,
    full_manifold,
    minima_manifold,
    predict_crossing,
    predict_crossing_manifolds,
    qth_order_coefficient,
    second_order_nondegenerate,
    sufficient_condition_F,
)
from .spectrum import (
    CrossingObservation,
    SolverConvergenceError,
    SpectrumTrace,
    default_grid,
    detect_anticrossing,
    eigensolve_lowest,
    min_gap,
    swap_verdict,
    sweep,
)
from .strategy import (
    AvoidResult,
    StrategyOutcome,
    alpha_assignment,
    beta_assignment,
    iterative_avoid,
    scale_c,
)

__version__ = "0.1.0"
