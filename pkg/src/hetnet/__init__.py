"""Complete heteroclinic networks from cycle digraphs.

Builds minimal edge completions of two-cycle digraphs, realises them as
polynomial vector fields with one equilibrium per coordinate axis,
classifies the eigenvalue structure of each cycle, forms return-map
transition matrices for stability conditions, and verifies connections and
unstable-manifold containment by numerical integration.
"""

from .completion import (
    ClosureFailure,
    CompletionPlan,
    Direction,
    FailureKind,
    ForceCycle,
    TransversePrediction,
    check_completeness,
    complete_two_cycle,
    delta_closure_general,
    direction_of_minimum,
    exhaustive_minimality_oracle,
    is_complete,
    minimal_completion_count,
    predict_positive_transverse,
)
from .graphs import (
    CycleDecomposition,
    DeltaClique,
    DiGraph,
    VertexRole,
    decompose_two_cycles,
    enumerate_cycles,
    find_delta_cliques,
    is_strongly_connected,
    is_tournament,
    parse_graph,
    vertex_roles,
)
from .realisation import (
    EigenSpec,
    EigenvalueTable,
    Equilibrium,
    QuasiSimpleCycle,
    VectorField,
    build_vector_field,
    classify_eigenvalues,
    extract_quasi_simple_cycles,
    jacobian_at,
)
from .simulate import (
    ConnectionCheck,
    FanResult,
    IntegratorConfig,
    Trajectory,
    detect_extra_equilibrium,
    integrate,
    verify_completeness_numerically,
    verify_connection,
    verify_delta_clique,
)
from .stability import (
    ReturnMapProduct,
    StabilityVerdict,
    TransitionMatrix,
    Verdict,
    basic_transition_matrix,
    dominant_eigenvalue,
    house_case_a_check,
    house_case_b_check,
    return_map_products,
    transition_matrices,
    verdict,
)

__version__ = "0.1.0"
