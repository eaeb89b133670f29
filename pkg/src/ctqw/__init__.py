"""Continuous-time quantum walks on edge-weighted graphs.

Forward evolution and time-averaged distributions, spectral analysis with
distinct-eigenvalue grouping, and closed-form inverse solvers that pick edge
weights and a time at which the walk on a star or complete multipartite graph
hits any requested probability distribution exactly.
"""

from .analysis import (
    AverageMixingBound,
    AverageTargetVerdict,
    CompleteGraphUniformMixing,
    MixingReport,
    MixingTimeSet,
    average_mixing_bound,
    average_universal_verdict,
    complete_graph_uniform_condition,
    hypercube_mixing_times,
    intersect_mixing_times,
    product_uniform_mixing,
    target_mixing_scan,
    uniform_mixing_scan,
)
from .graphs import (
    FAMILIES,
    PartitionedGraph,
    WeightedGraph,
    build_family,
    cartesian_product,
    graph_from_json,
    graph_to_json,
    is_connected,
    load_graph,
    multipartite_cells,
    save_graph,
    scale_weights,
)
from .solvers import (
    CollapsedSystem,
    InfeasibleTargetError,
    MixingSolution,
    SolverVerificationError,
    bipartite_reduction_cells,
    claw_reduction_cells,
    collapse,
    solve_bipartite,
    solve_claw,
    solve_multipartite,
    solve_p3,
)
from .spectral import (
    SpectralDecomposition,
    decompose,
    decompose_matrix,
    projector,
    projectors,
    spectral_type,
)
from .walk import (
    Distribution,
    WalkState,
    as_distribution,
    average_distribution,
    distributions_at_times,
    evolve,
    instantaneous_distribution,
    numerical_time_average,
    propagate,
    sup_distance,
    trajectory,
)

__version__ = "0.1.0"
