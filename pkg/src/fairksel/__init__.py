"""Fair k-set selection: exact solvers, LP lower bounds, randomized roundings.

Select k candidate sets from a weighted set system (equivalently, k vertices
from one side of a bipartite graph) so that the maximum weighted occurrence
over elements, the *disagreement*, is as small as possible.
"""

from .core import (
    DegreeProfile,
    Instance,
    InstanceError,
    PreprocessResult,
    Selection,
    as_selection,
    candidate_adjacency,
    degree_profile,
    instance_from_dict,
    instance_from_sets,
    load_instance,
    make_instance,
    max_disagreement,
    preprocess,
    save_instance,
    validate,
)
from .exact import (
    LaminarError,
    LaminarTree,
    OracleCapError,
    RBComponent,
    RBVertex,
    RedBlueError,
    RedBlueInstance,
    brute_force_opt,
    build_laminar_tree,
    candidate_values,
    detect_laminar,
    laminar_dp,
    max_vertex_set,
    red_blue,
    solve_delta2_unweighted,
    solve_delta2_weighted,
    solve_laminar,
)
from .lp import (
    DoublingResult,
    FractionalSolution,
    LpSolverError,
    NormalizedInstance,
    check_feasible,
    doubling,
    guess_tstar_unweighted,
    normalize,
    residuals,
    trim_to_demand,
)
from .rounding import (
    BadEventSystem,
    FeasibilityEvent,
    PerformanceEvent,
    ResampleBudgetError,
    RoundingError,
    TrialStats,
    build_bad_events,
    dependency_adjacency,
    independent_rounding,
    lll_rounding,
    make_rng,
    moser_tardos,
    pipage_rounding,
    run_trials,
)
from .gen import (
    GenSpec,
    gen_gap_instance,
    gen_incidence,
    gen_path_cycle,
    gen_random_bipartite,
    gen_random_laminar,
    generate,
)

__version__ = "0.1.0"
