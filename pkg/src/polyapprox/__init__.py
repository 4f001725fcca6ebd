"""Inner and outer polyhedral approximation of linear images of convex bodies."""

from .benson_dual import (
    coupling_phi,
    dual_point_Dstar,
    dual_to_primal_inner,
    initialize_dual_outer,
    run_dual,
    weight_map_w,
)
from .benson_primal import initialize_outer, run_primal
from .convexprog import (
    Affine,
    Max,
    Norm2,
    ProblemInstance,
    Quad,
    ScalarSolution,
    evaluate,
    find_slater_point,
    restore_feasibility,
    solve_p1,
    solve_p2,
    subgradient,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    Halfspace,
    Polyhedron,
    VRep,
    contains_point,
    dd_add_halfspace,
    dd_h_to_v,
    project_drop_last,
    slice_by_hyperplane,
    v_to_h,
)
from .instances import (
    EXAMPLE_NAMES,
    gen_ball_cpp,
    gen_dual_tight_cpp,
    gen_dual_tight_mocp,
    gen_primal_tight_cpp,
    gen_primal_tight_mocp,
    gen_random_polytope_cpp,
    worst_case_example,
)
from .linprog import LpProblem, LpSolution, LpStatus, solve_lp
from .metrics import DistanceReport, dist_point_to_polytope, hausdorff_nested, hausdorff_sampled, hausdorff_upper_sets
from .projection import (
    approximate_body,
    build_mocp,
    extract_Y,
    polyhedral_image,
    upper_image_reference,
)
from .result import ApproxResult, error_bound

__version__ = "0.1.0"
