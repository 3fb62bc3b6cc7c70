"""Deterministic compressed sensing matrices from pairwise balanced designs."""

from .analysis import (
    CoherenceReport,
    analyze,
    epsilon_equiangular,
    inner_product_extremes,
    is_etf,
    is_tight,
    mip,
    packing_bound,
    recoverability_t,
    theoretical_bounds,
    welch_bound,
)
from .designs import (
    Design,
    gen_affine_plane,
    gen_pbd_exact_cover,
    gen_projective_plane,
    gen_sts_bose,
    greedy_packing,
    read_design,
    stats,
    validate,
    write_design,
)
from .frames import (
    FrameMatrix,
    build_con0,
    build_con1,
    build_mub_extended,
    normalize_rows,
    read_frame,
    write_frame,
)
from .planner import BlockType, PlanResult, plan_integer, plan_rational
from .recovery import bp_solve, l0_oracle, omp_solve, run_trials

__version__ = "0.1.0"
