"""Partition-indexed tensor unfoldings and their operator norms."""

from .bounds import (
    InequalityReport,
    audit_corollaries,
    audit_main_theorem,
    audit_monotonicity,
    audit_one_step,
    audit_pq_sandwich,
    block_overlap_dim,
    dim_map,
    main_theorem_factors,
)
from .errors import *  # noqa: F401,F403
from .norms import (
    AscentConfig,
    NormEstimate,
    alternating_ascent,
    dual_exponent,
    landscape,
    matrix_spectral_exact,
    norm_order1,
    warm_start_lift,
)
from .odeco import (
    OdecoFactors,
    check_spectral_is_lambda1,
    check_upper_cone_equality,
    compose,
    generate_pi_od,
    verify_pi_od,
)
from .partitions import (
    Partition,
    canonicalize,
    cover_edges,
    enumerate_level,
    enumerate_partitions,
    is_refinement,
    meet,
    upper_cone,
)
from .tensor import (
    Tensor,
    frobenius,
    inner_product,
    make_tensor,
    multilinear_apply,
    multilinear_matrix_mult,
    outer_rank1,
    refold,
    unfold,
    unfold_index,
)

__version__ = "0.1.0"
