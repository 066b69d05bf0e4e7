"""Rate regions and coding simulations for source compression with a coded
helper: classical helpers, measured quantum helpers, and fully quantum
helpers with entanglement assistance."""

__version__ = "0.1.0"

from .config import TOL, Tolerances, apply_overrides
from .entropy import (
    classical_conditional_entropy,
    classical_mutual_information,
    cond_vn,
    holevo,
    mutual_info,
    pure_subsystem_entropy,
    shannon,
    von_neumann,
)
from .linalg import (
    conjugate_std,
    eig_hermitian,
    kron,
    partial_trace,
    povm_from_factors,
    psd_sqrt,
    purify,
    random_density,
    random_isometry,
    random_povm,
    random_projective_povm,
)
from .measurement import PostMeasurementState, induced_joint, post_measurement_cq, rate_pair_qhelper
from .oracles import GridSpec, exact_tv, grid_search_chelper, grid_search_qubit_povm
from .regions import (
    ACHIEVABLE,
    NOT_DOMINATED,
    UNKNOWN,
    BoundaryCurve,
    ChannelWitness,
    IsometryWitness,
    PovmWitness,
    RatePoint,
    TestChannel,
    accessible_information,
    curve_min_r2_at,
    default_mu_grid,
    membership,
    merge_proportional_outcomes,
    pareto_filter,
    rate_point_chelper,
    rate_point_fq,
    rate_point_qhelper,
    recompute_rate_pair,
    separation_gap,
    trace_boundary_chelper,
    trace_boundary_fq,
    trace_boundary_qhelper,
)
from .codec import (
    BinningCode,
    SynthesisCodebook,
    build_binning_code,
    build_synthesis_codebook,
    helper_pipeline,
    sw_random_binning,
    synthesize_channel,
)
from .sources import (
    BipartiteSource,
    ClassicalJoint,
    CQSource,
    commuting_reduction,
    dump_source,
    helper_marginal,
    load_source,
    purified_bipartite,
)
