"""Disc-game embeddings and Hamiltonian replicator dynamics in latent space."""

from .payout import (
    PayoutMatrix,
    ValidationReport,
    mixed_payout,
    read_payout_csv,
    skew_symmetrize,
    validate_skew,
    write_payout_csv,
)
from .embedding import (
    DiscEmbedding,
    EquivalenceClasses,
    basis_project,
    canonical_rotation,
    embed,
    merge_equivalent,
    merged_payout,
    orthonormalize_basis,
    reconstruct,
    reconstruct_matrix,
    truncate,
    variance_shares,
)
from .hamiltonian import (
    Allee,
    GaussianUnit,
    LaplaceUnit,
    Linear,
    MetaSystem,
    ParticleCloud,
    ProductMarginals,
    ReplicatorSystem,
    Saturating,
    UniformInterval,
    grad_hamiltonian,
    hamiltonian,
    hess_hamiltonian,
    meta_hamiltonian,
    meta_rhs,
    system_from_json,
    system_to_json,
)
from .dynamics import (
    ParameterTrajectory,
    centroid_rhs_check,
    direct_replicator,
    integrate,
    integrate_meta,
    recurrence_return,
    rhs,
    step_implicit_midpoint,
)
from .closedform import (
    fictitious_self_play,
    gaussian_quadratic,
    laplace_oscillator,
    self_play,
    sga_epicycles,
    transitive_density,
)
from .special import (
    SpecialFnResult,
    elliptic_k,
    jacobi_sn_cn_dn,
    kelvin_ber0_bei0,
    kelvin_ber1_bei1,
    lambert_w,
    lambert_w_exp,
)
from .analysis import (
    Polygon2D,
    boundary_proximity,
    curl_cycle,
    dual_polygon,
    find_equilibrium,
    invert_centroid,
    linearization_frequencies,
    origin_in_hull_interior,
    period_estimate,
)
from .games import (
    IpdAgent,
    IpdConfig,
    ipd_fixation_payout,
    ipd_match,
    ipd_population,
    make_normal_form,
    make_quadratic,
    make_random_lowrank,
    make_transitive,
)
from . import errors

__version__ = "0.1.0"
