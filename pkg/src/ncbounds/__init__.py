"""Deterministic Cramér-Rao bounds for R-D frequency estimation with
strictly non-circular (rectilinear) sources.

The package computes the conditional bound for arbitrary signals, its
counterpart for strictly non-circular sources, a brute-force
Fisher-information oracle that must agree with the closed form, and the
analytic two-source expressions behind the NC gain.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundKind,
    BoundResult,
    FimBlocks,
    GramMatrices,
    det_crb,
    det_nc_crb,
    fim_assemble,
    fim_dense,
    fim_dense_from_gmatrix,
    fim_mu_block_inverse,
    gh_matrices,
    projector_complement,
)
from .closed_form import (
    AlphaBetaGamma,
    TwoSourceParams,
    alpha_beta_gamma,
    nc_crb_limit_zero_sep,
    nc_gain,
    single_source_nc_crb,
    single_source_ula_nc_crb,
    two_groups_decoupling_check,
    two_source_crb,
    two_source_nc_crb,
)
from .geometry import (
    CenteredDecomposition,
    SamplingGrid,
    SteeringSet,
    build_steering_set,
    center_grid,
    is_centro_symmetric,
    phase_reference,
    steering_vector_mode,
    ula,
    uniform_grid,
)
from .linalg import SingularFactorError, block_inverse_3x3, complex_inverse_split
from .resolvability import ResolvabilityReport, max_resolvable, scan_table
from .signals import (
    SnapshotMatrix,
    SourceScenario,
    SymbolBlock,
    coherent_symbols,
    effective_snr,
    empirical_correlation,
    exact_covariance_symbols,
    generate_symbols,
    rotate_symbols,
    rotated_covariance,
    sample_covariance,
    sigma2_from_snr_db,
    synthesize_snapshots,
    unit_power_symbols,
)
