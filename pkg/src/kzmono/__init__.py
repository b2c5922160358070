"""Connections on tensor invariants over configuration space: exact
flatness certificates, braid monodromy by parallel transport, quadratic
current-mode operators on graded module truncations, residue pairing
identities, and fusion-rule rank computations for sl2."""

from .errors import (
    ConfigurationError,
    ConsistencyError,
    DomainError,
    KzmonoError,
    ShapeError,
    SingularityError,
    ViolationError,
)
from .liealg import (
    LieAlgebra,
    OrthonormalBasis,
    bracket,
    build_algebra,
    killing_form,
    level_weights,
    orthonormal_basis,
    weight_form,
)
from .reps import (
    CasimirReport,
    Irrep,
    casimir,
    casimir_value,
    irrep,
    tensor_decompose,
    weyl_dimension,
)
from .invariants import (
    InvariantSpace,
    TensorSystem,
    TwoSiteOperator,
    invariant_basis,
    omega_pair,
    restrict,
    tensor_system,
)
from .kz import (
    ArcSegment,
    ConfigPath,
    HolonomyResult,
    KZSystem,
    LineSegment,
    braid_generator_path,
    braid_monodromy,
    compose,
    connection_matrix,
    default_basepoint,
    eigenvalue_check,
    flatness_residual,
    kz_system,
    parallel_transport,
    path_through,
)
from .sugawara import (
    TruncatedModule,
    VirasoroOperator,
    affine_bracket_check,
    central_charge,
    conformal_weight,
    graded_character,
    graded_weights,
    ln_operator,
    lx_commutator_check,
    truncated_module,
    virasoro_bracket_check,
)
from .symbols import (
    FormalField,
    LaurentGVector,
    cocycle_cross,
    cocycle_evaluation,
    random_laurent_vector,
    residue_side,
    symbol_pairing,
)
from .verlinde import (
    FusionRing,
    compare_invariants,
    fusion_ring,
    rank,
    rank_smatrix,
)

__version__ = "0.1.0"
