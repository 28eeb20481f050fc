"""Ladder operators without a vacuum and their coherent states, with the
graphene Dirac-point Hamiltonian as the worked instance."""

from .spectra import (
    Deformation,
    IndexWindow,
    Spectrum,
    assert_strictly_increasing,
    deform_spectrum,
    eval_spectrum,
    shift_spectrum,
)
from .ladder import (
    BandedOperator,
    BoundaryError,
    FactorizationError,
    LadderCoefficients,
    TruncatedVector,
    apply_lowering,
    apply_lowering_adjoint,
    apply_raising,
    apply_raising_adjoint,
    build_matrix,
    commutator_ab_gap,
    factorization_residual,
)
from .doubled import (
    CompatibilityError,
    DoubledVector,
    ThetaSequence,
    apply_A,
    apply_A_adjoint,
    apply_A_tilde,
    apply_block_A,
    build_R,
    check_compatibility,
    commutator_AAdag_diag,
    make_phi,
    nontotality_witness,
    theta_from_coeffs,
)
from .coherent import (
    CoherentState,
    RadialMeasure,
    Radius,
    build_coherent,
    eigen_residual,
    moment_residual,
    normalization,
    radius_of_convergence,
    resolution_residual,
    saturation_check,
    uncertainty_product,
)
from .graphene import (
    GrapheneParams,
    build_HK_fock,
    coefficients_for_choice,
    fock_eigencheck,
    graphene_spectrum,
    landau_energy,
    map_phi_index,
)

__version__ = "0.1.0"
