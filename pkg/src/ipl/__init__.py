"""Isospectrally patterned lattices: spectra, continuum limit, localization."""

from .analysis import (
    ComparisonReport,
    LocalizationReport,
    StateRecord,
    cell_participation_ratio,
    compare_discrete_continuum,
    gaussian_width,
    ground_state_index,
    localization_scan,
    participation_ratio,
)
from .continuum import (
    ContinuumParams,
    GridOperator,
    PolyGaussianSpinor,
    RecurrenceState,
    SpectrumLevel,
    analytic_spectrum,
    apply_h_coeff,
    build_eigenstate,
    closed_form_state,
    derive_params,
    discretize_linear,
    discretize_nonlocal,
    grid_eigensystem,
    localization_length,
    localization_length_cells,
    lowest_physical_levels,
    params_from_lambda_g,
    recurrence_matrix,
    recurrence_matrix_eigs,
    recurrence_step,
)
from .eig import EigenSystem, eig_sym, eigen_residuals, jacobi_eigh
from .errors import (
    ConsistencyError,
    DegenerateCellError,
    IplError,
    MissingPartnerError,
    MissingStateError,
    SingularPointError,
    SymmetryViolationError,
    ValidationError,
)
from .lattice import (
    AngleProfile,
    BlockTridiagonal,
    LatticeSpec,
    build_full_hamiltonian,
    build_reduced_hamiltonian,
    equidistant_angles,
)
from .symmetry import (
    SymmetryReport,
    apply_parity_sigma_x,
    apply_v_coeff,
    chiral_grid_spectrum,
    discretize_chiral,
    ode_residual,
    partner_state,
    reflected_eigenstate,
    symmetry_report,
    v_spectrum,
)

__version__ = "0.1.0"
