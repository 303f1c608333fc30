"""Lyapunov exponents, Kaplan-Yorke dimension, and the exact dimension
formula (with its condition checker and certificate machinery) for the Lorenz
system."""

from ._backend import BACKEND
from .errors import (
    DegenerateQuadratic,
    HorizonTooShort,
    LyapdimError,
    NoCertificate,
    NonFiniteState,
    OverflowRisk,
    RhoUndefined,
)
from .integrate import (
    IntegratorConfig,
    advance_augmented,
    advance_state,
    step_augmented,
    step_state,
    trajectory,
)
from .lyap import (
    FiniteTimeDim,
    GridDimension,
    LeSpectrum,
    kaplan_yorke,
    le_spectrum_qr,
    le_spectrum_svd,
    local_dimension,
    set_dimension_grid,
)
from .model import (
    EquilibriumSet,
    SystemParams,
    absorbing_ball,
    equilibria,
    jacobian,
    sample_absorbing_ball,
    vdot_dissipativity,
    vector_field,
)
from .scan import (
    AxisSpec,
    ChaosProbeReport,
    ScanCell,
    ScanRequest,
    chaos_probe,
    read_cells_csv,
    run_scan,
    write_cells_csv,
)
from .theory import (
    CASE_A,
    CASE_B,
    CONDITIONS_FAIL,
    CONVERGES_TO_EQUILIBRIA,
    FORMULA_HOLDS,
    GammaCertificate,
    TheoremVerdict,
    check_conditions,
    find_gamma_certificate,
    gamma_quadratic_roots,
    lemma2_domain_check,
    leonov_formula,
    origin_eigenvalues,
    r_star_search,
    s_zero,
    symmetrized_eigenvalues,
    verify_R_nonpositive,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "LyapdimError",
    "NonFiniteState",
    "HorizonTooShort",
    "OverflowRisk",
    "RhoUndefined",
    "NoCertificate",
    "DegenerateQuadratic",
    "SystemParams",
    "EquilibriumSet",
    "vector_field",
    "jacobian",
    "equilibria",
    "vdot_dissipativity",
    "absorbing_ball",
    "sample_absorbing_ball",
    "IntegratorConfig",
    "step_state",
    "step_augmented",
    "advance_state",
    "advance_augmented",
    "trajectory",
    "LeSpectrum",
    "FiniteTimeDim",
    "GridDimension",
    "le_spectrum_qr",
    "le_spectrum_svd",
    "kaplan_yorke",
    "local_dimension",
    "set_dimension_grid",
    "FORMULA_HOLDS",
    "CONVERGES_TO_EQUILIBRIA",
    "CONDITIONS_FAIL",
    "CASE_A",
    "CASE_B",
    "TheoremVerdict",
    "GammaCertificate",
    "origin_eigenvalues",
    "leonov_formula",
    "s_zero",
    "check_conditions",
    "gamma_quadratic_roots",
    "symmetrized_eigenvalues",
    "find_gamma_certificate",
    "verify_R_nonpositive",
    "lemma2_domain_check",
    "r_star_search",
    "AxisSpec",
    "ScanRequest",
    "ScanCell",
    "run_scan",
    "write_cells_csv",
    "read_cells_csv",
    "chaos_probe",
    "ChaosProbeReport",
    "__version__",
]
