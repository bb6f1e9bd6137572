"""Stability constants, shadow solutions and worst-case forcing for linear
constant-coefficient recurrences in finite-dimensional real or complex spaces.
"""

from .adversary import SharpnessReport, sharpness_experiment, worst_forcing, worst_trajectory
from .constants import (
    ConstantKind,
    ConstantResult,
    best_constant,
    classical_constant,
    closed_form_small_order,
    tail_bound,
)
from .errors import (
    DegenerateRoots,
    IllConditionedWarning,
    InvalidLength,
    MissingForcing,
    NonConvergence,
    NotApplicable,
    NotUlamStable,
    TolUnreachable,
    TooLarge,
    UlamError,
)
from .oracle import OracleConfig, det_bruteforce, reference_sum, vandermonde_matrix
from .recurrence import (
    Field,
    Forcing,
    Norm,
    RecurrenceSpec,
    RootConfig,
    RootSet,
    SpectralClass,
    ToleranceConfig,
    Trajectory,
    characteristic_roots,
    classify_roots,
    residuals,
    sequence_norms,
    simulate,
)
from .shadowing import (
    ShadowResult,
    VerificationReport,
    homogeneous_trajectory,
    shadow_coefficients,
    shadow_direct,
    verify_shadow,
)
from .summation import CompensatedSum
from .vandermonde import (
    AlternatingTerm,
    SolveResult,
    VandermondeData,
    alternating_term,
    alternating_terms,
    build,
    particular_solution,
    series_response,
    solve_vandermonde,
)

__version__ = "0.1.0"

__all__ = [
    "AlternatingTerm",
    "CompensatedSum",
    "ConstantKind",
    "ConstantResult",
    "DegenerateRoots",
    "Field",
    "Forcing",
    "IllConditionedWarning",
    "InvalidLength",
    "MissingForcing",
    "NonConvergence",
    "Norm",
    "NotApplicable",
    "NotUlamStable",
    "OracleConfig",
    "RecurrenceSpec",
    "RootConfig",
    "RootSet",
    "SharpnessReport",
    "ShadowResult",
    "SolveResult",
    "SpectralClass",
    "TolUnreachable",
    "ToleranceConfig",
    "TooLarge",
    "Trajectory",
    "UlamError",
    "VandermondeData",
    "VerificationReport",
    "alternating_term",
    "alternating_terms",
    "best_constant",
    "build",
    "characteristic_roots",
    "classical_constant",
    "classify_roots",
    "closed_form_small_order",
    "det_bruteforce",
    "homogeneous_trajectory",
    "particular_solution",
    "reference_sum",
    "residuals",
    "sequence_norms",
    "series_response",
    "sharpness_experiment",
    "shadow_coefficients",
    "shadow_direct",
    "simulate",
    "solve_vandermonde",
    "tail_bound",
    "vandermonde_matrix",
    "verify_shadow",
    "worst_forcing",
    "worst_trajectory",
    "__version__",
]
