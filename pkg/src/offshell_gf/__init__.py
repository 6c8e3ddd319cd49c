"""Closed forms, cross-checks and oracles for the even/retarded Green
function of the 5D off-shell wave operator (-d^2/dt^2 + laplacian +
d^2/dtau^2, signature (+) fifth coordinate; the signature (-) operator is
carried only by the principal-value family).

The package keeps every published route to the same object alive side by
side -- closed forms, a two-piece fifth-momentum split, a
mass-superposition route, and a brute-force momentum-space oracle -- and
reports where they agree and where the printed forms disagree, rather
than silently picking one.  See report.reconciliation_report for the
adjudication summary.
"""

__version__ = "0.1.0"

from .backend import BACKEND
from .core import (
    EPS_CONE,
    BudgetExceededError,
    DegenerateError,
    DomainError,
    Event5,
    GFError,
    Invariants,
    NoConvergenceError,
    NonIntegrableError,
    OnSingularSupportError,
    QuadSpec,
    Region5,
    Signature,
    UndefinedAtTauZeroError,
    classify,
    invariants,
)
from .distributions import (
    GAUSSIAN,
    POLY_BUMP,
    PairingResult,
    TestFunction,
    pair_canonical,
    pair_lightcone_delta,
    pair_lh_published,
    pair_regularized_limit,
    pair_smooth,
)
from .fields import (
    STATIC_GAUSSIAN,
    UNIFORM_WORLDLINE,
    CurrentModel,
    FieldGrid,
    FieldResult,
    ResidualResult,
    convolve_retarded,
    residual,
)
from .greens import (
    GFVariant,
    I_closed,
    I_quadrature,
    eval_canonical,
    eval_g1_g2,
    eval_k5_route,
    eval_lh_principal,
    eval_oh_published,
    eval_retarded,
    eval_slice,
)
from .kgroute import (
    KGForm,
    bessel_identity_integral,
    eval_kg,
    pair_m_integration,
)
from .oracle import fourier_pairing, j_reference, k0_principal_residues, k0_pv_quadrature
from .report import (
    RunConfig,
    RUNNERS,
    acceptance_suite,
    config_hash,
    reconciliation_report,
)

__all__ = [
    "__version__",
    "BACKEND",
    "EPS_CONE",
    "GFError",
    "NonIntegrableError",
    "BudgetExceededError",
    "NoConvergenceError",
    "OnSingularSupportError",
    "DegenerateError",
    "UndefinedAtTauZeroError",
    "DomainError",
    "Event5",
    "Invariants",
    "Region5",
    "Signature",
    "QuadSpec",
    "classify",
    "invariants",
    "GAUSSIAN",
    "POLY_BUMP",
    "TestFunction",
    "PairingResult",
    "pair_canonical",
    "pair_regularized_limit",
    "pair_lightcone_delta",
    "pair_lh_published",
    "pair_smooth",
    "GFVariant",
    "eval_canonical",
    "eval_retarded",
    "eval_lh_principal",
    "eval_oh_published",
    "eval_k5_route",
    "eval_g1_g2",
    "eval_slice",
    "I_closed",
    "I_quadrature",
    "KGForm",
    "eval_kg",
    "pair_m_integration",
    "bessel_identity_integral",
    "fourier_pairing",
    "j_reference",
    "k0_principal_residues",
    "k0_pv_quadrature",
    "STATIC_GAUSSIAN",
    "UNIFORM_WORLDLINE",
    "CurrentModel",
    "FieldGrid",
    "FieldResult",
    "ResidualResult",
    "convolve_retarded",
    "residual",
    "RunConfig",
    "RUNNERS",
    "acceptance_suite",
    "config_hash",
    "reconciliation_report",
]
