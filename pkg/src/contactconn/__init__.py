"""Canonical connections for sub-Riemannian contact structures on
coordinate charts: exact order-2 jet arithmetic, chart-level exterior
calculus, adapted frames, the canonical partial connection and its
promotion, the classical 3-dimensional comparison, and a deterministic
verification CLI.
"""

from .connection import (
    FrameSection,
    FullConnection,
    PartialConnection,
    TorsionTensor,
    base_partial_connection,
    canonical_partial_connection,
    frame_oneform,
    frame_tensor02,
    frame_vector,
    full_torsion,
    nabla_H,
    partial_torsion,
    promote,
    promotion_residual,
    sigma,
    sigma_inv,
)
from .contact import (
    AdaptedFrame,
    ContactCheck,
    ContactStructure,
    LambdaSpectrum,
    adapted_frame,
    check_contact,
    classify,
    lambda_spectrum,
    normalize_theta,
    reeb_field,
)
from .errors import (
    AllPointsSkippedError,
    ContactConnError,
    DegenerateFrameError,
    DegenerateMetricError,
    ExprDomainError,
    InconsistentStructureError,
    LinearSolveResidualError,
    NotContactError,
    ParseError,
    SingularMatrixError,
    SpecError,
    SuiteUnavailableError,
    SymmetryError,
    UnknownIdentifierError,
    UnknownManifoldError,
)
from .expressions import Expr, parse_expr, pretty
from .forms import (
    FormField,
    KFormValue,
    VectorValue,
    apply_vector,
    d_from_jets,
    exterior_derivative,
    express_in_coframe,
    from_coframe,
    interior_product,
    wedge,
)
from .jets import Jet, eval_jet, jet_linear_solve
from .registry import (
    ManifoldSpec,
    builtin_registry,
    get_manifold,
    load_spec,
)
from .report import PointRecord, Report, SuiteResult, render_report
from .sampling import SplitMix64, sample_box
from .suites import run_suites
from .tw3d import (
    TWCoframe,
    TWData,
    check_rotation_covariance,
    compare_full,
    compare_partial,
    promoted_from_invariants,
    rotate_coframe,
    solve_structure_equations,
    tw_coframe,
    tw_connection,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptedFrame",
    "AllPointsSkippedError",
    "ContactCheck",
    "ContactConnError",
    "ContactStructure",
    "DegenerateFrameError",
    "DegenerateMetricError",
    "Expr",
    "ExprDomainError",
    "FormField",
    "FrameSection",
    "FullConnection",
    "InconsistentStructureError",
    "Jet",
    "KFormValue",
    "LambdaSpectrum",
    "LinearSolveResidualError",
    "ManifoldSpec",
    "NotContactError",
    "ParseError",
    "PartialConnection",
    "PointRecord",
    "Report",
    "SingularMatrixError",
    "SpecError",
    "SplitMix64",
    "SuiteResult",
    "SuiteUnavailableError",
    "SymmetryError",
    "TWCoframe",
    "TWData",
    "TorsionTensor",
    "UnknownIdentifierError",
    "UnknownManifoldError",
    "VectorValue",
    "adapted_frame",
    "apply_vector",
    "base_partial_connection",
    "builtin_registry",
    "canonical_partial_connection",
    "check_contact",
    "check_rotation_covariance",
    "classify",
    "compare_full",
    "compare_partial",
    "d_from_jets",
    "eval_jet",
    "express_in_coframe",
    "exterior_derivative",
    "frame_oneform",
    "frame_tensor02",
    "frame_vector",
    "from_coframe",
    "full_torsion",
    "get_manifold",
    "interior_product",
    "jet_linear_solve",
    "lambda_spectrum",
    "load_spec",
    "nabla_H",
    "normalize_theta",
    "parse_expr",
    "partial_torsion",
    "pretty",
    "promote",
    "promoted_from_invariants",
    "promotion_residual",
    "render_report",
    "reeb_field",
    "rotate_coframe",
    "run_suites",
    "sample_box",
    "sigma",
    "sigma_inv",
    "solve_structure_equations",
    "tw_coframe",
    "tw_connection",
    "wedge",
]
