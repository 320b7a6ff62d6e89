"""Recognition of stable and near-stable singularities of plane-to-plane maps.

The package computes, for a polynomial map germ f: (R^2, p) -> R^2, the
discriminant of its Jacobian and enough of its derivatives along the
kernel field to decide whether f at p is a fold, cusp, lips, beaks, or
swallowtail point, with explicit numerical margins.  On top of that it
traces singular sets over a box and analyses the first shock of a
two-component conservation law whose characteristic surfaces are
plane-to-plane maps of exactly this kind.
"""

from .conslaw import (
    BUILTIN_PROBLEMS,
    ConsLawProblem,
    FirstSingularity,
    Frame,
    ShapeOperator,
    SolverFailed,
    builtin_problem,
    characteristic_map,
    first_singularity,
    lips_birth_frames,
    shape_operator,
    singular_time_field,
    singularity_at,
    xi_autodiff,
    xi_closed_form,
)
from .germs import (
    BEAKS,
    BUILTIN_GERMS,
    CORANK_TWO,
    CUSP,
    DEFAULT_TOLERANCES,
    DEFINITE_CLASSES,
    DEGENERATE,
    FOLD,
    IMMERSION,
    LIPS,
    SWALLOWTAIL,
    UNRECOGNIZED,
    ClassificationReport,
    CorankTwoError,
    NotADiffeomorphism,
    NullField,
    PlaneMapGerm,
    ToleranceConfig,
    builtin_germ,
    classify,
    conjugate_by_diffeos,
    discriminant,
    null_field,
    rank_df,
)
from .jets import (
    BASE_MATCH_TOL,
    DEFAULT_ORDER_1D,
    DEFAULT_ORDER_2D,
    CompositionBasePointMismatch,
    InvalidJetCombination,
    InvalidSpec,
    Jet1,
    Jet2,
    JetOrderExhausted,
    compose_map,
    compose_univariate,
    poly_to_jet,
)
from .locus import (
    BoxDomain,
    CurveSample,
    NotRegularCurve,
    SpecialPoint,
    critical_value_image,
    find_special_points,
    ruling_map,
    sample_singular_set,
)
from .poly import Poly1, Poly2, poly_from_spec, poly_to_spec

__version__ = "0.1.0"

__all__ = [
    "BASE_MATCH_TOL",
    "BEAKS",
    "BUILTIN_GERMS",
    "BUILTIN_PROBLEMS",
    "BoxDomain",
    "CORANK_TWO",
    "CUSP",
    "ClassificationReport",
    "CompositionBasePointMismatch",
    "ConsLawProblem",
    "CorankTwoError",
    "CurveSample",
    "DEFAULT_ORDER_1D",
    "DEFAULT_ORDER_2D",
    "DEFAULT_TOLERANCES",
    "DEFINITE_CLASSES",
    "DEGENERATE",
    "FOLD",
    "FirstSingularity",
    "Frame",
    "IMMERSION",
    "InvalidJetCombination",
    "InvalidSpec",
    "Jet1",
    "Jet2",
    "JetOrderExhausted",
    "LIPS",
    "NotADiffeomorphism",
    "NotRegularCurve",
    "NullField",
    "PlaneMapGerm",
    "Poly1",
    "Poly2",
    "ShapeOperator",
    "SolverFailed",
    "SpecialPoint",
    "SWALLOWTAIL",
    "ToleranceConfig",
    "UNRECOGNIZED",
    "builtin_germ",
    "builtin_problem",
    "characteristic_map",
    "classify",
    "compose_map",
    "compose_univariate",
    "conjugate_by_diffeos",
    "critical_value_image",
    "discriminant",
    "find_special_points",
    "first_singularity",
    "lips_birth_frames",
    "null_field",
    "poly_from_spec",
    "poly_to_jet",
    "poly_to_spec",
    "rank_df",
    "ruling_map",
    "sample_singular_set",
    "shape_operator",
    "singular_time_field",
    "singularity_at",
    "xi_autodiff",
    "xi_closed_form",
]
