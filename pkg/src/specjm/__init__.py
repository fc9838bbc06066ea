"""Joint measurability of binary quantum measurements via spectrahedral SDPs.

The package decides whether tuples of binary quantum measurements admit a
joint (parent) measurement, computes how much noise makes them compatible,
and cross-checks the solver against closed-form regions: the quarter-circle
lower bound, cloning regions, a trace criterion for incompatibility, and
anti-commuting witness families.
"""

from __future__ import annotations

from ._backend import BACKEND
from .constructions import (
    MubFamily,
    SpinSystem,
    ZhuGram,
    conjugate_norm_identity_check,
    extremal_effect_tuple,
    mub_effect_tuple,
    mub_family,
    spin_system,
    zhu_bound,
    zhu_gram,
)
from .errors import (
    ConvergenceFailure,
    DegenerateOutcome,
    DependentConstraintWarning,
    DimensionOverflow,
    LengthMismatch,
    NegativeComponent,
    NonFinite,
    NonSquare,
    NotAnEffect,
    NotIsometry,
    NotPrime,
    NumericalBreakdown,
    OutOfRange,
    SchemaMismatch,
    SkippedOutcomeWarning,
    SpecjmError,
    TooAsymmetric,
    TooManyMeasurements,
    TrivialSubset,
    UnsupportedModel,
    ZeroScaling,
)
from .jm import (
    JmStatus,
    JmVerdict,
    JointPovm,
    RobustnessResult,
    SweepEntry,
    assemble_jm_sdp,
    check_compatibility,
    region_sweep,
    robustness,
    robustness_detail,
    sign_vectors,
    witness_margin,
)
from .quantum import (
    Balanced,
    Effect,
    EffectTuple,
    General,
    Linear,
    Membership,
    NoiseModel,
    add_noise,
    as_scaling_vector,
    compress,
    effect_tuple_from_json,
    effect_tuple_to_json,
    embed_unbias,
    embed_zero_pad,
    parse_noise_model,
    random_effect_tuple,
    sufficient_compatibility_criterion,
)
from .regions import (
    CloneMembership,
    RegionKind,
    RegionQuery,
    angular_directions,
    boundary_csv,
    clone_membership,
    clone_pair_membership,
    clone_triple_slice,
    f_map,
    qc_membership,
    region_boundary_rows,
    symmetric_clone_value,
    zhu_region_scale,
)
from .sdp import (
    Constraint,
    SdpProblem,
    SdpSolution,
    SdpStatus,
    expand_matrix_equality,
    hermitian_basis,
    problem_from_json,
    problem_to_json,
    solve,
)
from .spectra import (
    DiamondSpec,
    MatrixTuple,
    diamond_free_inclusion,
    diamond_level1_inclusion,
    diamond_membership,
    matrix_ball_membership,
    matrix_tuple_from_json,
    matrix_tuple_to_json,
    sample_diamond,
    scale_tuple,
)

__all__ = [
    "BACKEND",
    "Balanced",
    "CloneMembership",
    "Constraint",
    "ConvergenceFailure",
    "DegenerateOutcome",
    "DependentConstraintWarning",
    "DiamondSpec",
    "DimensionOverflow",
    "Effect",
    "EffectTuple",
    "General",
    "JmStatus",
    "JmVerdict",
    "JointPovm",
    "LengthMismatch",
    "Linear",
    "MatrixTuple",
    "Membership",
    "MubFamily",
    "NegativeComponent",
    "NoiseModel",
    "NonFinite",
    "NonSquare",
    "NotAnEffect",
    "NotIsometry",
    "NotPrime",
    "NumericalBreakdown",
    "OutOfRange",
    "RegionKind",
    "RegionQuery",
    "RobustnessResult",
    "SchemaMismatch",
    "SdpProblem",
    "SdpSolution",
    "SdpStatus",
    "SkippedOutcomeWarning",
    "SpecjmError",
    "SpinSystem",
    "SweepEntry",
    "TooAsymmetric",
    "TooManyMeasurements",
    "TrivialSubset",
    "UnsupportedModel",
    "ZeroScaling",
    "ZhuGram",
    "add_noise",
    "angular_directions",
    "as_scaling_vector",
    "assemble_jm_sdp",
    "boundary_csv",
    "check_compatibility",
    "clone_membership",
    "clone_pair_membership",
    "clone_triple_slice",
    "compress",
    "conjugate_norm_identity_check",
    "diamond_free_inclusion",
    "diamond_level1_inclusion",
    "diamond_membership",
    "effect_tuple_from_json",
    "effect_tuple_to_json",
    "embed_unbias",
    "embed_zero_pad",
    "expand_matrix_equality",
    "extremal_effect_tuple",
    "f_map",
    "hermitian_basis",
    "matrix_ball_membership",
    "matrix_tuple_from_json",
    "matrix_tuple_to_json",
    "mub_effect_tuple",
    "mub_family",
    "parse_noise_model",
    "problem_from_json",
    "problem_to_json",
    "qc_membership",
    "random_effect_tuple",
    "region_boundary_rows",
    "region_sweep",
    "robustness",
    "robustness_detail",
    "sample_diamond",
    "scale_tuple",
    "sign_vectors",
    "solve",
    "spin_system",
    "sufficient_compatibility_criterion",
    "symmetric_clone_value",
    "witness_margin",
    "zhu_bound",
    "zhu_gram",
    "zhu_region_scale",
    "__version__",
]

__version__ = "0.1.0"
