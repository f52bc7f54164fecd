"""certquad: certified integral and Sobolev-norm bounds for small networks.

The package computes two-sided, floating-point-sound brackets for integrals
of quantities derived from feedforward networks (function values, first and
second derivatives, Sobolev-norm integrands, PDE residuals) by combining
interval enclosures of the network with adaptively refined quadrature.
"""

from .errors import (
    BudgetExhausted,
    CertquadError,
    CoefficientEnclosureError,
    ConfigError,
    DimensionMismatch,
    DivisionByIntervalContainingZero,
    EvaluatorFailure,
    IndexOutOfRange,
    ParseError,
    ShapeMismatch,
    UnsupportedActivation,
    UnsupportedDerivativeOrder,
    VertexBudgetExceeded,
    ZeroErrorCell,
)
from .interval import Box, Interval, IntervalMatrix, RoundingPolicy, rounding
from .network import (
    ActivationKind,
    Network,
    derivatives_batch,
    forward_batch,
    load_network,
    network_from_dict,
)
from .enclosure import (
    EllipticOperator,
    HoelderParams,
    affine_on_box,
    enclosure_hoelder_params,
    fval,
    hess,
    integrand_hoelder_params,
    jac,
    residual_batch,
    residual_enclosure,
    residual_hoelder_params,
    residual_point,
    sobolev_integrand_batch,
    sobolev_integrand_enclosure,
    sobolev_integrand_point,
)
from .quadrature import QuadratureRule, exact_for_affine_piece, gauss_tensor, integrate, midpoint
from .adaptive import (
    AlgorithmInstance,
    DoerflerMarking,
    HalfRefinement,
    HoelderRefinement,
    ProblemInstance,
    StateInstance,
    StoppingCriteria,
    doerfler_mark,
    half_refine,
    hoelder_refine,
    partition_csv,
    partition_json,
    run,
)
from .certify import (
    CertifiedReport,
    HistoryRecord,
    TargetKind,
    certify_norm,
    certify_residual,
    history_csv,
    report_json,
)
from .expressions import Expression, parse_expression

__version__ = "0.1.0"

__all__ = [
    "Interval",
    "Box",
    "IntervalMatrix",
    "RoundingPolicy",
    "rounding",
    "ActivationKind",
    "Network",
    "load_network",
    "network_from_dict",
    "forward_batch",
    "derivatives_batch",
    "fval",
    "jac",
    "hess",
    "affine_on_box",
    "sobolev_integrand_point",
    "sobolev_integrand_batch",
    "sobolev_integrand_enclosure",
    "EllipticOperator",
    "residual_point",
    "residual_batch",
    "residual_enclosure",
    "HoelderParams",
    "enclosure_hoelder_params",
    "integrand_hoelder_params",
    "residual_hoelder_params",
    "QuadratureRule",
    "midpoint",
    "gauss_tensor",
    "integrate",
    "exact_for_affine_piece",
    "ProblemInstance",
    "AlgorithmInstance",
    "StateInstance",
    "DoerflerMarking",
    "HoelderRefinement",
    "HalfRefinement",
    "StoppingCriteria",
    "doerfler_mark",
    "hoelder_refine",
    "half_refine",
    "run",
    "partition_csv",
    "partition_json",
    "TargetKind",
    "HistoryRecord",
    "CertifiedReport",
    "certify_norm",
    "certify_residual",
    "report_json",
    "history_csv",
    "Expression",
    "parse_expression",
    "CertquadError",
    "DivisionByIntervalContainingZero",
    "DimensionMismatch",
    "VertexBudgetExceeded",
    "ParseError",
    "ShapeMismatch",
    "UnsupportedActivation",
    "UnsupportedDerivativeOrder",
    "IndexOutOfRange",
    "ZeroErrorCell",
    "EvaluatorFailure",
    "CoefficientEnclosureError",
    "BudgetExhausted",
    "ConfigError",
    "__version__",
]
