"""Geometric-node Riemann difference stencils in exact arithmetic.

Builds, validates and applies difference stencils whose nodes follow powers
of a rational ratio q (forward, shifted, and symmetric families) alongside
the classical equally-spaced ones; estimates derivatives from convergence
tables; and reproduces the group-supported functions that separate these
generalized derivatives from ordinary ones.
"""

from .qcore import (
    QPolynomial,
    pascal_check,
    q_binomial,
    q_factorial,
    q_integer,
    qbinomial_expand,
)
from .stencil import (
    ExcessNodesError,
    GaussianNormalizer,
    Stencil,
    StencilError,
    format_rational,
    gaussian_forward,
    gaussian_shifted,
    gaussian_symmetric,
    is_symmetric,
    mz_stencil,
    parse_rational,
    recursive_build,
    riemann_classic,
    riemann_symmetric,
    same_difference,
    scale,
    stencil_from_json,
    stencil_to_json,
    vandermonde_solve,
    verify_vandermonde,
)
from .evaluator import (
    ConvergenceTable,
    EvaluatorError,
    FunctionHandle,
    apply_difference,
    difference_quotient,
    estimate_derivative,
    peano_bound_check,
    recursive_quotient,
)
from .counterexample import (
    CounterexampleError,
    CounterexampleReport,
    ExponentialSum,
    GroupFunction,
    MultiplicativeGroup,
    NoSignChangeError,
    character_search,
    evaluate,
    find_exponent,
    membership,
    phi_from_stencil,
    run_case,
    run_search,
    verify_counterexample,
)
from .verify import DEFAULT_SEED, SuiteResult, run_all

__version__ = "0.1.0"

__all__ = [
    "QPolynomial",
    "pascal_check",
    "q_binomial",
    "q_factorial",
    "q_integer",
    "qbinomial_expand",
    "ExcessNodesError",
    "GaussianNormalizer",
    "Stencil",
    "StencilError",
    "format_rational",
    "gaussian_forward",
    "gaussian_shifted",
    "gaussian_symmetric",
    "is_symmetric",
    "mz_stencil",
    "parse_rational",
    "recursive_build",
    "riemann_classic",
    "riemann_symmetric",
    "same_difference",
    "scale",
    "stencil_from_json",
    "stencil_to_json",
    "vandermonde_solve",
    "verify_vandermonde",
    "ConvergenceTable",
    "EvaluatorError",
    "FunctionHandle",
    "apply_difference",
    "difference_quotient",
    "estimate_derivative",
    "peano_bound_check",
    "recursive_quotient",
    "CounterexampleError",
    "CounterexampleReport",
    "ExponentialSum",
    "GroupFunction",
    "MultiplicativeGroup",
    "NoSignChangeError",
    "character_search",
    "evaluate",
    "find_exponent",
    "membership",
    "phi_from_stencil",
    "run_case",
    "run_search",
    "verify_counterexample",
    "DEFAULT_SEED",
    "SuiteResult",
    "run_all",
    "__version__",
]
