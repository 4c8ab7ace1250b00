"""fracvar: numerical fractional calculus of variations.

Discrete left/right Riemann-Liouville operators on uniform grids, a small
expression language for Lagrangians, fractional variational functionals
with Euler-Lagrange residuals, a direct minimizer (unconstrained and
isoperimetric), and sufficiency certificates (convexity, excess function,
exact fields).
"""

from .certify import (
    ConvexityReport,
    Counterexample,
    ExactField,
    FieldReport,
    FieldTrajectoryReport,
    check_convexity,
    check_field,
    excess,
    gradient_inequality_gap,
    verify_field_minimizer,
)
from .expressions import (
    ExprDomainError,
    ExprError,
    ExprEvalError,
    ExprSyntaxError,
    differentiate,
    evaluate,
    free_vars,
    parse,
    simplify,
    to_string,
)
from .grids import Grid, SampledFn, sample, weighted_norm
from .operators import (
    FracOperator,
    FracOrder,
    OperatorKind,
    build_left_rlfd,
    build_left_rlfi,
    build_right_adjoint,
    build_right_rlfd,
    build_right_rlfi,
)
from .problems import (
    Constraint,
    Residual,
    VarProblem,
    assemble,
    augmented_lagrangian,
    constraint_value,
    el_residual,
    el_residual_general,
    evaluate_functional,
)
from .solve import SolveConfig, SolveReport, gradient, minimize, solve_isoperimetric
from .special import gamma

__version__ = "0.1.0"

__all__ = [
    "gamma",
    "Grid",
    "SampledFn",
    "sample",
    "weighted_norm",
    "FracOrder",
    "OperatorKind",
    "FracOperator",
    "build_left_rlfi",
    "build_left_rlfd",
    "build_right_rlfi",
    "build_right_rlfd",
    "build_right_adjoint",
    "ExprError",
    "ExprSyntaxError",
    "ExprEvalError",
    "ExprDomainError",
    "parse",
    "evaluate",
    "differentiate",
    "simplify",
    "to_string",
    "free_vars",
    "VarProblem",
    "Constraint",
    "Residual",
    "assemble",
    "evaluate_functional",
    "el_residual",
    "el_residual_general",
    "augmented_lagrangian",
    "constraint_value",
    "SolveConfig",
    "SolveReport",
    "gradient",
    "minimize",
    "solve_isoperimetric",
    "ConvexityReport",
    "Counterexample",
    "ExactField",
    "FieldReport",
    "FieldTrajectoryReport",
    "check_convexity",
    "gradient_inequality_gap",
    "excess",
    "check_field",
    "verify_field_minimizer",
    "__version__",
]
