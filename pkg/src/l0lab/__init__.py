"""
l0lab: exact analysis of sparsity-constrained and sparsity-penalized
least-residual problems on small dense instances.

    min ||x||_0  s.t.  ||Ax - b||_p <= sigma
    min ||x||_0 + lam * phi(||Ax - b||_p)

Everything is computed by enumerating all column supports, so answers are
exact up to floating point, and instances are limited to a couple of dozen
columns.
"""

from .breakpoints import (
    BreakpointSequence,
    MarginalF,
    MarginalH,
    breakpoints,
    line_records,
    marginal_F,
    marginal_H,
    marginal_H_table,
    optimal_set_constrained,
    optimal_set_penalty,
)
from .cardinality import (
    CardinalityReport,
    check_h2,
    p1_report,
    p2_bound,
    penalty_cardinality,
    strictness_p2,
)
from .errors import (
    DomainError,
    InfeasibleError,
    InvalidInputError,
    L0LabError,
    PreconditionError,
    ResourceLimitError,
)
from .levels import (
    Instance,
    LevelSequence,
    ResidualStaircase,
    level_representatives,
    levels,
    load_instance,
    residual_staircase,
)
from .linalg import l1_regression, least_squares, numerical_rank, spectral_norm
from .phi import Identity, PhiSpec, Power, ShiftedPower, SquaredHinge, phi_eval, phi_properties
from .relation import Case, RelationReport, classify, exact_penalty_threshold, noiseless_threshold, verify_exactness
from .smooth import (
    SmoothPenaltyProblem,
    lipschitz_bound,
    phi_big_eval,
    phi_big_grad,
    prox_grad_solve,
)

__version__ = "0.1.0"
