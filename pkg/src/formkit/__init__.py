"""Semibounded forms on subspaces of C^n, their representing maps, sum
decompositions, selfadjoint relations and monotone limits."""

from .decomp import (
    ContractionParam,
    SumDecomposition,
    column_minimal,
    contraction,
    decompose_by_contraction,
    is_mutually_singular,
    lebesgue_decomposition,
    lebesgue_is_unique,
    parallel_sum_forms,
    parallel_sum_operators,
    parallel_sum_via_contraction,
    recover_contraction,
)
from .errors import (
    DimensionMismatch,
    FormkitError,
    InvariantViolation,
    NonStabilizing,
    NotALowerBound,
    NotInDomain,
    NotMonotone,
    PreconditionError,
)
from .form import (
    HermitianForm,
    RepresentingMap,
    classify,
    connect_representations,
    evaluate,
    leq,
    lower_bound,
    representing_map,
)
from .linalg import DEFAULT_TOL, Subspace, Tolerance
from .monotone import (
    AffineFamily,
    ExplicitChain,
    limit_nondecreasing,
    limit_nonincreasing,
    limit_relation_connection,
    resolvent_convergence,
)
from .relation import LinearRelation, adjoint, compose, dominates_contractively, parts
from .represent import (
    SelfadjointRelation,
    form_from_relation,
    relation_leq,
    represent_form,
    resolvent,
    verify_first_representation,
)

__version__ = "0.1.0"

__all__ = [
    "AffineFamily",
    "ContractionParam",
    "DEFAULT_TOL",
    "DimensionMismatch",
    "ExplicitChain",
    "FormkitError",
    "HermitianForm",
    "InvariantViolation",
    "LinearRelation",
    "NonStabilizing",
    "NotALowerBound",
    "NotInDomain",
    "NotMonotone",
    "PreconditionError",
    "RepresentingMap",
    "SelfadjointRelation",
    "Subspace",
    "SumDecomposition",
    "Tolerance",
    "adjoint",
    "classify",
    "column_minimal",
    "compose",
    "connect_representations",
    "contraction",
    "decompose_by_contraction",
    "dominates_contractively",
    "evaluate",
    "form_from_relation",
    "is_mutually_singular",
    "lebesgue_decomposition",
    "lebesgue_is_unique",
    "leq",
    "limit_nondecreasing",
    "limit_nonincreasing",
    "limit_relation_connection",
    "lower_bound",
    "parallel_sum_forms",
    "parallel_sum_operators",
    "parallel_sum_via_contraction",
    "parts",
    "recover_contraction",
    "relation_leq",
    "represent_form",
    "representing_map",
    "resolvent",
    "resolvent_convergence",
    "verify_first_representation",
]
