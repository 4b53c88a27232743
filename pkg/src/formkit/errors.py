"""Exception hierarchy.

Two families matter to callers (and to the CLI exit codes): an
:class:`InvariantViolation` means a value is malformed (a non-Hermitian form
matrix, a "contraction" with an eigenvalue above one), while a
:class:`PreconditionError` means the values are fine but the requested
operation does not apply to them (a shift above the lower bound, mismatched
dimensions).
"""


class FormkitError(Exception):
    """Base class for all library errors."""


class InvariantViolation(FormkitError, ValueError):
    """A value breaks one of the invariants of its type."""


class NotPSDError(InvariantViolation):
    pass


class NotHermitianError(InvariantViolation):
    pass


class NonFiniteError(InvariantViolation):
    pass


class PreconditionError(FormkitError, ValueError):
    """Arguments are well formed but outside the operation's domain."""


class DimensionMismatch(PreconditionError):
    pass


class NotInDomain(PreconditionError):
    pass


class NotALowerBound(PreconditionError):
    pass


class NotMonotone(PreconditionError):
    pass


class NonStabilizing(PreconditionError):
    pass
