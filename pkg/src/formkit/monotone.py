"""Monotone sequences of semibounded forms and their limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decomp import lebesgue_decomposition
from .errors import InvariantViolation, NonStabilizing, NotALowerBound, NotMonotone, PreconditionError
from .form import (
    HermitianForm,
    add,
    classify,
    closure,
    is_restriction,
    kernel,
    leq,
    lower_bound,
    restrict,
    shift,
)
from .linalg import Tolerance, is_psd, opnorm, resolve
from .represent import SelfadjointRelation, form_from_relation, relation_from_resolvent, represent_form, resolvent

NONDECREASING = "nondecreasing"
NONINCREASING = "nonincreasing"
SENSES = (NONDECREASING, NONINCREASING)

# terms checked when a property must hold for every n of an affine family
_AFFINE_PROBE = (1, 2, 3, 5, 10, 100, 1000)


def _check_sense(sense: str):
    if sense not in SENSES:
        raise PreconditionError(f"sense must be one of {SENSES}, got {sense!r}")


@dataclass(frozen=True, eq=False)
class AffineFamily:
    """``t_n = r + n s`` (nondecreasing) or ``t_n = r + s / n`` (nonincreasing)."""

    r: HermitianForm
    s: HermitianForm
    sense: str

    def __post_init__(self):
        _check_sense(self.sense)
        add(self.r, self.s)  # same domain
        if not is_psd(self.s.matrix):
            raise InvariantViolation("s is not nonnegative")

    def term(self, n: int) -> HermitianForm:
        if n < 1:
            raise PreconditionError("sequences are indexed from 1")
        weight = n if self.sense == NONDECREASING else 1.0 / n
        s = self.s.matrix_in(self.r.domain)
        return HermitianForm(self.r.domain, self.r.matrix + weight * s)

    def probe_terms(self) -> list[HermitianForm]:
        return [self.term(n) for n in _AFFINE_PROBE]


@dataclass(frozen=True, eq=False)
class ExplicitChain:
    """A finite monotone chain; it must end with two equal entries (stabilization)."""

    forms: tuple
    sense: str
    lower_bound: float | None = None
    tol: Tolerance | None = field(default=None, repr=False)

    def __post_init__(self):
        _check_sense(self.sense)
        forms = tuple(self.forms)
        object.__setattr__(self, "forms", forms)
        if not forms:
            raise PreconditionError("empty chain")
        tol = resolve(self.tol)
        for i, (a, b) in enumerate(zip(forms, forms[1:]), start=1):
            ok = leq(a, b, tol) if self.sense == NONDECREASING else leq(b, a, tol)
            if not ok:
                raise NotMonotone(f"entries {i} and {i + 1} break the {self.sense} order")
        if self.lower_bound is not None:
            worst = min(lower_bound(f) for f in forms)
            if self.lower_bound > worst + tol.psd_clamp:
                raise NotALowerBound(f"{self.lower_bound} is not a common lower bound (min m(t_n) = {worst})")

    def stable_index(self, tol: Tolerance | None = None) -> int:
        """0-based index of the first entry equal to its successor."""
        for i, (a, b) in enumerate(zip(self.forms, self.forms[1:])):
            if a.equals(b, tol):
                return i
        raise NonStabilizing(f"chain of length {len(self.forms)} never repeats an entry")

    def term(self, n: int) -> HermitianForm:
        if n < 1:
            raise PreconditionError("sequences are indexed from 1")
        if n <= len(self.forms):
            return self.forms[n - 1]
        return self.forms[self.stable_index(self.tol)]

    def probe_terms(self) -> list[HermitianForm]:
        return list(self.forms)


FormSequence = AffineFamily | ExplicitChain


def _require(seq, sense: str):
    if seq.sense != sense:
        raise PreconditionError(f"expected a {sense} sequence, got {seq.sense}")


def limit_nondecreasing(seq: FormSequence, upper_bounds=(), tol: Tolerance | None = None) -> HermitianForm:
    """Pointwise limit of a nondecreasing sequence, defined where ``sup t_n[phi]`` is finite.

    Every ``u`` in ``upper_bounds`` must dominate all terms; the limit is then
    checked to stay below it.
    """
    tol = resolve(tol)
    _require(seq, NONDECREASING)
    if isinstance(seq, AffineFamily):
        # sup_n r[phi] + n s[phi] < inf  iff  s[phi] = 0
        s = HermitianForm(seq.r.domain, seq.s.matrix_in(seq.r.domain, tol))
        limit = restrict(seq.r, kernel(s, 0.0, tol), tol)
    else:
        limit = seq.forms[seq.stable_index(tol)]
    for u in upper_bounds:
        if not all(leq(tn, u, tol) for tn in seq.probe_terms()):
            raise PreconditionError("supplied form is not an upper bound of the sequence")
        if not leq(limit, u, tol):
            raise InvariantViolation("limit exceeds an upper bound of the sequence")
    return limit


def common_lower_bound(seq: FormSequence) -> float:
    if isinstance(seq, ExplicitChain):
        if seq.lower_bound is not None:
            return seq.lower_bound
        return min(lower_bound(f) for f in seq.forms)
    # both affine senses stay above r + min(0, ...) = r
    return min(lower_bound(seq.r), lower_bound(seq.term(1)))


def limit_nonincreasing(seq: FormSequence, c: float | None = None, tol: Tolerance | None = None) -> HermitianForm:
    """Limit of a nonincreasing sequence bounded below by ``c``; its domain is
    the union of the domains."""
    tol = resolve(tol)
    _require(seq, NONINCREASING)
    if c is None:
        c = common_lower_bound(seq)
    if isinstance(seq, AffineFamily):
        limit = seq.r
    else:
        limit = seq.forms[seq.stable_index(tol)]
    if limit.dim and lower_bound(limit) < c - tol.psd_clamp:
        raise NotALowerBound(f"c = {c} is not a lower bound of the limit")
    if not all(leq(limit, tn, tol) for tn in seq.probe_terms()):
        raise InvariantViolation("limit is not below every term")
    return limit


def sequence_limit(seq: FormSequence, tol: Tolerance | None = None) -> HermitianForm:
    if seq.sense == NONDECREASING:
        return limit_nondecreasing(seq, tol=tol)
    return limit_nonincreasing(seq, tol=tol)


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    lam: float
    limit: HermitianForm
    errors: tuple
    monotone: bool
    below_threshold: bool
    threshold: float
    exponent: float | None


def fit_decay_exponent(errors) -> float | None:
    """Least-squares ``p`` in ``err_n ~ C n^(-p)`` over the tail ``n >= n_max / 2``."""
    n_max = len(errors)
    pts = [(n, e) for n, e in enumerate(errors, start=1) if n >= n_max / 2 and e > 0]
    if len(pts) < 2:
        return None
    x = np.log([n for n, _ in pts])
    y = np.log([e for _, e in pts])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def resolvent_convergence(
    seq: FormSequence,
    lam: float | None = None,
    n_max: int = 50,
    threshold: float = 0.05,
    tol: Tolerance | None = None,
) -> ConvergenceReport:
    """Spectral-norm distance between the resolvents of ``A_{t_n}`` and of the
    relation of the limit form, for ``n = 1 .. n_max``."""
    tol = resolve(tol)
    if n_max < 3:
        raise PreconditionError("n_max must be at least 3")
    limit = sequence_limit(seq, tol)
    c = min(lower_bound(seq.term(1)), lower_bound(limit))
    if not math.isfinite(c):
        c = 0.0
    if lam is None:
        lam = c - 1.0
    if not lam < c - tol.psd_clamp:
        raise PreconditionError(f"lambda = {lam} is not below the common lower bound {c}")
    r_inf = resolvent(represent_form(limit, c, tol), lam, tol)
    errors = []
    for n in range(1, n_max + 1):
        r_n = resolvent(represent_form(seq.term(n), c, tol), lam, tol)
        errors.append(opnorm(r_n - r_inf))
    monotone = all(b <= a + tol.eq_abs for a, b in zip(errors, errors[1:]))
    return ConvergenceReport(
        lam=float(lam),
        limit=limit,
        errors=tuple(errors),
        monotone=monotone,
        below_threshold=errors[-1] <= threshold,
        threshold=threshold,
        exponent=fit_decay_exponent(errors),
    )


def resolvent_limit(seq: FormSequence, lam: float, c: float, tol: Tolerance | None = None, max_doublings: int = 48):
    """Limit of ``(A_{t_n} - lam)^(-1)``, found by doubling ``n`` until two
    consecutive resolvents agree to well within ``eq_abs``."""
    tol = resolve(tol)
    n = 1
    prev = resolvent(represent_form(seq.term(n), c, tol), lam, tol)
    for _ in range(max_doublings):
        n *= 2
        cur = resolvent(represent_form(seq.term(n), c, tol), lam, tol)
        if opnorm(cur - prev) <= tol.eq_abs * 1e-2:
            return cur
        prev = cur
    raise NonStabilizing(f"resolvents still moving at n = {n}")


@dataclass(frozen=True, eq=False)
class LimitConnection:
    t: HermitianForm
    t_inf: HermitianForm
    a_inf: SelfadjointRelation
    closure_of_regular_is_t_inf: bool
    contained_in_t_inf: bool
    equals_t_inf: bool
    singular_matches: bool

    @property
    def all_hold(self) -> bool:
        return (
            self.closure_of_regular_is_t_inf
            and self.contained_in_t_inf
            and self.equals_t_inf
            and self.singular_matches
        )


def limit_relation_connection(seq: FormSequence, tol: Tolerance | None = None) -> LimitConnection:
    """Compare the limit form ``t`` of a nonincreasing sequence with the form
    ``t_inf`` of the resolvent limit ``A_inf`` of the representing relations."""
    tol = resolve(tol)
    _require(seq, NONINCREASING)
    c = common_lower_bound(seq)
    if not math.isfinite(c):
        c = 0.0
    t = limit_nonincreasing(seq, c, tol)
    lam = c - 1.0
    a_inf = relation_from_resolvent(resolvent_limit(seq, lam, c, tol), lam, tol)
    t_inf = form_from_relation(a_inf, c, tol)
    t_reg = lebesgue_decomposition(t, c, tol).t1 if t.dim else t
    # A_inf - c is the zero relation part exactly when its operator part vanishes
    op = a_inf.operator_part - c * np.eye(a_inf.op_basis.dim)
    a_singular = op.size == 0 or opnorm(op) <= tol.eq_abs
    return LimitConnection(
        t=t,
        t_inf=t_inf,
        a_inf=a_inf,
        closure_of_regular_is_t_inf=closure(t_reg, tol).equals(t_inf, tol),
        contained_in_t_inf=is_restriction(t, t_inf, tol),
        equals_t_inf=t.equals(t_inf, tol),
        singular_matches=classify(shift(t, -c), tol).singular == a_singular,
    )
