"""Sum decompositions of semibounded forms parametrized by nonnegative contractions.

Given ``t - c = <q ., q .>`` with ``q`` minimal and a nonnegative contraction
``K`` on the codomain of ``q``::

    t1 = c + <(I - K)^(1/2) q ., (I - K)^(1/2) q .>
    t2 =     <K^(1/2) q ., K^(1/2) q .>

Every splitting ``t = t1 + t2`` with ``t1 >= c`` and ``t2 >= 0`` on the same
domain arises this way from exactly one ``K``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, NotALowerBound, PreconditionError
from .form import (
    HermitianForm,
    RepresentingMap,
    add,
    classify,
    lower_bound,
    representing_map,
    shift,
)
from .linalg import (
    Subspace,
    Tolerance,
    as_matrix,
    check_hermitian,
    eigh,
    is_psd,
    opnorm,
    orthonormalize,
    pinv,
    preimage,
    psd_sqrt,
    rank,
    resolve,
)
from .relation import adjoint, operator_matrix, parts, regular_singular_split

LEBESGUE_CERTIFICATE = (
    "finite dimension: the representing map q is an everywhere defined operator on "
    "dom t, so mul q** = {0}, P0 = 0, t_reg = t and t_sing = 0; t_reg is bounded, "
    "so this Lebesgue decomposition is the only Lebesgue type decomposition"
)


@dataclass(frozen=True, eq=False)
class ContractionParam:
    """Nonnegative contraction ``K`` on the representing codomain."""

    k: np.ndarray
    minimalized: bool = False

    def __post_init__(self):
        k = as_matrix(self.k)
        if k.shape[0] != k.shape[1]:
            raise DimensionMismatch("contraction must be square")
        k = check_hermitian(k, what="contraction")
        object.__setattr__(self, "k", k)

    def validate(self, tol: Tolerance | None = None) -> "ContractionParam":
        tol = resolve(tol)
        w, _ = eigh(self.k)
        if w.size and (w[0] < -tol.psd_clamp or w[-1] > 1 + tol.psd_clamp):
            raise InvariantViolation(
                f"K is not a nonnegative contraction (eigenvalues in [{w[0]:.6g}, {w[-1]:.6g}])"
            )
        return self

    @property
    def dim(self) -> int:
        return self.k.shape[0]

    def complement(self) -> np.ndarray:
        return np.eye(self.dim) - self.k

    def is_projection(self, tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        return self.dim == 0 or float(np.max(np.abs(self.k @ self.k - self.k))) <= tol.eq_abs


def contraction(k, tol: Tolerance | None = None) -> ContractionParam:
    return ContractionParam(k).validate(tol)


@dataclass(frozen=True, eq=False)
class SumDecomposition:
    t1: HermitianForm
    t2: HermitianForm
    k: ContractionParam
    mutually_singular: bool
    minimal_column: bool
    is_lebesgue_type: bool
    parallel_sum_norm: float
    certificate: str | None = None


def _minimal_map(t: HermitianForm, c: float, tol: Tolerance) -> RepresentingMap:
    m = lower_bound(t)
    if c > m + tol.psd_clamp:
        raise NotALowerBound(f"c = {c} is not a lower bound (m(t) = {m})")
    return representing_map(t, c, minimal=True, tol=tol)


def _check_k(q: RepresentingMap, k: ContractionParam, tol: Tolerance):
    if k.dim != q.codomain_dim:
        raise DimensionMismatch(
            f"K is {k.dim}x{k.dim} but the minimal representing codomain has dimension {q.codomain_dim}"
        )
    k.validate(tol)


def decompose_by_contraction(
    t: HermitianForm, c: float, k: ContractionParam, tol: Tolerance | None = None
) -> SumDecomposition:
    tol = resolve(tol)
    q = _minimal_map(t, c, tol)
    _check_k(q, k, tol)
    a = psd_sqrt(k.complement(), tol, scale=1.0) @ q.q
    b = psd_sqrt(k.k, tol, scale=1.0) @ q.q
    t1 = HermitianForm(t.domain, c * np.eye(t.dim) + a.conj().T @ a)
    t2 = HermitianForm(t.domain, b.conj().T @ b)
    h1 = shift(t1, -c)
    ps = parallel_sum_forms(h1, t2, tol)
    conds = lebesgue_type_conditions(t, c, k, tol=tol)
    return SumDecomposition(
        t1=t1,
        t2=t2,
        k=k,
        mutually_singular=_is_zero(ps.matrix, tol),
        minimal_column=column_minimal(t, c, k, tol),
        is_lebesgue_type=conds.is_lebesgue_type,
        parallel_sum_norm=opnorm(ps.matrix),
    )


def recover_contraction(
    t: HermitianForm,
    c: float,
    t1: HermitianForm,
    t2: HermitianForm,
    tol: Tolerance | None = None,
    *,
    representing: RepresentingMap | None = None,
) -> ContractionParam:
    """The unique ``K`` (relative to the minimal map of ``t - c``) producing ``t1 + t2``.

    ``C2 = q2 q^+`` maps ``q phi`` to ``q2 phi`` and ``K = C2* C2``.  A non-minimal
    ``representing`` map is cut down to its range first; the result then carries
    ``minimalized=True``.
    """
    tol = resolve(tol)
    total = add(t1, t2, tol)
    scale = max(1.0, opnorm(t.matrix))
    if not total.equals(t, tol.replace(eq_abs=tol.eq_abs * scale)):
        raise PreconditionError("t1 + t2 does not reproduce t")
    if not is_psd(t2.matrix, tol):
        raise PreconditionError("t2 is not nonnegative")
    if t1.dim and lower_bound(t1) < c - tol.psd_clamp * scale:
        raise PreconditionError("t1 is not bounded below by c")
    fixed = False
    if representing is None:
        q = _minimal_map(t, c, tol)
    else:
        q = representing
        if not q.check_minimal(tol):
            q = q.minimalized(tol)
            fixed = True
    qd = q.in_domain_basis(t.domain, tol)
    q2 = representing_map(HermitianForm(t.domain, t2.matrix_in(t.domain, tol)), 0.0, tol=tol).q
    c2 = q2 @ pinv(qd, tol)
    k = c2.conj().T @ c2
    return ContractionParam((k + k.conj().T) / 2, minimalized=fixed)


def column_map(q1: RepresentingMap, q2: RepresentingMap, tol: Tolerance | None = None) -> RepresentingMap:
    """``col(q1, q2)``: represents ``t1 + t2 - c`` into ``C^(k1 + k2)``."""
    tol = resolve(tol)
    if not q1.domain.equals(q2.domain, tol):
        raise PreconditionError("column map needs equal domains")
    if abs(q1.shift - q2.shift) > tol.eq_abs:
        raise PreconditionError("column map needs equal shifts")
    stacked = np.vstack([q1.q, q2.in_domain_basis(q1.domain, tol)])
    col = RepresentingMap(q1.domain, q1.shift, stacked, False)
    return RepresentingMap(col.domain, col.shift, stacked, col.check_minimal(tol))


def column_minimal(t: HermitianForm, c: float, k: ContractionParam, tol: Tolerance | None = None) -> bool:
    """Is ``col((I-K)^(1/2) q, K^(1/2) q)`` minimal in ``clos ran(I-K) (+) clos ran K``?"""
    tol = resolve(tol)
    q = _minimal_map(t, c, tol)
    _check_k(q, k, tol)
    col = np.vstack([psd_sqrt(k.complement(), tol, scale=1.0) @ q.q, psd_sqrt(k.k, tol, scale=1.0) @ q.q])
    target = rank(k.complement(), tol, scale=1.0) + rank(k.k, tol, scale=1.0)
    return rank(col, tol, scale=opnorm(q.q)) == target


def overlap_space(k: ContractionParam, tol: Tolerance | None = None) -> Subspace:
    """``clos ran(I - K) intersected with clos ran K = clos ran (I - K) K``."""
    return orthonormalize(k.complement() @ k.k, tol, scale=1.0)


# -- parallel sums -----------------------------------------------------------


def _check_psd(a, tol: Tolerance, what: str) -> np.ndarray:
    a = check_hermitian(a, tol, what)
    if not is_psd(a, tol):
        raise PreconditionError(f"{what} is not nonnegative")
    return a


def parallel_sum_operators(a, b, tol: Tolerance | None = None) -> np.ndarray:
    """``A : B = A - A (A + B)^+ A`` for nonnegative matrices."""
    tol = resolve(tol)
    a = _check_psd(a, tol, "A")
    b = _check_psd(b, tol, "B")
    if a.shape != b.shape:
        raise DimensionMismatch("parallel sum needs equally sized matrices")
    p = a - a @ pinv(a + b, tol) @ a
    return (p + p.conj().T) / 2


def _same_domain(h1: HermitianForm, h2: HermitianForm, tol: Tolerance) -> np.ndarray:
    if h1.ambient != h2.ambient:
        raise DimensionMismatch("forms live in different spaces")
    try:
        return h2.matrix_in(h1.domain, tol)
    except PreconditionError:
        raise PreconditionError("parallel sum needs forms with equal domains") from None


def parallel_sum_forms(h1: HermitianForm, h2: HermitianForm, tol: Tolerance | None = None) -> HermitianForm:
    """``(h1 : h2)[phi] = inf_h h1[h + phi] + h2[h]`` over ``h`` in the common domain,
    evaluated in closed form by :func:`parallel_sum_operators`."""
    tol = resolve(tol)
    m2 = _same_domain(h1, h2, tol)
    return HermitianForm(h1.domain, parallel_sum_operators(h1.matrix, m2, tol))


def parallel_sum_via_contraction(h1: HermitianForm, h2: HermitianForm, tol: Tolerance | None = None) -> HermitianForm:
    """``h1 : h2 = <((I - K) : K) q ., q .>`` with ``K`` recovered from the split
    ``h = h1 + h2`` and ``q`` the minimal map of ``h``."""
    tol = resolve(tol)
    m2 = _same_domain(h1, h2, tol)
    h2 = HermitianForm(h1.domain, m2)
    h = add(h1, h2, tol)
    q = representing_map(h, 0.0, tol=tol)
    k = recover_contraction(h, 0.0, h1, h2, tol)
    # (I - K) and K commute and sum to I, so (I - K) : K = (I - K) K
    inner = _clip_psd(k.complement() @ k.k)
    return HermitianForm(h1.domain, q.q.conj().T @ inner @ q.q)


def parallel_sum_residual(h1: HermitianForm, h2: HermitianForm, tol: Tolerance | None = None) -> float:
    """Disagreement between the closed-form and the contraction routes."""
    a = parallel_sum_forms(h1, h2, tol).matrix
    b = parallel_sum_via_contraction(h1, h2, tol).matrix
    return 0.0 if a.size == 0 else float(np.max(np.abs(a - b)))


def _clip_psd(m: np.ndarray) -> np.ndarray:
    # round-off can leave eigenvalues at -1e-16
    w, v = eigh((m + m.conj().T) / 2)
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def _is_zero(m: np.ndarray, tol: Tolerance) -> bool:
    return m.size == 0 or opnorm(m) <= tol.eq_abs


def is_mutually_singular(h1: HermitianForm, h2: HermitianForm, tol: Tolerance | None = None) -> bool:
    tol = resolve(tol)
    return _is_zero(parallel_sum_forms(h1, h2, tol).matrix, tol)


# -- Lebesgue and Lebesgue type decompositions --------------------------------


@dataclass(frozen=True)
class LebesgueTypeConditions:
    cond_reg: bool
    cond_sing: bool

    @property
    def is_lebesgue_type(self) -> bool:
        return self.cond_reg and self.cond_sing


def lebesgue_type_conditions(
    t: HermitianForm,
    c: float,
    k: ContractionParam,
    tol: Tolerance | None = None,
    *,
    representing: RepresentingMap | None = None,
) -> LebesgueTypeConditions:
    """Evaluate, as subspace statements,

    * ``clos {x in ran(I-K) : (I-K)^(1/2) x in dom q*} = ran(I-K)``  (regular part)
    * ``ran K^(1/2)  intersected with dom q*  is inside  ker q*``   (singular part)

    using the minimal representing map of ``t - c`` unless ``representing`` is given.
    """
    tol = resolve(tol)
    q = representing if representing is not None else _minimal_map(t, c, tol)
    _check_k(q, k, tol)
    qstar = adjoint(q.as_relation(tol), tol)
    qp = parts(qstar, tol)
    ran_c = orthonormalize(k.complement(), tol, scale=1.0)
    good = preimage(psd_sqrt(k.complement(), tol, scale=1.0), qp.dom, ran_c, tol)
    cond_reg = good.equals(ran_c, tol)
    ran_k = orthonormalize(psd_sqrt(k.k, tol, scale=1.0), tol, scale=1.0)
    cond_sing = ran_k.intersect(qp.dom, tol).issubset(qp.ker, tol)
    return LebesgueTypeConditions(cond_reg, cond_sing)


def lebesgue_decomposition(t: HermitianForm, c: float, tol: Tolerance | None = None) -> SumDecomposition:
    """``t = t_reg + t_sing`` from the split ``q = (I - P0) q + P0 q``, ``P0`` the
    projection onto ``mul q**``.  Here ``P0 = 0``: see :data:`LEBESGUE_CERTIFICATE`."""
    tol = resolve(tol)
    q = _minimal_map(t, c, tol)
    split = regular_singular_split(q.as_relation(tol), tol)
    reg_q = operator_matrix(split.reg, tol) @ t.domain.basis
    sing_q = split.p0 @ q.q
    t_reg = HermitianForm(t.domain, c * np.eye(t.dim) + reg_q.conj().T @ reg_q)
    t_sing = HermitianForm(t.domain, sing_q.conj().T @ sing_q)
    k = ContractionParam(split.p0)
    ps = parallel_sum_forms(shift(t_reg, -c), t_sing, tol)
    conds = lebesgue_type_conditions(t, c, k, tol=tol, representing=q)
    if not classify(t_sing, tol).singular:
        raise InvariantViolation("singular part is not the zero form")
    return SumDecomposition(
        t1=t_reg,
        t2=t_sing,
        k=k,
        mutually_singular=_is_zero(ps.matrix, tol),
        minimal_column=column_minimal(t, c, k, tol),
        is_lebesgue_type=conds.is_lebesgue_type,
        parallel_sum_norm=opnorm(ps.matrix),
        certificate=LEBESGUE_CERTIFICATE,
    )


def lebesgue_is_unique(t: HermitianForm, tol: Tolerance | None = None) -> tuple[bool, str]:
    """The Lebesgue decomposition is the only Lebesgue type one iff ``t_reg`` is
    bounded; ``t_reg`` is a matrix form here, so always."""
    c = lower_bound(t) if t.dim else 0.0
    reg = lebesgue_decomposition(t, c, tol).t1
    bounded = bool(np.isfinite(opnorm(reg.matrix)))
    return bounded, LEBESGUE_CERTIFICATE
