"""Selfadjoint relations attached to semibounded forms, and back.

For ``t - c = <q ., q .>`` the relation ``S = Q* Q + c`` (``Q`` the graph of
``q`` lifted to C^n) is selfadjoint, has ``mul S = (dom t)^perp`` and acts on
``dom t`` as the form matrix.  Since ``Q** = Q`` here, ``Q* Q**`` gives the
same relation; :func:`represent_form` computes both and insists they agree.
"""

from __future__ import annotations

import math

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvariantViolation,
    NotALowerBound,
    NotInDomain,
    PreconditionError,
)
from .form import HermitianForm, lower_bound, representing_map
from .linalg import (
    Subspace,
    Tolerance,
    as_matrix,
    check_hermitian,
    lambda_min,
    opnorm,
    psd_sqrt,
    resolve,
)
from .relation import (
    LinearRelation,
    add_scalar,
    adjoint,
    compose,
    left_multiply,
    operator_matrix,
    parts,
)


@dataclass(frozen=True, eq=False)
class SelfadjointRelation:
    """A selfadjoint relation together with its operator part.

    ``operator_part`` is the Hermitian matrix of the relation's regular part in
    the orthonormal basis ``op_basis`` of ``(mul rel)^perp = dom rel``.
    """

    rel: LinearRelation
    op_basis: Subspace
    operator_part: np.ndarray
    lower_bound: float

    @classmethod
    def from_operator_part(cls, basis, matrix, tol: Tolerance | None = None) -> "SelfadjointRelation":
        """``{(B x, B A x)} + {0} x (ran B)^perp`` for orthonormal ``B`` and Hermitian ``A``."""
        tol = resolve(tol)
        sub = basis if isinstance(basis, Subspace) else Subspace(as_matrix(basis))
        a = check_hermitian(as_matrix(matrix, rows=sub.dim, cols=sub.dim), tol, "operator part")
        b = sub.basis
        mul = sub.complement(tol).basis
        n = sub.ambient
        first = np.hstack([b, np.zeros((n, mul.shape[1]))])
        second = np.hstack([b @ a, mul])
        rel = LinearRelation.from_pairs(first, second, tol)
        return cls(rel, sub, a, lambda_min(a))

    @classmethod
    def from_relation(cls, rel: LinearRelation, tol: Tolerance | None = None) -> "SelfadjointRelation":
        tol = resolve(tol)
        if not rel.is_square:
            raise DimensionMismatch("a selfadjoint relation maps a space into itself")
        if not adjoint(rel, tol).equals(rel, tol):
            raise InvariantViolation("relation is not selfadjoint")
        p = parts(rel, tol)
        if not p.mul.equals(p.dom.complement(tol), tol):
            raise InvariantViolation("mul is not the orthogonal complement of dom")
        reg = left_multiply(np.eye(rel.dim_h) - p.mul.projector(), rel, tol)
        b = p.dom.basis
        a = b.conj().T @ operator_matrix(reg, tol) @ b
        a = check_hermitian(a, tol.replace(eq_abs=tol.eq_abs * max(1.0, opnorm(a))), "operator part")
        return cls(rel, p.dom, a, lambda_min(a))

    @property
    def ambient(self) -> int:
        return self.rel.dim_h

    def equals(self, other: "SelfadjointRelation", tol: Tolerance | None = None) -> bool:
        return self.rel.equals(other.rel, tol)

    def __repr__(self):
        return f"SelfadjointRelation(C^{self.ambient}, dom dim {self.op_basis.dim})"


def _check_shift(c: float, bound: float, tol: Tolerance, what: str):
    if c > bound + tol.psd_clamp * max(1.0, abs(bound) if np.isfinite(bound) else 1.0):
        raise NotALowerBound(f"c = {c} exceeds the lower bound {bound} of the {what}")


def _relation_of_form(t: HermitianForm, c: float, tol: Tolerance) -> tuple[LinearRelation, LinearRelation]:
    q = representing_map(t, c, minimal=True, tol=tol).as_relation(tol)
    qstar = adjoint(q, tol)
    s = add_scalar(compose(qstar, q, tol), c, tol)
    a = add_scalar(compose(qstar, adjoint(qstar, tol), tol), c, tol)
    return s, a


def represent_form(t: HermitianForm, c: float, tol: Tolerance | None = None) -> SelfadjointRelation:
    """The selfadjoint relation ``Q* Q + c`` representing ``t``."""
    tol = resolve(tol)
    m = lower_bound(t)
    _check_shift(c, m, tol, "form")
    s, a = _relation_of_form(t, c, tol)
    if not s.equals(a, tol):
        raise InvariantViolation("Q* Q + c and Q* Q** + c differ")
    s_lower, _ = _relation_of_form(t, c - 1.0, tol)
    if not s.equals(s_lower, tol):
        raise InvariantViolation("representing relation depends on the shift")
    out = SelfadjointRelation.from_relation(s, tol)
    if not parts(s, tol).mul.equals(t.domain.complement(tol), tol):
        raise InvariantViolation("mul S differs from (dom t)^perp")
    if t.dim and abs(out.lower_bound - m) > tol.eq_abs * max(1.0, abs(m)):
        raise InvariantViolation(f"lower bound {out.lower_bound} differs from m(t) = {m}")
    return out


def verify_first_representation(
    t: HermitianForm, a: SelfadjointRelation, tol: Tolerance | None = None
) -> bool:
    """Does ``a`` represent ``t``?

    Checks ``t[phi, psi] = <phi', psi>`` for every ``(phi, phi')`` in a basis of
    the graph and every ``psi`` in a basis of ``dom t``, then maximality: the
    generators ``(B x, B M x)`` and ``(0, m)`` with ``m`` in ``(dom t)^perp``
    span every symmetric relation satisfying that identity, so they must all lie
    in ``a``.
    """
    tol = resolve(tol)
    if a.ambient != t.ambient:
        raise DimensionMismatch("relation and form live in different spaces")
    dom_a = parts(a.rel, tol).dom
    if not dom_a.issubset(t.domain, tol):
        raise NotInDomain("dom A is not inside dom t")
    b = t.domain.basis
    bound = tol.eq_abs * max(1.0, opnorm(t.matrix))
    lhs = t.matrix @ (b.conj().T @ a.rel.first)
    rhs = b.conj().T @ a.rel.second
    if lhs.size and float(np.max(np.abs(lhs - rhs))) > bound:
        return False
    mul = t.domain.complement(tol).basis
    n = t.ambient
    first = np.hstack([b, np.zeros((n, mul.shape[1]))])
    second = np.hstack([b @ t.matrix, mul])
    gens = np.vstack([first, second])
    scale = max(1.0, opnorm(gens)) if gens.size else 1.0
    return all(
        a.rel.graph.residual(gens[:, j]) <= bound * scale for j in range(gens.shape[1])
    )


def _scale(a: SelfadjointRelation, c: float) -> float:
    # magnitude of the cancellation in A_reg - c
    return max(opnorm(a.operator_part), abs(c))


def form_from_relation(a: SelfadjointRelation, c: float, tol: Tolerance | None = None) -> HermitianForm:
    """``t[phi, psi] = <(A_reg - c)^(1/2) phi, (A_reg - c)^(1/2) psi> + c <phi, psi>``."""
    tol = resolve(tol)
    _check_shift(c, a.lower_bound, tol, "relation")

    def build(shift_by: float) -> np.ndarray:
        d = a.op_basis.dim
        root = psd_sqrt(a.operator_part - shift_by * np.eye(d), tol, scale=_scale(a, shift_by))
        return root.conj().T @ root + shift_by * np.eye(d)

    m = build(c)
    if m.size and float(np.max(np.abs(m - build(c - 1.0)))) > tol.eq_abs * max(1.0, opnorm(m)):
        raise InvariantViolation("associated form depends on the shift")
    return HermitianForm(a.op_basis, (m + m.conj().T) / 2)


def _lifted_root(a: SelfadjointRelation, c: float, tol: Tolerance) -> np.ndarray:
    # (A_reg - c)^(1/2) as an n x n matrix, zero on mul A
    b = a.op_basis.basis
    d = a.op_basis.dim
    return b @ psd_sqrt(a.operator_part - c * np.eye(d), tol, scale=_scale(a, c)) @ b.conj().T


def relation_leq(
    h1: SelfadjointRelation, h2: SelfadjointRelation, c: float | None = None, tol: Tolerance | None = None
) -> bool:
    """``H1 <= H2``: ``dom (H2-c)^(1/2)`` inside ``dom (H1-c)^(1/2)`` and
    ``|(H1-c)^(1/2) phi| <= |(H2-c)^(1/2) phi|`` there."""
    tol = resolve(tol)
    if c is None:
        raise PreconditionError("relation_leq needs a common lower bound c")
    if h1.ambient != h2.ambient:
        raise DimensionMismatch("relations live in different spaces")
    _check_shift(c, h1.lower_bound, tol, "first relation")
    _check_shift(c, h2.lower_bound, tol, "second relation")
    if not h2.op_basis.issubset(h1.op_basis, tol):
        return False
    if h2.op_basis.dim == 0:
        return True
    r1 = _lifted_root(h1, c, tol) @ h2.op_basis.basis
    r2 = _lifted_root(h2, c, tol) @ h2.op_basis.basis
    gap = r2.conj().T @ r2 - r1.conj().T @ r1
    return lambda_min(gap) >= -tol.psd_clamp


def resolvent(a: SelfadjointRelation, lam: float, tol: Tolerance | None = None) -> np.ndarray:
    """``(A - lam)^(-1)``: inverse of the operator part on ``dom A``, zero on ``mul A``."""
    tol = resolve(tol)
    margin = tol.psd_clamp * max(1.0, abs(a.lower_bound)) if math.isfinite(a.lower_bound) else 0.0
    if not lam < a.lower_bound - margin:
        raise PreconditionError(f"lambda = {lam} is not below the lower bound {a.lower_bound}")
    b = a.op_basis.basis
    d = a.op_basis.dim
    if d == 0:
        return np.zeros((a.ambient, a.ambient), dtype=complex)
    inv = np.linalg.inv(a.operator_part - lam * np.eye(d))
    return b @ ((inv + inv.conj().T) / 2) @ b.conj().T


def relation_from_resolvent(r, lam: float, tol: Tolerance | None = None) -> SelfadjointRelation:
    """Selfadjoint relation ``{(R f, f + lam R f)}`` whose resolvent at ``lam`` is ``R``."""
    r = as_matrix(r)
    if r.shape[0] != r.shape[1]:
        raise DimensionMismatch("resolvent must be square")
    rel = LinearRelation.from_pairs(r, np.eye(r.shape[0]) + lam * r, tol)
    return SelfadjointRelation.from_relation(rel, tol)
