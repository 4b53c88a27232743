"""Linear relations between C^h and C^k, stored as graph subspaces of C^h (+) C^k.

At finite dimension every graph is closed, so a relation is its own closure
(``R** = R``); :func:`closure` only asserts this.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, PreconditionError
from .linalg import (
    Subspace,
    Tolerance,
    as_matrix,
    lambda_min,
    null_space,
    orthonormalize,
    pinv,
    resolve,
)


@dataclass(frozen=True, eq=False)
class LinearRelation:
    dim_h: int
    dim_k: int
    graph: Subspace

    def __post_init__(self):
        if self.graph.ambient != self.dim_h + self.dim_k:
            raise InvariantViolation(
                f"graph lives in C^{self.graph.ambient}, expected C^{self.dim_h + self.dim_k}"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_pairs(cls, first, second, tol: Tolerance | None = None, *, scale: float = 0.0) -> "LinearRelation":
        """Relation spanned by the column pairs ``(first[:, j], second[:, j])``;
        ``scale`` is passed on to :func:`orthonormalize`."""
        first = as_matrix(first)
        second = as_matrix(second)
        if first.shape[1] != second.shape[1]:
            raise DimensionMismatch("pair matrices need the same number of columns")
        g = orthonormalize(np.vstack([first, second]), tol, scale=scale)
        return cls(first.shape[0], second.shape[0], g)

    @classmethod
    def from_matrix(cls, m, domain: Subspace | None = None, tol: Tolerance | None = None) -> "LinearRelation":
        """Graph of the operator ``m`` (k x h) restricted to ``domain`` (default: all of C^h)."""
        m = as_matrix(m)
        k, h = m.shape
        if domain is None:
            domain = Subspace.full(h)
        if domain.ambient != h:
            raise DimensionMismatch("domain does not live in the initial space of the matrix")
        return cls.from_pairs(domain.basis, m @ domain.basis, tol)

    @classmethod
    def identity(cls, n: int) -> "LinearRelation":
        return cls.from_matrix(np.eye(n))

    @classmethod
    def zero_on(cls, domain: Subspace, dim_k: int) -> "LinearRelation":
        return cls.from_pairs(domain.basis, np.zeros((dim_k, domain.dim)))

    @classmethod
    def multivalued(cls, dim_h: int, mul: Subspace) -> "LinearRelation":
        """The purely multivalued relation ``{0} x mul``."""
        return cls.from_pairs(np.zeros((dim_h, mul.dim)), mul.basis)

    # -- views --------------------------------------------------------------

    @property
    def first(self) -> np.ndarray:
        return self.graph.basis[: self.dim_h]

    @property
    def second(self) -> np.ndarray:
        return self.graph.basis[self.dim_h :]

    @property
    def is_square(self) -> bool:
        return self.dim_h == self.dim_k

    def equals(self, other: "LinearRelation", tol: Tolerance | None = None) -> bool:
        return (
            self.dim_h == other.dim_h
            and self.dim_k == other.dim_k
            and self.graph.equals(other.graph, tol)
        )

    def contains_pair(self, h, k, tol: Tolerance | None = None) -> bool:
        return self.graph.contains(np.concatenate([np.asarray(h), np.asarray(k)]), tol)

    def __repr__(self):
        return f"LinearRelation(C^{self.dim_h} -> C^{self.dim_k}, graph dim {self.graph.dim})"


@dataclass(frozen=True)
class Parts:
    dom: Subspace
    ran: Subspace
    ker: Subspace
    mul: Subspace


def _slice_subspace(g: Subspace, keep: slice, kill: slice, tol: Tolerance) -> Subspace:
    # {x : (x on `keep`, 0 on `kill`) in g}; blocks of an orthonormal basis have scale 1
    coeff = null_space(g.basis[kill], tol, scale=1.0)
    return orthonormalize(g.basis[keep] @ coeff, tol, scale=1.0)


def parts(r: LinearRelation, tol: Tolerance | None = None) -> Parts:
    tol = resolve(tol)
    h = slice(0, r.dim_h)
    k = slice(r.dim_h, r.dim_h + r.dim_k)
    return Parts(
        dom=orthonormalize(r.first, tol, scale=1.0),
        ran=orthonormalize(r.second, tol, scale=1.0),
        ker=_slice_subspace(r.graph, h, k, tol),
        mul=_slice_subspace(r.graph, k, h, tol),
    )


def is_operator(r: LinearRelation, tol: Tolerance | None = None) -> bool:
    return parts(r, tol).mul.dim == 0


def operator_matrix(r: LinearRelation, tol: Tolerance | None = None) -> np.ndarray:
    """k x h matrix acting as ``r`` on ``dom r`` and as zero on its complement."""
    tol = resolve(tol)
    if not is_operator(r, tol):
        raise PreconditionError("relation is multivalued")
    if r.graph.dim == 0:
        return np.zeros((r.dim_k, r.dim_h), dtype=complex)
    return r.second @ pinv(r.first, tol, scale=1.0)


def adjoint(r: LinearRelation, tol: Tolerance | None = None) -> LinearRelation:
    """``R* = {(k, h) : <k, k'> = <h, h'> for all (h', k') in R}`` in C^k (+) C^h."""
    # orthogonal complement of the flipped graph {(k', -h')}
    flipped = np.vstack([r.second, -r.first])
    if flipped.shape[1] == 0:
        g = Subspace.full(r.dim_h + r.dim_k)
    else:
        g = orthonormalize(flipped, tol).complement(tol)
    return LinearRelation(r.dim_k, r.dim_h, g)


def closure(r: LinearRelation, tol: Tolerance | None = None) -> LinearRelation:
    """``R**``; equal to ``R`` because finite-dimensional graphs are closed."""
    rr = adjoint(adjoint(r, tol), tol)
    if not rr.equals(r, tol):
        raise InvariantViolation("R** differs from R")
    return r


def compose(s: LinearRelation, r: LinearRelation, tol: Tolerance | None = None) -> LinearRelation:
    """``S R = {(h, l) : (h, k) in R and (k, l) in S for some k}``."""
    tol = resolve(tol)
    if r.dim_k != s.dim_h:
        raise DimensionMismatch(f"cannot compose C^{s.dim_h}->C^{s.dim_k} after C^{r.dim_h}->C^{r.dim_k}")
    nh, nk, nl = r.dim_h, r.dim_k, s.dim_k
    # R (+) L and H (+) S embedded in H (+) K (+) L
    a = np.zeros((nh + nk + nl, r.graph.dim + nl), dtype=complex)
    a[: nh + nk, : r.graph.dim] = r.graph.basis
    a[nh + nk :, r.graph.dim :] = np.eye(nl)
    b = np.zeros((nh + nk + nl, nh + s.graph.dim), dtype=complex)
    b[:nh, :nh] = np.eye(nh)
    b[nh:, nh:] = s.graph.basis
    both = orthonormalize(a, tol).intersect(orthonormalize(b, tol), tol)
    keep = np.r_[0:nh, nh + nk : nh + nk + nl]
    return LinearRelation(nh, nl, orthonormalize(both.basis[keep], tol, scale=1.0))


def add_scalar(r: LinearRelation, c: float, tol: Tolerance | None = None) -> LinearRelation:
    """``R + c = {(h, h' + c h) : (h, h') in R}``."""
    if not r.is_square:
        raise DimensionMismatch("add_scalar needs a relation in a single space")
    return LinearRelation.from_pairs(r.first, r.second + c * r.first, tol)


def left_multiply(m, r: LinearRelation, tol: Tolerance | None = None) -> LinearRelation:
    """``M R = {(h, M k) : (h, k) in R}`` for an everywhere defined matrix ``M``."""
    m = as_matrix(m, cols=r.dim_k)
    return LinearRelation.from_pairs(r.first, m @ r.second, tol, scale=1.0)


@dataclass(frozen=True)
class Split:
    reg: LinearRelation
    sing: LinearRelation
    p0: np.ndarray


def regular_singular_split(r: LinearRelation, tol: Tolerance | None = None) -> Split:
    """``R_reg = (I - P0) R`` and ``R_sing = P0 R`` with ``P0`` the projection onto
    ``mul R`` (= ``mul R**`` here)."""
    tol = resolve(tol)
    p0 = parts(r, tol).mul.projector()
    reg = left_multiply(np.eye(r.dim_k) - p0, r, tol)
    sing = left_multiply(p0, r, tol)
    return Split(reg, sing, p0)


def dominates_contractively(r1: LinearRelation, r2: LinearRelation, tol: Tolerance | None = None) -> bool:
    """``R1 <_c R2``: ``dom R2 in dom R1`` and ``|R1 x| <= |R2 x|`` on ``dom R2``."""
    tol = resolve(tol)
    if r1.dim_h != r2.dim_h:
        raise DimensionMismatch("relations start in different spaces")
    if not (is_operator(r1, tol) and is_operator(r2, tol)):
        raise PreconditionError("contractive domination is defined for operators only")
    d1 = parts(r1, tol).dom
    d2 = parts(r2, tol).dom
    if not d2.issubset(d1, tol):
        return False
    if d2.dim == 0:
        return True
    a = operator_matrix(r1, tol) @ d2.basis
    b = operator_matrix(r2, tol) @ d2.basis
    gap = b.conj().T @ b - a.conj().T @ a
    return lambda_min(gap) >= -tol.psd_clamp
