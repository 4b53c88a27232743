"""Semibounded sesquilinear forms on subspaces of C^n and their representing maps.

A form is stored as its domain (orthonormal basis ``B``, n x d) and the
Hermitian d x d matrix ``M`` with ``t[phi, psi] = <M B* phi, B* psi>``.  A
representing map for ``t - c`` is a matrix ``q`` (k x d) with
``t[phi, psi] - c <phi, psi> = <q B* phi, q B* psi>``.
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
from .linalg import (
    Subspace,
    Tolerance,
    as_matrix,
    check_hermitian,
    eigh,
    lambda_min,
    opnorm,
    orthonormalize,
    pinv,
    resolve,
    svd_rank,
)
from .relation import LinearRelation
from .relation import closure as relation_closure

FINITE_DIM_CERTIFICATE = (
    "finite dimension: every representing map is a bounded operator on a closed "
    "domain, so every form is closed (hence closable) and only the zero form is singular"
)


@dataclass(frozen=True, eq=False)
class HermitianForm:
    domain: Subspace
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.domain.dim, self.domain.dim):
            raise DimensionMismatch(
                f"form matrix is {m.shape[0]}x{m.shape[1]}, domain has dimension {self.domain.dim}"
            )
        object.__setattr__(self, "matrix", check_hermitian(m, what="form matrix"))

    @classmethod
    def full(cls, matrix) -> "HermitianForm":
        """Everywhere defined form on C^n with the given Hermitian matrix."""
        m = as_matrix(matrix)
        return cls(Subspace.full(m.shape[0]), m)

    @classmethod
    def from_basis(cls, basis, matrix, tol: Tolerance | None = None) -> "HermitianForm":
        """Form given by ``t[B x, B y] = y* M x`` for an arbitrary full-rank basis ``B``."""
        tol = resolve(tol)
        b = as_matrix(basis)
        m = as_matrix(matrix, rows=b.shape[1], cols=b.shape[1])
        if b.shape[1] == 0:
            return cls(Subspace.zero(b.shape[0]), np.zeros((0, 0)))
        q, r = np.linalg.qr(b)
        # positive diagonal makes the factorization unique: orthonormal input is kept
        diag = np.diag(r)
        ph = np.where(np.abs(diag) > 0, diag / np.where(diag == 0, 1, np.abs(diag)), 1)
        q = q * ph
        r = ph.conj()[:, None] * r
        if svd_rank(np.linalg.svd(r, compute_uv=False), r.shape, tol) < b.shape[1]:
            raise InvariantViolation("domain basis is rank deficient")
        rinv = np.linalg.inv(r)
        return cls(Subspace(q, False), rinv.conj().T @ m @ rinv)

    @classmethod
    def from_operator(cls, a, domain: Subspace | None = None) -> "HermitianForm":
        """Restriction of ``<A phi, psi>`` to ``domain``."""
        a = as_matrix(a)
        if domain is None:
            domain = Subspace.full(a.shape[0])
        b = domain.basis
        return cls(domain, b.conj().T @ a @ b)

    @classmethod
    def vacuous(cls, n: int) -> "HermitianForm":
        return cls(Subspace.zero(n), np.zeros((0, 0)))

    @property
    def ambient(self) -> int:
        return self.domain.ambient

    @property
    def dim(self) -> int:
        return self.domain.dim

    def ambient_matrix(self) -> np.ndarray:
        """n x n matrix ``B M B*`` (zero on the orthogonal complement of the domain)."""
        b = self.domain.basis
        return b @ self.matrix @ b.conj().T

    def matrix_in(self, domain: Subspace, tol: Tolerance | None = None) -> np.ndarray:
        """This form's matrix in the coordinates of another basis of the same domain."""
        if not domain.equals(self.domain, tol):
            raise PreconditionError("domains differ")
        u = self.domain.basis.conj().T @ domain.basis
        return u.conj().T @ self.matrix @ u

    def equals(self, other: "HermitianForm", tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        if self.ambient != other.ambient or not self.domain.equals(other.domain, tol):
            return False
        diff = other.matrix_in(self.domain, tol) - self.matrix
        return diff.size == 0 or float(np.max(np.abs(diff))) <= tol.eq_abs

    def __repr__(self):
        return f"HermitianForm(ambient={self.ambient}, dom dim={self.dim})"


def _coords(t: HermitianForm, v, tol: Tolerance) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.shape[0] != t.ambient:
        raise DimensionMismatch(f"vector has length {v.shape[0]}, expected {t.ambient}")
    if not t.domain.contains(v, tol):
        raise NotInDomain("vector is not in dom t")
    return t.domain.coords(v)


def evaluate(t: HermitianForm, phi, psi, tol: Tolerance | None = None) -> complex:
    """``t[phi, psi]``: linear in ``phi``, antilinear in ``psi``."""
    tol = resolve(tol)
    x = _coords(t, phi, tol)
    y = _coords(t, psi, tol)
    return complex(np.vdot(y, t.matrix @ x))


def lower_bound(t: HermitianForm) -> float:
    """``m(t)``; ``inf`` for the vacuous form on ``{0}``."""
    return lambda_min(t.matrix)


def shift(t: HermitianForm, a: float) -> HermitianForm:
    """``t + a``."""
    return HermitianForm(t.domain, t.matrix + a * np.eye(t.dim))


def add(t1: HermitianForm, t2: HermitianForm, tol: Tolerance | None = None) -> HermitianForm:
    if t1.ambient != t2.ambient:
        raise DimensionMismatch("forms live in different spaces")
    try:
        m2 = t2.matrix_in(t1.domain, tol)
    except PreconditionError:
        raise PreconditionError("add needs forms with equal domains") from None
    return HermitianForm(t1.domain, t1.matrix + m2)


def subtract(t1: HermitianForm, t2: HermitianForm, tol: Tolerance | None = None) -> HermitianForm:
    return add(t1, HermitianForm(t2.domain, -t2.matrix), tol)


def restrict(t: HermitianForm, sub: Subspace, tol: Tolerance | None = None) -> HermitianForm:
    tol = resolve(tol)
    if not sub.issubset(t.domain, tol):
        raise NotInDomain("restriction target is not inside dom t")
    c = t.domain.basis.conj().T @ sub.basis
    return HermitianForm(sub, c.conj().T @ t.matrix @ c)


def zero_form(domain: Subspace) -> HermitianForm:
    return HermitianForm(domain, np.zeros((domain.dim, domain.dim)))


def kernel(t: HermitianForm, c: float, tol: Tolerance | None = None) -> Subspace:
    """``ker(t - c) = {phi : t[phi] = c |phi|^2}`` for ``c <= m(t)``."""
    tol = resolve(tol)
    if c > lower_bound(t) + tol.psd_clamp:
        raise NotALowerBound(f"c = {c} exceeds m(t) = {lower_bound(t)}")
    w, v = eigh(t.matrix)
    sel = (w - c) <= tol.psd_clamp
    return orthonormalize(t.domain.basis @ v[:, sel], tol)


def leq(t1: HermitianForm, t2: HermitianForm, tol: Tolerance | None = None) -> bool:
    """``t1 <= t2``: ``dom t2 in dom t1`` and ``t1[phi] <= t2[phi]`` on ``dom t2``."""
    tol = resolve(tol)
    if not t2.domain.issubset(t1.domain, tol):
        return False
    if t2.dim == 0:
        return True
    gap = t2.matrix - restrict(t1, t2.domain, tol).matrix
    return lambda_min(gap) >= -tol.psd_clamp


def is_restriction(small: HermitianForm, big: HermitianForm, tol: Tolerance | None = None) -> bool:
    """``small`` is contained in ``big`` (``big`` extends ``small``)."""
    tol = resolve(tol)
    if not small.domain.issubset(big.domain, tol):
        return False
    diff = restrict(big, small.domain, tol).matrix - small.matrix
    return diff.size == 0 or float(np.max(np.abs(diff))) <= tol.eq_abs


# -- representing maps -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RepresentingMap:
    """``q`` acts on domain coordinates; codomain is C^k with ``k = q.shape[0]``."""

    domain: Subspace
    shift: float
    q: np.ndarray
    minimal: bool

    @property
    def codomain_dim(self) -> int:
        return self.q.shape[0]

    def ambient_matrix(self) -> np.ndarray:
        """k x n matrix acting as the map on its domain and as zero off it."""
        return self.q @ self.domain.basis.conj().T

    def apply(self, phi) -> np.ndarray:
        return self.q @ self.domain.coords(phi)

    def as_relation(self, tol: Tolerance | None = None) -> LinearRelation:
        """Graph ``{(B x, q x)}`` as a relation C^n -> C^k."""
        return LinearRelation.from_pairs(self.domain.basis, self.q, tol)

    def form(self) -> HermitianForm:
        """The form ``c + <q ., q .>`` this map represents."""
        return HermitianForm(self.domain, self.shift * np.eye(self.domain.dim) + self.q.conj().T @ self.q)

    def check_minimal(self, tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        if self.codomain_dim == 0:
            return True
        s = np.linalg.svd(self.q, compute_uv=False) if self.q.size else np.zeros(0)
        return svd_rank(s, self.q.shape, tol) == self.codomain_dim

    def minimalized(self, tol: Tolerance | None = None) -> "RepresentingMap":
        """Same map with the codomain cut down to ``ran q``."""
        tol = resolve(tol)
        ran = orthonormalize(self.q, tol)
        return RepresentingMap(self.domain, self.shift, ran.basis.conj().T @ self.q, True)

    def in_domain_basis(self, domain: Subspace, tol: Tolerance | None = None) -> np.ndarray:
        """``q`` expressed in the coordinates of another basis of the same domain."""
        if not domain.equals(self.domain, tol):
            raise PreconditionError("domains differ")
        return self.q @ (self.domain.basis.conj().T @ domain.basis)


def representing_map(
    t: HermitianForm, c: float, minimal: bool = True, tol: Tolerance | None = None
) -> RepresentingMap:
    """Canonical representing map ``q = (M - c)^(1/2)`` for ``t - c``.

    When ``M - c`` is invertible ``q`` is already minimal and stays d x d (its
    codomain is identified with the domain coordinates).  Otherwise, with
    ``minimal=True``, the codomain is cut down to an orthonormal eigenbasis of
    ``ran q``.
    """
    tol = resolve(tol)
    m = lower_bound(t)
    if c > m + tol.psd_clamp:
        raise NotALowerBound(f"c = {c} is not a lower bound (m(t) = {m})")
    d = t.dim
    if d == 0:
        return RepresentingMap(t.domain, float(c), np.zeros((0, 0), dtype=complex), True)
    w, v = eigh(t.matrix)
    s = w - c
    # shifted eigenvalues below the round-off level of forming M - c I are zero
    scale = max(float(np.max(np.abs(w))), abs(c))
    s = np.where(s < tol.cutoff((d, d), scale), 0.0, s)
    root = np.sqrt(s)
    keep = root > 0
    if keep.all() or not minimal:
        q = (v * root) @ v.conj().T
        q = (q + q.conj().T) / 2
        return RepresentingMap(t.domain, float(c), q, bool(keep.all()))
    q = root[keep, None] * v[:, keep].conj().T
    return RepresentingMap(t.domain, float(c), q, True)


def connect_representations(
    q1: RepresentingMap, q2: RepresentingMap, tol: Tolerance | None = None
) -> np.ndarray:
    """Partial isometry ``V`` with ``V q1 = q2``, initial space ``ran q1``."""
    tol = resolve(tol)
    if not q1.domain.equals(q2.domain, tol):
        raise PreconditionError("representing maps have different domains")
    if abs(q1.shift - q2.shift) > tol.eq_abs:
        raise PreconditionError("representing maps use different shifts")
    a = q1.q
    b = q2.in_domain_basis(q1.domain, tol)
    gram_gap = a.conj().T @ a - b.conj().T @ b
    if gram_gap.size and float(np.max(np.abs(gram_gap))) > tol.eq_abs * max(1.0, opnorm(a) ** 2):
        raise PreconditionError("maps represent different forms")
    return b @ pinv(a, tol)


@dataclass(frozen=True)
class Classification:
    closable: bool
    closed: bool
    singular: bool
    certificate: str = FINITE_DIM_CERTIFICATE


def classify(t: HermitianForm, tol: Tolerance | None = None) -> Classification:
    tol = resolve(tol)
    singular = t.dim == 0 or float(np.max(np.abs(t.matrix))) <= tol.eq_abs
    return Classification(True, True, singular)


def closure(t: HermitianForm, tol: Tolerance | None = None) -> HermitianForm:
    """The closure of ``t``: the representing map is a closed operator, so ``t``
    itself."""
    q = representing_map(t, lower_bound(t) if t.dim else 0.0, tol=tol)
    relation_closure(q.as_relation(tol), tol)
    return t


def is_bounded(t: HermitianForm) -> bool:
    return math.isfinite(opnorm(t.matrix))
