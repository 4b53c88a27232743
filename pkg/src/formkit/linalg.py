"""Tolerance-aware dense complex linear algebra.

Every "is this subspace closed / is this vector zero / is this rank r"
question in the rest of the package is a rank decision made here, under a
single :class:`Tolerance` policy.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvariantViolation,
    NonFiniteError,
    NotHermitianError,
    NotPSDError,
)

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Tolerance:
    """Numerical policy shared by all operations.

    ``rank_rel`` is a per-dimension factor: a singular value counts when it is
    at least ``rank_rel * max(rows, cols) * sigma_max``.  The default makes
    this the usual ``64 * eps * max(rows, cols)`` relative cutoff.
    """

    rank_rel: float = 64 * EPS
    eq_abs: float = 1e-9
    psd_clamp: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "eq_abs", "psd_clamp"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvariantViolation(f"Tolerance.{name} must be positive, got {value!r}")
        if self.rank_rel >= 1:
            raise InvariantViolation("Tolerance.rank_rel must be < 1")

    def cutoff(self, shape, scale):
        """Absolute singular-value threshold for a matrix of ``shape`` whose largest
        singular value (or natural magnitude) is ``scale``."""
        return self.rank_rel * max(max(shape, default=1), 1) * scale

    def replace(self, **changes) -> "Tolerance":
        values = {"rank_rel": self.rank_rel, "eq_abs": self.eq_abs, "psd_clamp": self.psd_clamp}
        values.update({k: v for k, v in changes.items() if v is not None})
        return Tolerance(**values)

    @classmethod
    def parse_override(cls, text: str, base: "Tolerance | None" = None) -> "Tolerance":
        """Parse ``"rank=<x>,eq=<y>"`` (either key optional)."""
        base = base or cls()
        changes = {}
        for item in filter(None, (s.strip() for s in text.split(","))):
            m = re.fullmatch(r"(rank|eq|clamp)\s*=\s*(\S+)", item)
            if not m:
                raise ValueError(f"bad tolerance override item {item!r}")
            key = {"rank": "rank_rel", "eq": "eq_abs", "clamp": "psd_clamp"}[m.group(1)]
            changes[key] = float(m.group(2))
        return base.replace(**changes)


DEFAULT_TOL = Tolerance()


def resolve(tol: Tolerance | None) -> Tolerance:
    return DEFAULT_TOL if tol is None else tol


def as_matrix(a, *, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    m = np.array(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix has NaN or Inf entries")
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatch(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionMismatch(f"expected {cols} columns, got {m.shape[1]}")
    return m


def _fix_phases(u: np.ndarray, tol: Tolerance) -> np.ndarray:
    # rotate each column so its first non-negligible coordinate is positive real
    u = u.copy()
    for j in range(u.shape[1]):
        col = u[:, j]
        idx = np.flatnonzero(np.abs(col) > max(tol.eq_abs, 1e-12))
        if idx.size:
            z = col[idx[0]]
            u[:, j] = col * (abs(z) / z)
    return u


def svd_rank(s: np.ndarray, shape, tol: Tolerance, scale: float = 0.0) -> int:
    """Number of singular values above the cutoff; ``scale`` is a floor for the
    reference magnitude (use it when the matrix may be pure round-off)."""
    ref = max(float(s[0]) if s.size else 0.0, scale)
    if ref == 0:
        return 0
    return int(np.count_nonzero(s >= tol.cutoff(shape, ref)))


def rank(m, tol: Tolerance | None = None, *, scale: float = 0.0) -> int:
    tol = resolve(tol)
    m = as_matrix(m)
    if m.size == 0:
        return 0
    return svd_rank(np.linalg.svd(m, compute_uv=False), m.shape, tol, scale)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of C^n stored through an orthonormal basis (n x r)."""

    basis: np.ndarray
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        b = as_matrix(self.basis)
        object.__setattr__(self, "basis", b)
        if self._check and b.shape[1]:
            gram = b.conj().T @ b
            if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-8:
                raise InvariantViolation("Subspace basis is not orthonormal")

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0), dtype=complex), False)

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n, dtype=complex), False)

    @classmethod
    def span(cls, columns, tol: Tolerance | None = None) -> "Subspace":
        return orthonormalize(columns, tol)

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def coords(self, v) -> np.ndarray:
        return self.basis.conj().T @ np.asarray(v, dtype=complex)

    def residual(self, v) -> float:
        """Norm of the component of ``v`` orthogonal to the subspace."""
        v = np.asarray(v, dtype=complex)
        r = v - self.basis @ (self.basis.conj().T @ v)
        return float(np.linalg.norm(r))

    def contains(self, v, tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        v = np.asarray(v, dtype=complex)
        return self.residual(v) <= tol.eq_abs * max(1.0, float(np.linalg.norm(v)))

    def issubset(self, other: "Subspace", tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        _same_ambient(self, other)
        if self.dim == 0:
            return True
        r = self.basis - other.basis @ (other.basis.conj().T @ self.basis)
        return float(np.linalg.norm(r, 2)) <= tol.eq_abs

    def distance(self, other: "Subspace") -> float:
        """Spectral distance of the orthogonal projections (sine of the largest
        principal angle when dimensions agree, 1 otherwise)."""
        _same_ambient(self, other)
        if self.ambient == 0:
            return 0.0
        return float(np.linalg.norm(self.projector() - other.projector(), 2))

    def equals(self, other: "Subspace", tol: Tolerance | None = None) -> bool:
        tol = resolve(tol)
        return self.dim == other.dim and self.distance(other) <= tol.eq_abs

    def intersect(self, other: "Subspace", tol: Tolerance | None = None) -> "Subspace":
        return subspace_ops(self, other, "intersect", tol)

    def sum(self, other: "Subspace", tol: Tolerance | None = None) -> "Subspace":
        return subspace_ops(self, other, "sum", tol)

    def complement(self, tol: Tolerance | None = None) -> "Subspace":
        return subspace_ops(self, None, "complement", tol)

    def canonical(self) -> "Subspace":
        """Basis-independent representative: reduced column-echelon basis of the
        subspace, then Gram-Schmidt in column order with positive pivots."""
        return Subspace(canonical_basis(self.basis), False)

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, dim={self.dim})"


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient != b.ambient:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient} vs {b.ambient}")


def orthonormalize(columns, tol: Tolerance | None = None, *, scale: float = 0.0) -> Subspace:
    """Orthonormal basis for the numerical column space of ``columns``.

    Rank is decided by singular values ``>= cutoff``; the basis is the leading
    left singular vectors with phases fixed, so equal inputs give equal bytes.
    """
    tol = resolve(tol)
    m = as_matrix(columns)
    n = m.shape[0]
    if m.shape[1] == 0 or n == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = svd_rank(s, m.shape, tol, scale)
    return Subspace(_fix_phases(u[:, :r], tol), False)


def canonical_basis(basis: np.ndarray, pivot_tol: float = 1e-6) -> np.ndarray:
    n, r = basis.shape
    if r == 0:
        return basis.copy()
    # greedy pivot rows in index order: the leading ones of the column echelon form
    pivots: list[int] = []
    chosen = np.zeros((0, r), dtype=complex)
    for i in range(n):
        row = basis[i : i + 1, :]
        if chosen.shape[0]:
            q, _ = np.linalg.qr(chosen.conj().T)
            row = row - (row @ q) @ q.conj().T
        if np.linalg.norm(row) > pivot_tol:
            pivots.append(i)
            chosen = basis[pivots, :]
            if len(pivots) == r:
                break
    echelon = basis @ np.linalg.inv(basis[pivots, :])
    q, rr = np.linalg.qr(echelon)
    d = np.diag(rr)
    return q * (np.abs(d) / d)


def subspace_ops(a: Subspace, b: Subspace | None, which: str, tol: Tolerance | None = None):
    """``which`` in {"intersect", "sum", "complement", "project"}.

    ``project`` ignores ``b`` and returns the orthogonal projection matrix onto ``a``.
    """
    tol = resolve(tol)
    if which == "project":
        return a.projector()
    if which == "complement":
        n = a.ambient
        if a.dim == 0:
            return Subspace.full(n)
        if a.dim == n:
            return Subspace.zero(n)
        u, _, _ = np.linalg.svd(a.basis, full_matrices=True)
        return Subspace(_fix_phases(u[:, a.dim :], tol), False)
    if b is None:
        raise ValueError(f"{which} needs two subspaces")
    _same_ambient(a, b)
    if which == "sum":
        return orthonormalize(np.hstack([a.basis, b.basis]), tol)
    if which == "intersect":
        if a.dim == 0 or b.dim == 0:
            return Subspace.zero(a.ambient)
        # x = A u = B v  <=>  [A, -B] (u, v) = 0
        coeff = null_space(np.hstack([a.basis, -b.basis]), tol)
        return orthonormalize(a.basis @ coeff[: a.dim, :], tol)
    raise ValueError(f"unknown subspace operation {which!r}")


def null_space(m, tol: Tolerance | None = None, *, scale: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical null space of ``m``."""
    tol = resolve(tol)
    m = as_matrix(m)
    ncols = m.shape[1]
    if ncols == 0:
        return np.zeros((0, 0), dtype=complex)
    if m.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = svd_rank(s, m.shape, tol, scale)
    return vh[r:, :].conj().T


def is_hermitian(m, tol: Tolerance | None = None) -> bool:
    tol = resolve(tol)
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return m.size == 0 or float(np.max(np.abs(m - m.conj().T))) <= tol.eq_abs


def hermitize(m) -> np.ndarray:
    return (m + m.conj().T) / 2


def check_hermitian(m, tol: Tolerance | None = None, what: str = "matrix") -> np.ndarray:
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError(f"{what} is not Hermitian")
    return hermitize(m)


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros(0), np.zeros((m.shape[0], 0), dtype=complex)
    return np.linalg.eigh(hermitize(m))


def lambda_min(m) -> float:
    """Smallest eigenvalue of a Hermitian matrix; ``inf`` for a 0 x 0 matrix."""
    w, _ = eigh(m)
    return float(w[0]) if w.size else float("inf")


def is_psd(m, tol: Tolerance | None = None) -> bool:
    tol = resolve(tol)
    return lambda_min(m) >= -tol.psd_clamp


def psd_sqrt(m, tol: Tolerance | None = None, *, scale: float | None = None) -> np.ndarray:
    """Hermitian square root of a PSD matrix.

    Eigenvalues in ``[-psd_clamp, cutoff)`` are set to zero, where the cutoff is
    the rank threshold relative to ``scale`` (default: the largest eigenvalue
    magnitude).  Pass ``scale`` when ``m`` came from a cancellation such as
    ``A - c I`` so round-off of that size is not mistaken for signal.
    """
    tol = resolve(tol)
    m = check_hermitian(m, tol)
    w, v = eigh(m)
    if w.size == 0:
        return np.zeros_like(m)
    if w[0] < -tol.psd_clamp:
        raise NotPSDError(f"matrix is not PSD (lambda_min = {w[0]:.3e})")
    big = float(np.max(np.abs(w))) if scale is None else max(float(scale), float(np.max(np.abs(w))))
    w = np.where(w < tol.cutoff(m.shape, big), 0.0, w)
    return hermitize((v * np.sqrt(w)) @ v.conj().T)


def pinv(m, tol: Tolerance | None = None, *, scale: float = 0.0) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the shared rank cutoff."""
    tol = resolve(tol)
    m = as_matrix(m)
    if m.size == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=complex)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = svd_rank(s, m.shape, tol, scale)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def preimage(a: np.ndarray, target: Subspace, within: Subspace, tol: Tolerance | None = None) -> Subspace:
    """``{x in within : a x in target}``."""
    tol = resolve(tol)
    if within.dim == 0:
        return within
    comp = np.eye(target.ambient) - target.projector()
    coeff = null_space(comp @ a @ within.basis, tol, scale=max(opnorm(a), 1.0))
    return orthonormalize(within.basis @ coeff, tol, scale=1.0)


def opnorm(m) -> float:
    m = np.asarray(m)
    return 0.0 if m.size == 0 else float(np.linalg.norm(m, 2))
