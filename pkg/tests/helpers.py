"""Random instance generators and independent oracles for the test suite.

The oracles deliberately avoid the library's own linear algebra helpers.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from formkit.form import HermitianForm
from formkit.linalg import Subspace

FIXTURES = Path(__file__).parent / "fixtures"


def random_complex(rng, m, n):
    return rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))


def random_unitary(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d, scale=1.0):
    g = random_complex(rng, d, d)
    return scale * (g + g.conj().T) / 2


def random_psd(rng, d, rank=None):
    rank = d if rank is None else rank
    g = random_complex(rng, d, rank)
    return g @ g.conj().T


def random_subspace(rng, n, d):
    q, _ = np.linalg.qr(random_complex(rng, n, d))
    return Subspace(q)


def random_form(rng, n, d=None, scale=1.0):
    d = n if d is None else d
    return HermitianForm(random_subspace(rng, n, d), random_hermitian(rng, d, scale))


def random_contraction(rng, k, kind="generic"):
    """Nonnegative contraction; ``kind`` is generic, projection or mixed
    (eigenvalues drawn from {0, 1} and the open interval)."""
    u = random_unitary(rng, k)
    if kind == "projection":
        w = rng.integers(0, 2, size=k).astype(float)
    elif kind == "mixed":
        w = rng.choice([0.0, 1.0, 0.5, rng.uniform(0.05, 0.95)], size=k)
    else:
        w = rng.uniform(0.0, 1.0, size=k)
    return (u * w) @ u.conj().T


def hermitian_root(m):
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def variational_parallel_sum(a, b):
    """``A : B`` from the minimization ``inf_h <A(phi + h), phi + h> + <B h, h>``
    solved column by column as a least-squares problem."""
    d = a.shape[0]
    ra, rb = hermitian_root(a), hermitian_root(b)
    stacked = np.vstack([ra, rb])
    rhs = np.vstack([-ra, np.zeros_like(rb)])
    h, *_ = np.linalg.lstsq(stacked, rhs, rcond=1e-13)
    e = np.eye(d) + h
    p = e.conj().T @ a @ e + h.conj().T @ b @ h
    return (p + p.conj().T) / 2


def sampled_lower_bound(m, rng, samples=100_000, polish=20_000):
    """Rayleigh-quotient minimum over random unit vectors, then polished by
    power iteration on ``sigma I - M`` started from the best sample."""
    d = m.shape[0]
    x = random_complex(rng, d, samples)
    x /= np.linalg.norm(x, axis=0)
    values = np.real(np.einsum("ij,ij->j", x.conj(), m @ x))
    best = int(np.argmin(values))
    sampled = float(values[best])
    sigma = float(np.abs(m).sum())
    v = x[:, best]
    for _ in range(polish):
        v = sigma * v - m @ v
        v /= np.linalg.norm(v)
    polished = float(np.real(np.vdot(v, m @ v)))
    return sampled, min(sampled, polished)


def subspace_of(columns, tol=1e-10):
    """Orthonormal basis of the column span via an independent SVD cutoff."""
    columns = np.asarray(columns, dtype=complex)
    if columns.shape[1] == 0:
        return np.zeros((columns.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(columns, full_matrices=False)
    return u[:, s > tol * max(1.0, s[0])]


def projector_distance(a, b):
    pa = a @ a.conj().T
    pb = b @ b.conj().T
    return float(np.linalg.norm(pa - pb, 2)) if pa.size else 0.0
