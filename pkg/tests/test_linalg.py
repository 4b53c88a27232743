import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from formkit.errors import DimensionMismatch, InvariantViolation, NonFiniteError, NotPSDError
from formkit.linalg import (
    DEFAULT_TOL,
    EPS,
    Subspace,
    Tolerance,
    as_matrix,
    null_space,
    orthonormalize,
    pinv,
    preimage,
    psd_sqrt,
    rank,
    subspace_ops,
)

from helpers import projector_distance, random_complex, random_psd, random_subspace

E1 = np.array([[1.0], [0.0]])
E2 = np.array([[0.0], [1.0]])


class TestTolerance:
    def test_defaults(self):
        assert DEFAULT_TOL.rank_rel == 64 * EPS
        assert DEFAULT_TOL.eq_abs == 1e-9
        assert DEFAULT_TOL.psd_clamp == 1e-9

    @pytest.mark.parametrize("field", ["rank_rel", "eq_abs", "psd_clamp"])
    def test_rejects_nonpositive(self, field):
        with pytest.raises(InvariantViolation):
            Tolerance(**{field: 0.0})
        with pytest.raises(InvariantViolation):
            Tolerance(**{field: -1e-3})

    def test_rank_rel_below_one(self):
        with pytest.raises(InvariantViolation):
            Tolerance(rank_rel=1.0)

    def test_override_string(self):
        tol = Tolerance.parse_override("rank=1e-10,eq=1e-6")
        assert tol.rank_rel == 1e-10 and tol.eq_abs == 1e-6
        assert tol.psd_clamp == DEFAULT_TOL.psd_clamp
        assert Tolerance.parse_override("eq=2e-9").rank_rel == DEFAULT_TOL.rank_rel

    def test_override_rejects_garbage(self):
        with pytest.raises(ValueError):
            Tolerance.parse_override("speed=3")


class TestMatrixInput:
    def test_nonfinite(self):
        with pytest.raises(NonFiniteError):
            as_matrix([[np.nan]])
        with pytest.raises(NonFiniteError):
            as_matrix([[1.0, np.inf]])

    def test_shape_check(self):
        with pytest.raises(DimensionMismatch):
            as_matrix(np.eye(2), rows=3)


class TestOrthonormalize:
    def test_already_orthonormal(self):
        s = orthonormalize(E1)
        assert s.dim == 1
        assert np.allclose(s.basis, E1)

    def test_collinear_columns(self):
        s = orthonormalize([[1.0, 2.0], [0.0, 0.0]])
        assert s.dim == 1
        assert s.equals(Subspace(E1))

    def test_low_rank_product(self, rng):
        a = random_complex(rng, 6, 2)
        b = random_complex(rng, 2, 4)
        s = orthonormalize(a @ b)
        assert s.dim == 2
        assert s.equals(orthonormalize(a))

    def test_round_off_only_matrix_with_scale(self):
        noise = np.full((3, 2), 1e-17)
        assert orthonormalize(noise).dim == 1
        assert orthonormalize(noise, scale=1.0).dim == 0

    def test_zero_columns(self):
        assert orthonormalize(np.zeros((3, 0))).dim == 0


class TestPsdSqrt:
    def test_diagonal(self):
        assert np.allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))

    def test_identity(self):
        assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3))

    def test_random_gram(self, rng):
        g = random_complex(rng, 5, 5)
        m = g.conj().T @ g
        r = psd_sqrt(m)
        assert np.max(np.abs(r @ r - m)) <= 1e-10 * max(1.0, np.abs(m).max())
        assert np.allclose(r, r.conj().T)

    def test_rejects_negative(self):
        with pytest.raises(NotPSDError):
            psd_sqrt(np.diag([1.0, -1e-3]))

    def test_clamps_tiny_negative(self):
        r = psd_sqrt(np.diag([1.0, -1e-12]))
        assert np.allclose(r, np.diag([1.0, 0.0]))


class TestPinv:
    def test_diagonal(self):
        assert np.allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    def test_identity(self):
        assert np.allclose(pinv(np.eye(3)), np.eye(3))

    def test_penrose_identities(self, rng):
        m = random_complex(rng, 4, 2) @ random_complex(rng, 2, 3)
        p = pinv(m)
        assert rank(m) == 2
        assert np.allclose(m @ p @ m, m, atol=1e-9)
        assert np.allclose(p @ m @ p, p, atol=1e-9)
        assert np.allclose((m @ p).conj().T, m @ p, atol=1e-9)
        assert np.allclose((p @ m).conj().T, p @ m, atol=1e-9)


class TestSubspaceOps:
    def test_intersect_axes(self):
        out = subspace_ops(Subspace(E1), Subspace(E2), "intersect")
        assert out.dim == 0

    def test_sum_fills_plane(self):
        out = subspace_ops(Subspace(E1), Subspace.span([[1.0], [1.0]]), "sum")
        assert out.equals(Subspace.full(2))

    def test_complement_of_diagonal(self):
        s = Subspace.span([[1.0], [1.0]])
        comp = subspace_ops(s, None, "complement")
        assert comp.dim == 1
        assert comp.equals(Subspace.span([[1.0], [-1.0]]))
        assert abs(np.vdot(comp.basis[:, 0], s.basis[:, 0])) <= 1e-12

    def test_project(self):
        p = subspace_ops(Subspace(E1), None, "project")
        assert np.allclose(p, np.diag([1.0, 0.0]))

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            subspace_ops(Subspace(E1), Subspace(E1), "xor")

    def test_canonical_is_basis_independent(self, rng):
        s = random_subspace(rng, 5, 3)
        u, _ = np.linalg.qr(random_complex(rng, 3, 3))
        other = Subspace(s.basis @ u)
        assert np.allclose(s.canonical().basis, other.canonical().basis, atol=1e-10)

    def test_preimage(self):
        # a maps e1 -> e1, e2 -> e1 + e2; preimage of span{e1} is span{e1}
        a = np.array([[1.0, 1.0], [0.0, 1.0]])
        pre = preimage(a, Subspace(E1), Subspace.full(2))
        assert pre.equals(Subspace(E1))

    def test_null_space(self):
        ns = null_space(np.array([[1.0, 1.0]]))
        assert ns.shape == (2, 1)
        assert np.allclose(np.array([[1.0, 1.0]]) @ ns, 0)


dims = st.integers(min_value=1, max_value=8)


@st.composite
def subspace_pairs(draw):
    n = draw(dims)
    da = draw(st.integers(0, n))
    db = draw(st.integers(0, n))
    shared = draw(st.integers(0, min(da, db)))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    common = random_complex(rng, n, shared)
    a = np.hstack([common, random_complex(rng, n, da - shared)])
    b = np.hstack([common, random_complex(rng, n, db - shared)])
    return Subspace.span(a), Subspace.span(b)


@given(subspace_pairs())
def test_dimension_formula(pair):
    a, b = pair
    inter = a.intersect(b)
    total = a.sum(b)
    assert inter.dim + total.dim == a.dim + b.dim
    assert inter.issubset(a) and inter.issubset(b)
    assert a.issubset(total) and b.issubset(total)


@given(subspace_pairs())
def test_projector_is_orthogonal_projection(pair):
    a, _ = pair
    p = a.projector()
    assert np.max(np.abs(p @ p - p), initial=0) <= 1e-9
    assert np.max(np.abs(p - p.conj().T), initial=0) <= 1e-9


@given(subspace_pairs())
def test_complement_is_involution(pair):
    a, _ = pair
    comp = a.complement()
    assert comp.dim + a.dim == a.ambient
    assert comp.complement().equals(a)
    assert projector_distance(comp.basis, a.complement().basis) <= 1e-9


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_psd_sqrt_squares_back(d, seed):
    rng = np.random.default_rng(seed)
    m = random_psd(rng, d, rank=int(rng.integers(0, d + 1)))
    r = psd_sqrt(m)
    assert np.max(np.abs(r @ r - m), initial=0) <= 1e-9 * max(1.0, np.abs(m).max(initial=0))


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_pinv_penrose(m, n, seed):
    rng = np.random.default_rng(seed)
    r = int(rng.integers(0, min(m, n) + 1))
    a = random_complex(rng, m, r) @ random_complex(rng, r, n)
    p = pinv(a)
    scale = max(1.0, np.abs(a).max(initial=0)) ** 2
    assert np.max(np.abs(a @ p @ a - a), initial=0) <= 1e-9 * scale
    assert np.max(np.abs((a @ p).conj().T - a @ p), initial=0) <= 1e-9
    assert np.max(np.abs((p @ a).conj().T - p @ a), initial=0) <= 1e-9
