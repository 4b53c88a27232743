import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from formkit import documents
from formkit.decomp import contraction
from formkit.documents import ParseError, dumps, load, loads
from formkit.errors import InvariantViolation, NotHermitianError
from formkit.form import HermitianForm
from formkit.linalg import DEFAULT_TOL, Subspace
from formkit.monotone import NONDECREASING, NONINCREASING, AffineFamily, ExplicitChain
from formkit.relation import LinearRelation

from helpers import FIXTURES, random_contraction, random_form, random_psd, random_subspace

# 12 significant digits survive a round trip
ROUND_TRIP = 1e-10


def _split(doc, numbers):
    """Replace every number by a placeholder, collecting the numbers in order."""
    if isinstance(doc, list):
        return [_split(x, numbers) for x in doc]
    if isinstance(doc, dict):
        return {k: _split(v, numbers) for k, v in sorted(doc.items())}
    if isinstance(doc, (int, float)) and not isinstance(doc, bool):
        numbers.append(float(doc))
        return 0
    return doc


def same_document(a, b):
    """Same structure, numbers equal up to one unit in the last emitted digit.

    Reading re-orthonormalizes bases, which can move the final rounding.
    """
    na, nb = [], []
    if _split(json.loads(a), na) != _split(json.loads(b), nb):
        return False
    na, nb = np.array(na), np.array(nb)
    return np.max(np.abs(na - nb), initial=0) <= 2e-12 * max(1.0, np.abs(na).max(initial=0))


def test_f1_fixture():
    kind, t = load(FIXTURES / "f1_form.json")
    assert kind == "form"
    assert t.equals(HermitianForm(Subspace(np.array([[1.0], [0.0]])), np.array([[2.0]])))


def test_emit_f1_is_normative_text():
    t = HermitianForm(Subspace(np.array([[1.0], [0.0]])), np.array([[2.0]]))
    doc = json.loads(dumps(t))
    assert doc == {"kind": "form", "ambient_dim": 2, "domain_basis": [[[1, 0]], [[0, 0]]], "matrix": [[[2, 0]]]}


def test_round_real():
    assert documents.round_real(-0.0) == 0.0
    assert str(documents.round_real(-0.0)) == "0.0"
    assert documents.round_real(1 / 3) == 0.333333333333


class TestParseErrors:
    def test_malformed_json(self):
        with pytest.raises(ParseError):
            load(FIXTURES / "malformed.json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load(tmp_path / "absent.json")

    def test_unknown_kind(self):
        with pytest.raises(ParseError):
            loads('{"kind": "operator"}')

    def test_not_an_object(self):
        with pytest.raises(ParseError):
            loads("[1, 2]")

    def test_expected_kind(self):
        with pytest.raises(ParseError):
            load(FIXTURES / "f1_form.json", expect="contraction")

    def test_ragged_matrix(self):
        with pytest.raises(ParseError):
            loads('{"kind": "contraction", "matrix": [[[1, 0]], [[0, 0], [1, 0]]]}')

    def test_bad_entry(self):
        with pytest.raises(ParseError):
            loads('{"kind": "contraction", "matrix": [[[1, 0, 3]]]}')

    def test_missing_field(self):
        with pytest.raises(ParseError):
            loads('{"kind": "form", "ambient_dim": 2}')


class TestInvariantErrors:
    def test_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            load(FIXTURES / "nonhermitian_form.json")

    def test_contraction_too_big(self):
        with pytest.raises(InvariantViolation):
            load(FIXTURES / "k_too_big.json")

    def test_dimension_mismatch(self):
        text = '{"kind": "form", "ambient_dim": 3, "domain_basis": [[[1, 0]], [[0, 0]]], "matrix": [[[2, 0]]]}'
        with pytest.raises(InvariantViolation):
            loads(text)


def _seeded(draw):
    return np.random.default_rng(draw(st.integers(0, 2**32 - 1)))


@st.composite
def forms(draw):
    rng = _seeded(draw)
    n = draw(st.integers(1, 6))
    return random_form(rng, n, int(rng.integers(0, n + 1)), scale=3.0)


@given(forms())
def test_form_round_trip(t):
    _, back = loads(dumps(t))
    assert back.equals(t, DEFAULT_TOL.replace(eq_abs=ROUND_TRIP))
    assert same_document(dumps(back), dumps(t))
    assert dumps(t) == dumps(t)


@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_relation_round_trip(h, k, seed):
    rng = np.random.default_rng(seed)
    r = LinearRelation(h, k, random_subspace(rng, h + k, int(rng.integers(0, h + k + 1))))
    _, back = loads(dumps(r))
    assert back.graph.distance(r.graph) <= ROUND_TRIP
    assert same_document(dumps(back), dumps(r))


@given(st.integers(1, 6), st.sampled_from(["generic", "projection", "mixed"]), st.integers(0, 2**32 - 1))
def test_contraction_round_trip(k, kind, seed):
    c = contraction(random_contraction(np.random.default_rng(seed), k, kind))
    _, back = loads(dumps(c))
    assert np.max(np.abs(back.k - c.k)) <= ROUND_TRIP
    assert dumps(back) == dumps(c)


@given(st.integers(1, 4), st.sampled_from([NONDECREASING, NONINCREASING]), st.integers(0, 2**32 - 1))
def test_affine_round_trip(n, sense, seed):
    rng = np.random.default_rng(seed)
    r = random_form(rng, n)
    seq = AffineFamily(r, HermitianForm(r.domain, random_psd(rng, n)), sense)
    _, back = loads(dumps(seq))
    assert back.sense == sense
    assert back.r.equals(r, DEFAULT_TOL.replace(eq_abs=ROUND_TRIP))
    assert same_document(dumps(back), dumps(seq))


def test_chain_round_trip():
    _, seq = load(FIXTURES / "growing_chain.json")
    assert isinstance(seq, ExplicitChain) and len(seq.forms) == 3
    _, back = loads(dumps(seq))
    assert all(a.equals(b) for a, b in zip(back.forms, seq.forms))
    assert dumps(back) == dumps(seq)
