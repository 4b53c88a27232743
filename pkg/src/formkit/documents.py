"""JSON documents for forms, relations, contractions and sequences.

Matrices are row-major nested lists whose entries are ``[re, im]`` pairs (a bare
real number is accepted on input).  Output uses 12 significant digits.
"""

from __future__ import annotations

import json
import math
from numbers import Real

import numpy as np

from .decomp import ContractionParam
from .errors import FormkitError, InvariantViolation
from .form import HermitianForm
from .linalg import Tolerance, resolve
from .monotone import SENSES, AffineFamily, ExplicitChain
from .relation import LinearRelation

KINDS = ("form", "relation", "contraction", "sequence")
DIGITS = 12


class ParseError(FormkitError):
    """The input is not a well-formed document."""


# -- reading -------------------------------------------------------------------


def _number(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ParseError(f"{where}: booleans are not numbers")
    if isinstance(x, Real):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, Real) and not isinstance(v, bool) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise ParseError(f"{where}: expected a number or an [re, im] pair, got {x!r}")


def parse_matrix(value, where: str, *, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ParseError(f"{where}: expected a list of rows")
    widths = {len(r) for r in value}
    if len(widths) > 1:
        raise ParseError(f"{where}: rows have different lengths {sorted(widths)}")
    n_rows = len(value)
    n_cols = widths.pop() if widths else (cols or 0)
    out = np.zeros((n_rows, n_cols), dtype=complex)
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            out[i, j] = _number(x, f"{where}[{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise InvariantViolation(f"{where}: entries must be finite")
    if rows is not None and n_rows != rows:
        raise InvariantViolation(f"{where}: expected {rows} rows, got {n_rows}")
    if cols is not None and n_cols != cols:
        raise InvariantViolation(f"{where}: expected {cols} columns, got {n_cols}")
    return out


def _field(doc: dict, key: str):
    if key not in doc:
        raise ParseError(f"document of kind {doc.get('kind')!r} is missing {key!r}")
    return doc[key]


def _count(doc: dict, key: str) -> int:
    v = _field(doc, key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ParseError(f"{key} must be a nonnegative integer")
    return v


def form_from_doc(doc: dict, tol: Tolerance | None = None) -> HermitianForm:
    n = _count(doc, "ambient_dim")
    basis = parse_matrix(_field(doc, "domain_basis"), "domain_basis", rows=n)
    d = basis.shape[1]
    matrix = parse_matrix(_field(doc, "matrix"), "matrix", rows=d, cols=d)
    return HermitianForm.from_basis(basis, matrix, tol)


def relation_from_doc(doc: dict, tol: Tolerance | None = None) -> LinearRelation:
    h = _count(doc, "dim_h")
    k = _count(doc, "dim_k")
    g = parse_matrix(_field(doc, "graph_basis"), "graph_basis", rows=h + k)
    return LinearRelation.from_pairs(g[:h], g[h:], tol)


def contraction_from_doc(doc: dict, tol: Tolerance | None = None) -> ContractionParam:
    m = parse_matrix(_field(doc, "matrix"), "matrix")
    if m.shape[0] != m.shape[1]:
        raise InvariantViolation("contraction matrix must be square")
    return ContractionParam(m).validate(tol)


def _sub_form(value, where: str, tol) -> HermitianForm:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected a form document")
    return form_from_doc(value, tol)


def sequence_from_doc(doc: dict, tol: Tolerance | None = None):
    sense = _field(doc, "sense")
    if sense not in SENSES:
        raise ParseError(f"sense must be one of {SENSES}")
    encoding = _field(doc, "encoding")
    if encoding == "affine":
        return AffineFamily(_sub_form(_field(doc, "r"), "r", tol), _sub_form(_field(doc, "s"), "s", tol), sense)
    if encoding == "chain":
        forms = _field(doc, "forms")
        if not isinstance(forms, list):
            raise ParseError("forms must be a list")
        bound = doc.get("lower_bound")
        if bound is not None and (isinstance(bound, bool) or not isinstance(bound, Real)):
            raise ParseError("lower_bound must be a number")
        return ExplicitChain(
            tuple(_sub_form(f, f"forms[{i}]", tol) for i, f in enumerate(forms)),
            sense,
            None if bound is None else float(bound),
            tol,
        )
    raise ParseError("encoding must be 'affine' or 'chain'")


_READERS = {
    "form": form_from_doc,
    "relation": relation_from_doc,
    "contraction": contraction_from_doc,
    "sequence": sequence_from_doc,
}


def loads(text: str, tol: Tolerance | None = None, expect: str | None = None):
    """Parse a document; returns ``(kind, value)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if expect is not None and kind != expect:
        raise ParseError(f"expected a {expect} document, got {kind}")
    return kind, _READERS[kind](doc, resolve(tol))


def load(path, tol: Tolerance | None = None, expect: str | None = None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text, tol, expect)


# -- writing -------------------------------------------------------------------


def round_real(x: float) -> float:
    """``x`` rounded to 12 significant digits, with ``-0.0`` folded into ``0.0``."""
    if not math.isfinite(x):
        raise InvariantViolation("cannot serialize a non-finite number")
    y = float(f"{x:.{DIGITS}g}")
    return 0.0 if y == 0 else y


def emit_matrix(m) -> list:
    """Nested ``[re, im]`` rows; parts below the 12th digit of the largest entry are written as 0."""
    m = np.asarray(m, dtype=complex)
    floor = 10.0 ** -DIGITS * max(np.abs(m).max(initial=0.0), 1e-300)
    m = np.where(np.abs(m.real) < floor, 0, m.real) + 1j * np.where(np.abs(m.imag) < floor, 0, m.imag)
    return [[[round_real(z.real), round_real(z.imag)] for z in row] for row in m]


def form_to_doc(t: HermitianForm) -> dict:
    canon = t.domain.canonical() if t.dim else t.domain
    return {
        "kind": "form",
        "ambient_dim": t.ambient,
        "domain_basis": emit_matrix(canon.basis) if t.dim else [[] for _ in range(t.ambient)],
        "matrix": emit_matrix(t.matrix_in(canon)) if t.dim else [],
    }


def relation_to_doc(r: LinearRelation) -> dict:
    g = r.graph.canonical() if r.graph.dim else r.graph
    n = r.dim_h + r.dim_k
    return {
        "kind": "relation",
        "dim_h": r.dim_h,
        "dim_k": r.dim_k,
        "graph_basis": emit_matrix(g.basis) if g.dim else [[] for _ in range(n)],
    }


def contraction_to_doc(k: ContractionParam) -> dict:
    return {"kind": "contraction", "matrix": emit_matrix(k.k)}


def sequence_to_doc(seq) -> dict:
    if isinstance(seq, AffineFamily):
        return {
            "kind": "sequence",
            "encoding": "affine",
            "sense": seq.sense,
            "r": form_to_doc(seq.r),
            "s": form_to_doc(seq.s),
        }
    doc = {
        "kind": "sequence",
        "encoding": "chain",
        "sense": seq.sense,
        "forms": [form_to_doc(f) for f in seq.forms],
    }
    if seq.lower_bound is not None:
        doc["lower_bound"] = round_real(seq.lower_bound)
    return doc


def dumps(value) -> str:
    if isinstance(value, HermitianForm):
        doc = form_to_doc(value)
    elif isinstance(value, LinearRelation):
        doc = relation_to_doc(value)
    elif isinstance(value, ContractionParam):
        doc = contraction_to_doc(value)
    elif isinstance(value, (AffineFamily, ExplicitChain)):
        doc = sequence_to_doc(value)
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    return json.dumps(doc) + "\n"


def dump(value, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(value))

