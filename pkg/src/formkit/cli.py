"""Command line front end.

Reports are ``key=value`` lines on stdout with fixed 12-digit formatting, so the
same input always produces the same bytes.  Exit codes: 0 ok, 2 unreadable
input, 3 invariant violation, 4 precondition failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import documents
from .decomp import (
    contraction,
    decompose_by_contraction,
    lebesgue_decomposition,
    parallel_sum_forms,
    parallel_sum_residual,
)
from .errors import InvariantViolation, PreconditionError
from .form import HermitianForm, classify, lower_bound
from .linalg import DEFAULT_TOL, Tolerance, opnorm
from .monotone import (
    NONINCREASING,
    ExplicitChain,
    limit_relation_connection,
    resolvent_convergence,
)
from .relation import adjoint, is_operator, parts
from .represent import form_from_relation, represent_form, verify_first_representation

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INVARIANT = 3
EXIT_PRECONDITION = 4

ENV_OVERRIDE = "FORMKIT_TOL_OVERRIDE"

# report values smaller than this are printed as 0 so round-off noise cannot
# change the bytes of a report
DISPLAY_FLOOR = 1e-12


def fmt(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if abs(x) < DISPLAY_FLOOR:
        return "0"
    return f"{x:.12g}"


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


def fmt_entry(z: complex) -> str:
    re = fmt(z.real)
    if abs(z.imag) < DISPLAY_FLOOR:
        return re
    im = fmt(abs(z.imag))
    sign = "-" if z.imag < 0 else "+"
    return f"{im}j" if re == "0" and sign == "+" else f"{re}{sign}{im}j"


def fmt_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    return "[" + ", ".join("[" + ", ".join(fmt_entry(z) for z in row) + "]" for row in m) + "]"


class Report:
    def __init__(self):
        self.lines: list[str] = []

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = fmt_bool(value)
        elif isinstance(value, (float, np.floating)):
            value = fmt(value)
        self.lines.append(f"{key}={value}")

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)


def _form_lines(rep: Report, prefix: str, t: HermitianForm) -> None:
    canon = t.domain.canonical() if t.dim else t.domain
    rep.add(f"{prefix}dom dim", t.dim)
    rep.add(f"{prefix}domain basis", fmt_matrix(canon.basis))
    rep.add(f"{prefix}matrix", fmt_matrix(t.matrix_in(canon) if t.dim else t.matrix))


# -- commands ------------------------------------------------------------------


def cmd_inspect(args, tol: Tolerance) -> Report:
    kind, value = documents.load(args.path, tol)
    rep = Report()
    rep.add("kind", kind)
    if kind == "form":
        cls = classify(value, tol)
        rep.add("ambient dim", value.ambient)
        rep.add("dom dim", value.dim)
        rep.add("m(t)", lower_bound(value))
        rep.add("closable", cls.closable)
        rep.add("closed", cls.closed)
        rep.add("singular", cls.singular)
        rep.add("certificate", cls.certificate)
    elif kind == "relation":
        p = parts(value, tol)
        rep.add("dim h", value.dim_h)
        rep.add("dim k", value.dim_k)
        rep.add("graph dim", value.graph.dim)
        for name in ("dom", "ran", "ker", "mul"):
            rep.add(f"{name} dim", getattr(p, name).dim)
        rep.add("operator", is_operator(value, tol))
        rep.add("selfadjoint", value.is_square and adjoint(value, tol).equals(value, tol))
    elif kind == "contraction":
        w = np.linalg.eigvalsh(value.k) if value.dim else np.zeros(0)
        rep.add("dim", value.dim)
        rep.add("eigenvalue min", float(w[0]) if w.size else math.inf)
        rep.add("eigenvalue max", float(w[-1]) if w.size else -math.inf)
        rep.add("projection", value.is_projection(tol))
    else:
        rep.add("encoding", "chain" if isinstance(value, ExplicitChain) else "affine")
        rep.add("sense", value.sense)
        if isinstance(value, ExplicitChain):
            rep.add("length", len(value.forms))
        rep.add("ambient dim", value.term(1).ambient)
    return rep


def _shift_arg(args, t: HermitianForm) -> float:
    # nonnegative forms are split at 0; otherwise at the lower bound
    if args.c is not None:
        return args.c
    return min(0.0, lower_bound(t)) if t.dim else 0.0


def cmd_decompose(args, tol: Tolerance) -> Report:
    _, t = documents.load(args.path, tol, expect="form")
    c = _shift_arg(args, t)
    if args.lebesgue:
        dec = lebesgue_decomposition(t, c, tol)
    else:
        _, k = documents.load(args.contraction, tol, expect="contraction")
        dec = decompose_by_contraction(t, c, contraction(k.k, tol), tol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    documents.dump(dec.t1, out / "t1.json")
    documents.dump(dec.t2, out / "t2.json")
    documents.dump(dec.k, out / "k.json")
    rep = Report()
    rep.add("method", "lebesgue" if args.lebesgue else "contraction")
    rep.add("c", float(c))
    _form_lines(rep, "t1 ", dec.t1)
    _form_lines(rep, "t2 ", dec.t2)
    rep.add("k", fmt_matrix(dec.k.k))
    rep.add("mutually_singular", dec.mutually_singular)
    rep.add("minimal_column", dec.minimal_column)
    rep.add("is_lebesgue_type", dec.is_lebesgue_type)
    rep.add("parallel sum norm", dec.parallel_sum_norm)
    if dec.certificate:
        rep.add("certificate", dec.certificate)
    rep.add("wrote", "t1.json,t2.json,k.json")
    return rep


def cmd_represent(args, tol: Tolerance) -> Report:
    _, t = documents.load(args.path, tol, expect="form")
    c = _shift_arg(args, t)
    a = represent_form(t, c, tol)
    p = parts(a.rel, tol)
    if args.out:
        documents.dump(a.rel, args.out)
    rep = Report()
    rep.add("c", float(c))
    rep.add("ambient dim", a.ambient)
    rep.add("dom dim", p.dom.dim)
    rep.add("mul dim", p.mul.dim)
    rep.add("lower bound", a.lower_bound)
    rep.add("operator part", fmt_matrix(a.operator_part))
    rep.add("graph basis", fmt_matrix(a.rel.graph.canonical().basis))
    rep.add("selfadjoint", adjoint(a.rel, tol).equals(a.rel, tol))
    rep.add("first representation", verify_first_representation(t, a, tol))
    rep.add("round trip", form_from_relation(a, c, tol).equals(t, tol))
    return rep


def cmd_parallel(args, tol: Tolerance) -> Report:
    _, h1 = documents.load(args.first, tol, expect="form")
    _, h2 = documents.load(args.second, tol, expect="form")
    for name, h in (("first", h1), ("second", h2)):
        if h.dim and lower_bound(h) < -tol.psd_clamp:
            raise PreconditionError(f"{name} form is not nonnegative")
    ps = parallel_sum_forms(h1, h2, tol)
    if args.out:
        documents.dump(ps, args.out)
    rep = Report()
    _form_lines(rep, "", ps)
    rep.add("norm", opnorm(ps.matrix) if ps.dim else 0.0)
    rep.add("residual", parallel_sum_residual(h1, h2, tol))
    rep.add("mutually singular", ps.dim == 0 or opnorm(ps.matrix) <= tol.eq_abs)
    return rep


def cmd_limit(args, tol: Tolerance) -> Report:
    _, seq = documents.load(args.path, tol, expect="sequence")
    report = resolvent_convergence(seq, args.lam, args.n_max, args.threshold, tol)
    rep = Report()
    rep.add("encoding", "chain" if isinstance(seq, ExplicitChain) else "affine")
    rep.add("sense", seq.sense)
    rep.add("lambda", report.lam)
    _form_lines(rep, "limit ", report.limit)
    if seq.sense == NONINCREASING:
        conn = limit_relation_connection(seq, tol)
        _form_lines(rep, "t_inf ", conn.t_inf)
        rep.add("closure_of_regular_is_t_inf", conn.closure_of_regular_is_t_inf)
        rep.add("contained_in_t_inf", conn.contained_in_t_inf)
        rep.add("equals_t_inf", conn.equals_t_inf)
        rep.add("singular_matches", conn.singular_matches)
    else:
        limit = report.limit
        c = lower_bound(limit) if limit.dim else 0.0
        _form_lines(rep, "t_inf ", form_from_relation(represent_form(limit, c, tol), c, tol))
    for n, err in enumerate(report.errors, start=1):
        rep.add(f"error[{n}]", err)
    rep.add("final error", report.errors[-1])
    rep.add("monotone", report.monotone)
    rep.add("threshold", report.threshold)
    rep.add("below threshold", report.below_threshold)
    rep.add("exponent", "none" if report.exponent is None else fmt(report.exponent))
    return rep


# -- entry point ---------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formkit", description="Semibounded forms and linear relations in C^n.")
    parser.add_argument("--tol-rank", type=float, help="relative rank cutoff per dimension")
    parser.add_argument("--tol-eq", type=float, help="absolute equality tolerance")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("inspect", help="summarize a document")
    p.add_argument("path")
    p.set_defaults(run=cmd_inspect)

    p = sub.add_parser("decompose", help="split a form by a contraction or by Lebesgue")
    p.add_argument("path")
    p.add_argument("--c", type=float, help="lower bound used for the split (default min(0, m(t)))")
    how = p.add_mutually_exclusive_group(required=True)
    how.add_argument("--contraction", help="contraction document")
    how.add_argument("--lebesgue", action="store_true")
    p.add_argument("--out", default=".", help="directory for t1.json, t2.json, k.json")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("represent", help="selfadjoint relation of a form")
    p.add_argument("path")
    p.add_argument("--c", type=float, help="lower bound (default min(0, m(t)))")
    p.add_argument("--out", help="write the relation document here")
    p.set_defaults(run=cmd_represent)

    p = sub.add_parser("parallel", help="parallel sum of two nonnegative forms")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--out", help="write the parallel sum here")
    p.set_defaults(run=cmd_parallel)

    p = sub.add_parser("limit", help="limit and resolvent convergence of a monotone sequence")
    p.add_argument("path")
    p.add_argument("--lambda", dest="lam", type=float, help="resolvent point (default c - 1)")
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--threshold", type=float, default=0.05)
    p.set_defaults(run=cmd_limit)
    return parser


def tolerance_from(args, environ) -> Tolerance:
    tol = DEFAULT_TOL
    override = environ.get(ENV_OVERRIDE)
    if override:
        tol = Tolerance.parse_override(override, tol)
    return tol.replace(rank_rel=args.tol_rank, eq_abs=args.tol_eq)


def main(argv=None, environ=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    environ = os.environ if environ is None else environ
    try:
        tol = tolerance_from(args, environ)
    except ValueError as exc:
        print(f"error: bad tolerance: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        report = args.run(args, tol)
    except documents.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    sys.stdout.write(report.text())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
