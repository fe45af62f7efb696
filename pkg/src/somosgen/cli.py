"""Command line entry point ``somosgen``.

    somosgen find-rel "p^2-q^2" "2*p*q" "p^2+q^2" --degree 2
    somosgen somos poly 3 "n**2" --max-order 5 --degree 6
    somosgen somos exp 3 2 --max-order 3 --degree 3 --format latex
    somosgen verify rec.json --sequence seq.json --check-terms 30
    somosgen encore --check-terms 12
    somosgen webbook --c 3 4 5 --index "2^n" --max-order 3 --degree 3

Exit codes: 0 pass, 1 verification failure, 2 nothing found, 3 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .cfinite import CFiniteSequence, ExpPolyIndex
from .emit import FailEntry, Proposition
from .exprparse import ParseError, free_names, parse_index, parse_rational
from .polyarith import format_poly
from .relations import (ADVICE, NonlinearRecurrence, NotFound, find_empirical, find_rel,
                        find_somos)
from .verifier import (DEFAULT_CHECK_TERMS, DEFAULT_INTEGRALITY_TERMS, VerificationReport,
                       certify_symbolic, verify_agreement, verify_annihilation,
                       verify_integrality, verify_symbolic_c)

EXIT_OK, EXIT_FAIL, EXIT_NOT_FOUND, EXIT_USAGE = 0, 1, 2, 3
FORMATS = ("text", "latex", "json")
# a(n) = f(b^n) has about b^n digits, so exponential indices get short checks
EXP_CHECK_TERMS = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _load_json(arg: str):
    """A file path or an inline JSON document."""
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = arg
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {arg!r}: {exc}") from None


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- shared pipeline ---------------------------------------------------------


def make_target(f: CFiniteSequence, p: ExpPolyIndex, c: int | None = None) -> dict:
    return {"sequence": f.to_json(), "index": p.to_json(), "c": c}


def default_plan(p: ExpPolyIndex | None, c: int | None, check_terms: int | None, solvable=True,
                 has_target=True) -> list[tuple[str, int]]:
    """Which verifications to run, and how far."""
    small = p is not None and not p.is_polynomial
    n_int = check_terms or (EXP_CHECK_TERMS if small else DEFAULT_INTEGRALITY_TERMS)
    n_ann = check_terms or (EXP_CHECK_TERMS if small else DEFAULT_CHECK_TERMS)
    plan = []
    if has_target:
        plan.append(("annihilation", n_ann))
        if solvable:
            plan.append(("agreement", n_ann))
    if solvable:
        plan.append(("integrality", n_int))
    if has_target and c is not None:
        plan.append(("symbolic", 1))
    return plan


def run_checks(rec: NonlinearRecurrence, target: dict | None, plan) -> list[VerificationReport]:
    f = p = None
    if target:
        f = CFiniteSequence.from_json(target["sequence"])
        p = ExpPolyIndex.from_json(target["index"])
    out = []
    for mode, n in plan:
        if mode == "integrality":
            out.append(verify_integrality(rec, n))
        elif f is None:
            raise UsageError(f"{mode} check needs a target sequence")
        elif mode == "annihilation":
            out.append(verify_annihilation(rec, f, p, n))
        elif mode == "agreement":
            out.append(verify_agreement(rec, f, n, p))
        elif mode == "symbolic":
            if target.get("c") is None:
                raise UsageError("symbolic certification needs the parameter c")
            out.append(certify_symbolic(rec, int(target["c"]), p))
        else:
            raise UsageError(f"unknown verification mode {mode!r}")
    return out


def discover(c_or_seq, p: ExpPolyIndex, max_r: int, d: int, points: int | None = None):
    """(recurrence or NotFound, target)."""
    if isinstance(c_or_seq, CFiniteSequence):
        rec = find_empirical(c_or_seq, p, max_r, d, n_points=points)
        return rec, make_target(c_or_seq, p)
    c = int(c_or_seq)
    rec = find_somos(c, p, max_r, d)
    return rec, make_target(CFiniteSequence.lucas_type(c), p, c)


def build_proposition(c_or_seq, p, max_r, d, check_terms=None, points=None):
    """Proposition, or FailEntry with the reason.  Never raises on bad c."""
    label = f"c = {c_or_seq}, a(n) = f({p})" if not isinstance(c_or_seq, CFiniteSequence) \
        else f"{c_or_seq}, a(n) = f({p})"
    try:
        rec, target = discover(c_or_seq, p, max_r, d, points)
    except ValueError as exc:
        return FailEntry(label, str(exc))
    if isinstance(rec, NotFound):
        return FailEntry(label, rec.reason)
    plan = default_plan(p, target.get("c"), check_terms, rec.solvable)
    reports = run_checks(rec, target, plan)
    if not all(r.passed for r in reports):
        return FailEntry(label, "verification failed", reports)
    return Proposition(rec, reports, target)


# -- subcommands ---------------------------------------------------------------


def cmd_find_rel(args) -> int:
    names = [v.strip() for v in args.vars.split(",") if v.strip()] if args.vars else None
    try:
        if names is None:
            names = sorted({n for e in args.exprs for n in free_names(e)})
        exprs = [parse_rational(e, names) for e in args.exprs]
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rel = find_rel(exprs, args.degree, args.linear_in_last, args.symbol)
    if isinstance(rel, NotFound):
        if args.format == "json":
            _emit(json.dumps({"relation": None, "result": "FAIL", "reason": rel.reason}) + "\n", args.out)
        else:
            _emit("FAIL\n", args.out)
        print(rel.reason, file=sys.stderr)
        return EXIT_NOT_FOUND
    text = format_poly(rel)
    if args.format == "json":
        out = json.dumps({"relation": text, "variables": list(rel.vars), "degree": rel.degree()}) + "\n"
    elif args.format == "latex":
        from .emit import latex_poly
        labels = [f"{v[:len(args.symbol)]}_{{{v[len(args.symbol):]}}}" for v in rel.vars]
        out = f"$$ {latex_poly(rel, labels)} = 0 $$\n"
    else:
        out = f"{text} = 0\n"
    _emit(out, args.out)
    return EXIT_OK


def _seq_or_c(arg: str):
    try:
        return int(arg)
    except ValueError:
        return CFiniteSequence.from_json(_load_json(arg))


def cmd_somos(args) -> int:
    try:
        c_or_seq = _seq_or_c(args.c)
        if args.kind == "poly":
            p = parse_index(args.index)
            if not p.is_polynomial:
                raise UsageError("somos poly needs a polynomial index; use somos exp")
        else:
            base = int(args.base)
            if base < 2:
                raise UsageError("exponential base must be at least 2")
            p = ExpPolyIndex.exponential(base)
    except (ParseError, ValueError, KeyError, TypeError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rec, target = discover(c_or_seq, p, args.max_order, args.degree, args.points)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if isinstance(rec, NotFound):
        msg = rec.reason if ADVICE in rec.reason else f"{rec.reason}; {ADVICE}"
        print(f"FAIL: {msg}", file=sys.stderr)
        if args.format == "json":
            _emit(json.dumps({"type": "fail", "reason": msg}) + "\n", args.out)
        else:
            _emit("FAIL\n", args.out)
        return EXIT_NOT_FOUND
    plan = default_plan(p, target.get("c"), args.check_terms, rec.solvable)
    reports = run_checks(rec, target, plan)
    if not all(r.passed for r in reports):
        for r in reports:
            print(r.summary(), file=sys.stderr)
        return EXIT_FAIL
    _emit(Proposition(rec, reports, target).render(args.format), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        data = _load_json(args.file)
        if data.get("type") == "proposition":
            rec = NonlinearRecurrence.from_json(data["recurrence"])
            target = data.get("target")
            plan = [(r["mode"], int(r["n_checked"])) for r in data["verification"]]
            if args.check_terms:
                plan = [(m, n if m == "symbolic" else args.check_terms) for m, n in plan]
        else:
            rec = NonlinearRecurrence.from_json(data)
            target = None
            c = args.c
            if args.sequence or c is not None:
                f = (CFiniteSequence.from_json(_load_json(args.sequence)) if args.sequence
                     else CFiniteSequence.lucas_type(c))
                p = parse_index(args.index)
                target = make_target(f, p, c)
            p = ExpPolyIndex.from_json(target["index"]) if target else None
            plan = default_plan(p, args.c, args.check_terms, rec.solvable, target is not None)
        reports = run_checks(rec, target, plan)
    except (ParseError, ValueError, KeyError, TypeError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ok = all(r.passed for r in reports)
    if args.format == "json":
        out = json.dumps({"status": "pass" if ok else "fail",
                          "reports": [r.to_json() for r in reports]}, indent=2) + "\n"
    else:
        out = "".join(r.summary() + "\n" for r in reports) + ("PASS\n" if ok else "FAIL\n")
    _emit(out, args.out)
    return EXIT_OK if ok else EXIT_FAIL


ENCORE_TEXT = """Proposition. Let c be a formal symbol, a(0) = 1, a(1) = c, and for n >= 2
    a(n) = a(n-1)*(4 + (c-2)*(c+2)*a(n-1)^2)/(2 + (c-2)*(c+2)*a(n-2)^2)
Then a(n) are polynomials in c with integer coefficients: a(n) = f(2^n) where
f(n) = c*f(n-1) - f(n-2), f(0) = 0, f(1) = 1.
"""


def cmd_encore(args) -> int:
    n_max = args.check_terms or 12
    if n_max < 2:
        print("error: --check-terms must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    rep = verify_symbolic_c(n_max)
    if args.format == "json":
        out = json.dumps(rep.to_json(), indent=2) + "\n"
    else:
        out = ENCORE_TEXT + f"Identity checked in Z[c] for 2 <= n <= {n_max}: {rep.status.upper()}\n"
    _emit(out, args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _webbook_item(job):
    c, index, max_r, d, check = job
    try:
        p = parse_index(index)
    except ParseError as exc:
        return FailEntry(f"c = {c}, index {index}", str(exc))
    return build_proposition(c, p, max_r, d, check)


LATEX_HEAD = "\\documentclass{article}\n\\begin{document}\n"
LATEX_TAIL = "\\end{document}\n"


def render_webbook(entries, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"type": "webbook", "entries": [e.to_json() for e in entries]}, indent=2) + "\n"
    if not entries:
        return ""
    blocks = []
    for k, e in enumerate(entries, 1):
        if isinstance(e, Proposition):
            e.title = f"Prop. {k}."
            blocks.append(e.render(fmt))
        else:
            blocks.append(f"{'%' if fmt == 'latex' else '#'} item {k}: {e.label}\n" + e.render(fmt))
    sep = "\n\\bigskip\n\n" if fmt == "latex" else "\n"
    body = sep.join(blocks)
    return LATEX_HEAD + body + LATEX_TAIL if fmt == "latex" else body


def cmd_webbook(args) -> int:
    jobs = [(c, idx, args.max_order, args.degree, args.check_terms)
            for c in args.c for idx in args.index]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            entries = list(pool.map(_webbook_item, jobs))   # map keeps sweep order
    else:
        entries = [_webbook_item(j) for j in jobs]
    _emit(render_webbook(entries, args.format), args.out)
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def _common(p, degree_default=None, order=True):
    if degree_default is None:
        p.add_argument("--degree", "-d", type=_nonnegative, required=True, help="total degree bound d")
    else:
        p.add_argument("--degree", "-d", type=_nonnegative, default=degree_default,
                       help=f"total degree bound d (default {degree_default})")
    if order:
        p.add_argument("--max-order", "-r", type=_positive, default=3, help="largest order r (default 3)")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("--out", "-o", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="somosgen", description="Discover and certify Somos-like recurrences.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fr = sub.add_parser("find-rel", help="polynomial relation among expressions")
    fr.add_argument("exprs", nargs="+", help="polynomials or rational functions")
    fr.add_argument("--vars", help="comma separated variables (default: all names used)")
    fr.add_argument("--linear-in-last", action="store_true", help="relation of degree 1 in the last x")
    fr.add_argument("--symbol", default="x")
    _common(fr, order=False)
    fr.set_defaults(func=cmd_find_rel)

    so = sub.add_parser("somos", help="recurrence for a(n) = f(p(n))")
    kinds = so.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind, what in (("poly", "index"), ("exp", "base")):
        k = kinds.add_parser(kind)
        k.add_argument("c", help="parameter c of f(n) = c f(n-1) - f(n-2), or a sequence JSON")
        k.add_argument(what, help="polynomial in n, e.g. 'n**2'" if kind == "poly" else "base e of e^n")
        _common(k, degree_default=3)
        k.add_argument("--check-terms", type=_positive, help="numeric verification range")
        k.add_argument("--points", type=_positive, help="fitting windows for a sequence JSON input")
        k.set_defaults(func=cmd_somos)

    ve = sub.add_parser("verify", help="verify a recurrence or proposition JSON")
    ve.add_argument("file", help="recurrence or proposition JSON (path or inline)")
    ve.add_argument("--sequence", help="target C-finite sequence JSON")
    ve.add_argument("--c", type=int, help="target f(n) = c f(n-1) - f(n-2), f(0)=0, f(1)=1")
    ve.add_argument("--index", default="n", help="index function p(n) of the target (default n)")
    ve.add_argument("--check-terms", type=_positive)
    ve.add_argument("--format", choices=FORMATS, default="text")
    ve.add_argument("--out", "-o")
    ve.set_defaults(func=cmd_verify)

    en = sub.add_parser("encore", help="symbolic-c identity for f(2^n)")
    en.add_argument("--check-terms", type=_positive)
    en.add_argument("--format", choices=FORMATS, default="text")
    en.add_argument("--out", "-o")
    en.set_defaults(func=cmd_encore)

    wb = sub.add_parser("webbook", help="batch of propositions over a parameter sweep")
    wb.add_argument("--c", type=int, nargs="*", default=[], help="values of c")
    wb.add_argument("--index", nargs="*", default=[], help="index functions, e.g. '2^n' 'n^2'")
    _common(wb, degree_default=3)
    wb.add_argument("--check-terms", type=_positive)
    wb.add_argument("--jobs", type=_positive, default=1)
    wb.set_defaults(func=cmd_webbook)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
