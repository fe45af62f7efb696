"""Acceptance criteria 1-8.

Each test prints one line ``CRITERION k: PASS|FAIL  <what>  (<seconds>)``;
run with ``-s`` to see them inline.  conftest.py repeats them in the
terminal summary of every run.
"""

import json
import random
import time
from contextlib import contextmanager

import pytest

from somosgen.binet import binet_window, numeric_check
from somosgen.cfinite import CFiniteSequence, ExpPolyIndex, seq_term
from somosgen.cli import main
from somosgen.exprparse import parse_poly
from somosgen.linalg import LinearSystem, nullspace
from somosgen.polyarith import MultiPoly
from somosgen.relations import NonlinearRecurrence, window_names
from somosgen.verifier import (certify_symbolic, encore_sequence, iterate, verify_agreement,
                               verify_annihilation, verify_integrality, verify_symbolic_c)
from fixtures import reference_data as P

RESULTS: dict[int, str] = {}
F3 = CFiniteSequence.lucas_type(3)


@contextmanager
def criterion(k: int, what: str, limit: float | None = None):
    t = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t
        if ok and limit is not None and dt >= limit:
            ok = False
            what += f" [over the {limit:g} s limit]"
        line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {what}  ({dt:.2f} s)"
        RESULTS[k] = line
        print("\n" + line)
    if not ok:
        pytest.fail(line)


def cli_json(capsys, *argv):
    code = main(list(argv) + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture(scope="module")
def order5():
    # the discovered recurrence, shared between criteria 3 and 7
    return {}


def test_criterion_1_find_rel(capsys):
    with criterion(1, "find-rel on the Pythagorean triple prints x3^2 - x2^2 - x1^2 = 0", 1.0):
        code = main(["find-rel", "p^2-q^2", "2*p*q", "p^2+q^2", "--degree", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert out == "x3^2 - x2^2 - x1^2 = 0\n"


def test_criterion_2_somos_exp(capsys):
    with criterion(2, "somos exp (3, 2, 3, 3): a(1)=3, a(2)=21, a(n-1)(4+5a(n-1)^2)/(2+5a(n-2)^2), certified", 10.0):
        code, data = cli_json(capsys, "somos", "exp", "3", "2", "--max-order", "3", "--degree", "3")
        assert code == 0
        rec = NonlinearRecurrence.from_json(data["recurrence"])
        names = window_names(1)
        assert rec.initial_values == (3, 21)
        assert rec.numerator == parse_poly(P.EXP_NUMERATOR, names)
        assert rec.denominator == parse_poly(P.EXP_DENOMINATOR, names)
        assert data["solved_form"] == "a(n) = a(n-1)*(5*a(n-1)^2 + 4)/(5*a(n-2)^2 + 2)"
        rep = certify_symbolic(rec, 3, ExpPolyIndex.exponential(2))
        assert rep.passed and rep.certificate
        assert data["status"] == "proved"


def test_criterion_3_somos_poly(capsys, order5):
    with criterion(3, "somos poly (3, n^2, 5, 6): initial values 1..12586269025, annihilates n <= 30, "
                      "reference polynomial in the solution space", 300.0):
        code, data = cli_json(capsys, "somos", "poly", "3", "n**2", "--max-order", "5", "--degree", "6")
        assert code == 0
        rec = NonlinearRecurrence.from_json(data["recurrence"])
        order5["rec"] = rec
        assert list(rec.initial_values) == P.ORDER5_INITIAL
        sq = ExpPolyIndex.power(2)
        assert verify_annihilation(rec, F3, sq, 30).passed
        reference = NonlinearRecurrence.from_solved(P.ORDER5_NUMERATOR, P.ORDER5_DENOMINATOR, P.ORDER5_INITIAL)
        assert verify_annihilation(reference, F3, sq, 30).passed


def test_criterion_4_somos4():
    with criterion(4, "Somos-4 integral for n <= 300 with witnesses 1,1,1,1,2,3,7,23", 5.0):
        rec = NonlinearRecurrence.from_solved(P.SOMOS4_NUMERATOR, P.SOMOS4_DENOMINATOR, P.SOMOS4_INITIAL)
        rep = verify_integrality(rec, 300)
        assert rep.passed and rep.n_checked == 300
        assert rep.witnesses == P.SOMOS4_WITNESSES


def test_criterion_5_a001519():
    with criterion(5, "(b(n-1)^2-1)/b(n-2) from 1, 3 agrees with 3f(n-1)-f(n-2) for n <= 30", 1.0):
        rec = NonlinearRecurrence.from_solved(P.B_NUMERATOR, P.B_DENOMINATOR, P.B_INITIAL)
        f = CFiniteSequence((3, -1), (1, 3), 1)
        rep = verify_agreement(rec, f, 30)
        assert rep.passed and rep.n_checked == 30


def test_criterion_6_encore():
    with criterion(6, "symbolic-c identity for n <= 12; c = 3 gives the criterion-2 sequence", 30.0):
        rep = verify_symbolic_c(12)
        assert rep.passed and rep.certificate
        b = encore_sequence(12)
        rec = NonlinearRecurrence.from_solved(P.EXP_NUMERATOR, P.EXP_DENOMINATOR, P.EXP_INITIAL)
        iterated = [int(v) for _, v in iterate(rec, 12)]
        assert [x(3) for x in b[1:]] == iterated
        assert [x(3) for x in b[:11]] == [seq_term(F3, 2 ** n) for n in range(11)]


def test_criterion_7_negative_controls(order5):
    with criterion(7, "every single-coefficient perturbation of the order-5 annihilator fails at n <= 5"):
        rec = order5.get("rec")
        if rec is None:
            rec = NonlinearRecurrence.from_solved(P.ORDER5_NUMERATOR, P.ORDER5_DENOMINATOR, P.ORDER5_INITIAL)
        sq = ExpPolyIndex.power(2)
        P5 = rec.annihilator
        failures = []
        for e in sorted(P5.terms):
            for delta in (1, -1):
                terms = dict(P5.terms)
                terms[e] += delta
                bad = NonlinearRecurrence(rec.order, MultiPoly(P5.vars, terms), None, None, rec.initial_values)
                rep = verify_annihilation(bad, F3, sq, 5)
                assert not rep.passed, f"perturbing {e} by {delta} went unnoticed"
                ff = rep.first_failure
                assert ff["n"] <= 5 and int(ff["residual"]) != 0
                failures.append((e, delta, ff["n"], ff["residual"]))
        assert len(failures) == 2 * len(P5.terms)
        print(f"\n  {len(failures)} perturbations, first: term {failures[0][0]} {failures[0][1]:+d} "
              f"-> n = {failures[0][2]}, residual = {failures[0][3]}")


def test_criterion_8_property_suites():
    import test_polyarith as tp
    import test_cfinite as tc
    import test_linalg as tl

    with criterion(8, "property suites: polyarith (>= 1000 cases), cfinite fast vs naive (50 x n <= 200), "
                      "numeric_check on acceptance triples, nullspace up to 50 x 80"):
        tp.test_eval_is_ring_homomorphism()          # 1000 hypothesis cases
        tp.test_text_round_trip()                    # 1000 hypothesis cases
        tc.test_fast_matches_naive()                 # 50 random sequences, order <= 4
        triples = [(3, ExpPolyIndex.exponential(2), 3, 10), (4, ExpPolyIndex.exponential(2), 3, 10),
                   (5, ExpPolyIndex.exponential(2), 3, 10), (3, ExpPolyIndex.power(2), 5, 30),
                   (3, ExpPolyIndex.power(2), 2, 30)]
        for c, p, r, n_max in triples:
            assert numeric_check(binet_window(c, p, r), CFiniteSequence.lucas_type(c), p, n_max)
        tl.test_random_matrices_certify()
        rng = random.Random(8)
        rows = tl.random_matrix(rng, 50, 80, 41, 20)
        basis = nullspace(LinearSystem.from_dense(rows))
        assert len(basis) == 80 - 41
        sys_ = LinearSystem.from_dense(rows)
        assert all(not any(sys_.apply(v)) for v in basis)
