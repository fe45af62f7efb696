import time
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from somosgen.binet import binet_window, window_substitute
from somosgen.cfinite import CFiniteSequence, ExpPolyIndex, subseq_window
from somosgen.exprparse import parse_poly, parse_rational
from somosgen.linalg import nullspace
from somosgen.polyarith import MultiPoly, format_poly
from somosgen.relations import (NonlinearRecurrence, NotFound, ansatz_size,
                                assemble_empirical_system, assemble_symbolic_system,
                                enumerate_ansatz, find_empirical, find_rel, find_somos,
                                find_somos_exp, find_somos_poly, solve_for_last, window_names)

PQ = ["p", "q"]


def rationals(*texts, names=PQ):
    return [parse_rational(t, names) for t in texts]


# -- relations among expressions ---------------------------------------------


def test_pythagorean_relation():
    rel = find_rel(rationals("p^2-q^2", "2*p*q", "p^2+q^2"), 2)
    assert format_poly(rel) == "x3^2 - x2^2 - x1^2"


def test_linear_relation_and_fail():
    exprs = rationals("p", "q", "p+q")
    assert format_poly(find_rel(exprs, 1)) == "x3 - x2 - x1"
    res = find_rel(exprs, 0)
    assert isinstance(res, NotFound) and not res and str(res).startswith("FAIL")


def test_pythagorean_needs_degree_two():
    assert isinstance(find_rel(rationals("p^2-q^2", "2*p*q", "p^2+q^2"), 1), NotFound)


def test_rational_inputs():
    # x = p/q, y = q/p satisfy x*y = 1
    rel = find_rel(rationals("p/q", "q/p"), 2)
    assert format_poly(rel) == "x1*x2 - 1"


def test_linear_in_last_flag():
    exprs = rationals("p", "p^2")
    assert format_poly(find_rel(exprs, 2, linear_in_last=True)) == "x1^2 - x2"
    # x2^2 = x1 is only available without the flag
    exprs = rationals("p^2", "p")
    assert format_poly(find_rel(exprs, 2)) == "x2^2 - x1"
    assert isinstance(find_rel(exprs, 2, linear_in_last=True), NotFound)


# -- ansatz ------------------------------------------------------------------


@pytest.mark.parametrize("r, d", [(1, 1), (2, 3), (3, 3), (5, 6), (4, 0)])
def test_ansatz_sizes(r, d):
    assert ansatz_size(r, d) == comb(r + 1 + d, d)
    assert len(enumerate_ansatz(r, d).monomials) == ansatz_size(r, d)
    lin = enumerate_ansatz(r, d, linear_in_last=True)
    assert lin.size == ansatz_size(r, d, True)
    assert all(m[-1] <= 1 for m in lin.monomials)


def test_solve_for_last():
    names = window_names(2)
    N, D = solve_for_last(parse_poly("x0*x2 - x1^2 + 1", names))
    assert format_poly(N) == "x1^2 - 1" and format_poly(D) == "x0"
    with pytest.raises(ValueError):
        solve_for_last(parse_poly("x2^2 - x0", names))


# -- Somos drivers -----------------------------------------------------------


def test_exponential_driver_reproduces_displayed_recurrence():
    rec = find_somos_exp(3, 2, 3, 3)
    x0, x1 = (MultiPoly.var(window_names(1), v) for v in window_names(1))
    assert rec.order == 2 and rec.initial_values == (3, 21)
    assert rec.numerator == x1 * (x1 * x1 * 5 + 4)
    assert rec.denominator == x0 * x0 * 5 + 2
    assert rec.solved_text() == "a(n) = (5*a(n-1)^3 + 4*a(n-1))/(5*a(n-2)^2 + 2)"
    assert rec.provenance["certified"] and rec.provenance["backend"] == "symbolic"


@pytest.mark.parametrize("c", [3, 4, 5, 6, -3])
def test_exponential_driver_matches_symbolic_c_pattern(c):
    rec = find_somos_exp(c, 2, 3, 3)
    names = window_names(1)
    x0, x1 = (MultiPoly.var(names, v) for v in names)
    k = (c - 2) * (c + 2)
    N = x1 * (x1 * x1 * k + 4)
    D = x0 * x0 * k + 2
    # same rational function up to a constant factor
    assert (rec.numerator * D - N * rec.denominator).is_zero()


def test_poly_driver_order_five_example():
    t = time.time()
    rec = find_somos_poly(3, ExpPolyIndex.power(2), 5, 6)
    assert time.time() - t < 60
    assert rec.order == 5
    assert rec.initial_values == (1, 21, 2584, 2178309, 12586269025)
    assert format_poly(rec.denominator) == "48*x1*x3"


def test_not_found_carries_advice():
    res = find_somos_poly(3, ExpPolyIndex.power(2), 2, 2)
    assert isinstance(res, NotFound) and "raise d and/or r" in res.reason
    assert isinstance(find_somos_exp(3, 2, 1, 1), NotFound)


def test_driver_validation():
    with pytest.raises(ValueError):
        find_somos_poly(3, ExpPolyIndex.exponential(2), 3, 3)
    with pytest.raises(ValueError):
        find_somos_exp(3, 1, 3, 3)
    with pytest.raises(ValueError):
        find_somos(2, ExpPolyIndex.exponential(2), 3, 3)


def test_linear_index_gives_three_term_identity():
    # a(n) = f(n): f(n+2) = c f(n+1) - f(n), found at total degree 1
    rec = find_somos(4, ExpPolyIndex.power(1), 3, 2)
    assert rec.solved_text() == "a(n) = 4*a(n-1) - a(n-2)"


# -- empirical backend -------------------------------------------------------


def test_empirical_fibonacci():
    fib = CFiniteSequence((1, 1), (1, 1))
    rec = find_empirical(fib, ExpPolyIndex.power(1), 2, 1)
    assert rec.solved_text() == "a(n) = a(n-1) + a(n-2)"
    assert rec.provenance["held_out_checked_to"] >= 50


def test_empirical_matches_symbolic_solution():
    f = CFiniteSequence.lucas_type(3)
    sym = find_somos_exp(3, 2, 3, 3)
    emp = find_empirical(f, ExpPolyIndex.exponential(2), 2, 3, n_points=18, held_out=2)
    assert emp.annihilator == sym.annihilator


def test_empirical_refuses_astronomical_indices():
    with pytest.raises(ValueError, match="symbolic backend"):
        find_empirical(CFiniteSequence.lucas_type(3), ExpPolyIndex.exponential(2), 3, 3)


def test_empirical_non_lucas_sequence():
    # a(n) = T(2n) for tribonacci-like data still yields a relation it can check
    f = CFiniteSequence((2, 1), (1, 2))      # f(n) = 2 f(n-1) + f(n-2), Pell-like, |c_d| = 1
    rec = find_empirical(f, ExpPolyIndex.power(1), 2, 2)
    assert rec.solved_text() == "a(n) = 2*a(n-1) + a(n-2)"


def test_backend_agreement_on_nullspace():
    # same ansatz, symbolic coefficient matching vs. sampled windows
    c, p = 3, ExpPolyIndex.exponential(2)
    ansatz = enumerate_ansatz(2, 3)
    sym = nullspace(assemble_symbolic_system(binet_window(c, p, 2), ansatz))
    emp = nullspace(assemble_empirical_system(CFiniteSequence.lucas_type(c), p, ansatz, 20))
    assert len(sym) >= 1
    assert sym == emp


@settings(max_examples=12, deadline=None)
@given(st.sampled_from([3, 4, 5, 7]), st.sampled_from(["n", "2*n", "n+1", "3*n+2", "2^n", "3^n"]))
def test_found_relations_are_certified_and_vanish(c, index):
    from somosgen.exprparse import parse_index
    p = parse_index(index)
    rec = find_somos(c, p, 3, 3)
    assert rec, f"nothing found for c={c}, p={index}"
    w = binet_window(c, p, rec.order)
    assert window_substitute(rec.annihilator, w).is_zero()
    f = CFiniteSequence.lucas_type(c)
    vals = subseq_window(f, p, 1, 4 + rec.order)
    for n in range(5):
        assert rec.annihilator.eval(vals[n:n + rec.order + 1]) == 0


# -- recurrence records -----------------------------------------------------


def test_recurrence_json_round_trip():
    rec = find_somos_exp(3, 2, 3, 3)
    d = rec.to_json()
    assert set(d) == {"order", "annihilator", "solved_numerator", "solved_denominator",
                      "initial_values", "provenance"}
    back = NonlinearRecurrence.from_json(d)
    assert back.annihilator == rec.annihilator and back.initial_values == rec.initial_values
    solved_only = {k: v for k, v in d.items() if k != "annihilator"}
    assert NonlinearRecurrence.from_json(solved_only).annihilator == rec.annihilator


def test_recurrence_validation():
    with pytest.raises(ValueError):
        NonlinearRecurrence.from_json({"order": 2, "initial_values": [1, 2]})
    with pytest.raises(ValueError):
        NonlinearRecurrence.from_json({"order": 2, "annihilator": "x0*x2 - x1^2", "initial_values": [1]})


def test_square_index_order_two_relations_start_at_degree_eight():
    # no order-2 relation at all below total degree 8, and the first one is
    # not linear in a(n+2); hence the order-5 search for f(n^2)
    w = binet_window(3, ExpPolyIndex.power(2), 2)
    dims = {d: len(nullspace(assemble_symbolic_system(w, enumerate_ansatz(2, d)))) for d in (2, 7, 8)}
    assert dims == {2: 0, 7: 0, 8: 1}
    assert len(nullspace(assemble_symbolic_system(w, enumerate_ansatz(2, 8, True)))) == 0
