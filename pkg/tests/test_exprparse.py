import pytest

from somosgen.cfinite import ExpPolyIndex
from somosgen.exprparse import ParseError, free_names, parse_index, parse_poly, parse_rational
from somosgen.polyarith import MultiPoly, RationalFunction, format_poly


def test_caret_and_double_star_agree():
    assert parse_poly("p^2 - q**2", ["p", "q"]) == parse_poly("p**2 - q^2", ["p", "q"])


def test_rational_and_negative_powers():
    r = parse_rational("(p + 1)/q^2 + q^-1", ["p", "q"])
    p = MultiPoly.var(("p", "q"), "p")
    q = MultiPoly.var(("p", "q"), "q")
    assert r == RationalFunction(p + 1 + q, q ** 2)


def test_parse_errors_carry_columns():
    with pytest.raises(ParseError, match="column"):
        parse_poly("2*p*", ["p"])
    with pytest.raises(ParseError, match="unknown variable 'z'"):
        parse_poly("p + z", ["p"])
    with pytest.raises(ParseError):
        parse_poly("p^q", ["p", "q"])
    with pytest.raises(ParseError, match="polynomial"):
        parse_poly("1/p", ["p"])
    with pytest.raises(ParseError):
        parse_poly("", ["p"])
    with pytest.raises(ParseError):
        parse_rational("p/0", ["p"])


def test_free_names():
    assert free_names("p^2 - q*r + 1") == ["p", "q", "r"]


def test_parse_index():
    assert parse_index("n**2") == ExpPolyIndex.power(2)
    assert parse_index("2^n") == ExpPolyIndex.exponential(2)
    assert parse_index("n^2*2^n + n^3*5^n + 1") == ExpPolyIndex.of((1, 2, 2), (1, 3, 5), (1, 0, 1))
    assert parse_index("2^n*3^n") == ExpPolyIndex.exponential(6)
    assert parse_index("(n+1)^2") == ExpPolyIndex.polynomial({2: 1, 1: 2, 0: 1})
    for bad in ("n - 2*n", "m", "n^-1", "(-2)^n", "n/2"):
        with pytest.raises(ParseError):
            parse_index(bad)


def test_canonical_text_is_parse_fixed_point():
    names = [f"x{i}" for i in range(6)]
    text = "48*x1*x3*x5 - 329*x1*x4^2 + x0*x3*x4 - 441*x3 + 2961*x1"
    assert format_poly(parse_poly(text, names)) == text
