from fractions import Fraction

from hypothesis import strategies as st

from somosgen.polyarith import MultiPoly

VARS = ("x", "y", "z")

small_ints = st.integers(min_value=-20, max_value=20)
rationals = st.one_of(
    small_ints,
    st.builds(Fraction, small_ints, st.integers(min_value=1, max_value=9)),
)
exponents = st.tuples(*[st.integers(min_value=0, max_value=3)] * len(VARS))


def polys(coeffs=small_ints, max_terms=5, variables=VARS):
    exps = st.tuples(*[st.integers(min_value=0, max_value=3)] * len(variables))
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(lambda d: MultiPoly(variables, d))


points = st.tuples(*[st.integers(min_value=-6, max_value=6)] * len(VARS))
