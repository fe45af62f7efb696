"""somosgen: Somos-like nonlinear recurrences for a(n) = f(p(n)), f C-finite."""

from .cfinite import CFiniteSequence, ExpPolyIndex, IndexTerm, seq_term, subseq_term, subseq_window
from .polyarith import MultiPoly, RationalFunction, UniPoly, format_poly
from .exprparse import ParseError, parse_index, parse_poly, parse_rational
from .binet import binet_window, numeric_check, window_substitute
from .linalg import LinearSystem, nullspace
from .relations import (NonlinearRecurrence, NotFound, find_empirical, find_rel, find_somos,
                        find_somos_exp, find_somos_poly)
from .verifier import (VerificationReport, certify_symbolic, verify_agreement, verify_annihilation,
                       verify_integrality, verify_symbolic_c)

__version__ = "0.1.0"
