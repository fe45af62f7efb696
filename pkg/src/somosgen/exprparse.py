"""Parsing of the textual polynomial / rational-function / index syntax.

Accepted: integer literals, identifiers, ``+ - * /``, ``^`` or ``**`` with an
integer exponent, parentheses.  Parsing goes through :mod:`ast`, so error
positions are the column offsets Python itself reports.
"""

from __future__ import annotations

import ast
from typing import Sequence

from .cfinite import ExpPolyIndex, IndexTerm
from .polyarith import MultiPoly, RationalFunction

__all__ = ["ParseError", "parse_rational", "parse_poly", "parse_index", "free_names"]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, column: int | None = None):
        self.text = text
        self.column = column
        where = f" at column {column + 1}" if column is not None else ""
        super().__init__(f"{message}{where}: {text!r}")


def _tree(text: str) -> ast.expr:
    src = text.strip().replace("^", "**")
    if not src:
        raise ParseError("empty expression", text, 0)
    try:
        return ast.parse(src, mode="eval").body
    except SyntaxError as exc:
        # offset 0 means "ran off the end"
        col = (exc.offset - 1) if exc.offset else len(text.rstrip())
        raise ParseError("syntax error", text, col) from None


def free_names(text: str) -> list[str]:
    """Identifiers used in ``text``, sorted."""
    return sorted({n.id for n in ast.walk(_tree(text)) if isinstance(n, ast.Name)})


def _int_exponent(node: ast.expr, text: str) -> int:
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        k = _int_exponent(node.operand, text)
        return -k if isinstance(node.op, ast.USub) else k
    raise ParseError("exponent must be an integer literal", text, getattr(node, "col_offset", None))


def parse_rational(text: str, variables: Sequence[str]) -> RationalFunction:
    variables = tuple(variables)
    one = RationalFunction(MultiPoly.constant(variables, 1))

    def walk(node):
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return one * node.value
        if isinstance(node, ast.Name):
            if node.id not in variables:
                raise ParseError(f"unknown variable {node.id!r}", text, node.col_offset)
            return RationalFunction(MultiPoly.var(variables, node.id))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            x = walk(node.operand)
            return -x if isinstance(node.op, ast.USub) else x
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                return walk(node.left) ** _int_exponent(node.right, text)
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if b.is_zero():
                    raise ParseError("division by zero", text, node.col_offset)
                return a / b
        raise ParseError("unsupported construct", text, getattr(node, "col_offset", None))

    return walk(_tree(text))


def parse_poly(text: str, variables: Sequence[str]) -> MultiPoly:
    rf = parse_rational(text, variables)
    if not rf.is_polynomial():
        raise ParseError("expected a polynomial", text)
    return rf.to_poly()


def parse_index(text: str, var: str = "n") -> ExpPolyIndex:
    """Parse an exponential polynomial such as ``n^2*2^n + n^3*5^n + 1``."""
    tree = _tree(text)

    def walk(node):
        # returns {(a, b): coef}
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return {(0, 1): node.value}
        if isinstance(node, ast.Name):
            if node.id != var:
                raise ParseError(f"index functions use only {var!r}", text, node.col_offset)
            return {(1, 1): 1}
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if isinstance(node.right, ast.Name) and node.right.id == var:
                    if not (isinstance(node.left, ast.Constant) and type(node.left.value) is int
                            and node.left.value >= 1):
                        raise ParseError("exponential base must be a positive integer", text,
                                         node.col_offset)
                    return {(0, node.left.value): 1}
                k = _int_exponent(node.right, text)
                if k < 0:
                    raise ParseError("negative powers are not allowed in an index", text, node.col_offset)
                out = {(0, 1): 1}
                base = walk(node.left)
                for _ in range(k):
                    out = mul(out, base)
                return out
            a, b = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Add):
                return add(a, b, 1)
            if isinstance(node.op, ast.Sub):
                return add(a, b, -1)
            if isinstance(node.op, ast.Mult):
                return mul(a, b)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
            return walk(node.operand)
        raise ParseError("unsupported construct in index", text, getattr(node, "col_offset", None))

    def add(a, b, s):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + s * v
        return {k: v for k, v in out.items() if v}

    def mul(a, b):
        out: dict = {}
        for (a1, b1), c1 in a.items():
            for (a2, b2), c2 in b.items():
                k = (a1 + a2, b1 * b2)
                out[k] = out.get(k, 0) + c1 * c2
        return {k: v for k, v in out.items() if v}

    terms = walk(tree)
    try:
        return ExpPolyIndex(tuple(IndexTerm(a, b, c) for (a, b), c in terms.items()))
    except ValueError as exc:
        raise ParseError(str(exc), text) from None
