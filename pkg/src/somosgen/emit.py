"""Propositions: a verified recurrence plus its display in text, LaTeX, JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd

from .cfinite import CFiniteSequence, ExpPolyIndex
from .polyarith import MultiPoly, format_poly
from .relations import NonlinearRecurrence
from .verifier import VerificationReport

__all__ = ["Proposition", "FailEntry", "split_monomial", "latex_poly", "describe_target"]


def split_monomial(p: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """p = m * q with m the largest monomial dividing every term."""
    if p.is_zero():
        return MultiPoly.constant(p.vars, 1), p
    exps = list(p.terms)
    low = tuple(min(e[i] for e in exps) for i in range(len(p.vars)))
    m = MultiPoly.monomial(p.vars, low)
    q = MultiPoly(p.vars, {tuple(a - b for a, b in zip(e, low)): k for e, k in p.terms.items()})
    return m, q


def _factored_text(p: MultiPoly, labels) -> str:
    m, q = split_monomial(p)
    if m.is_constant() or len(q.terms) == 1:
        return format_poly(p, labels)
    return f"{format_poly(m, labels)}*({format_poly(q, labels)})"


def _latex_mono(e, labels) -> str:
    parts = []
    for x, name in zip(e, labels):
        if x == 1:
            parts.append(name)
        elif x:
            parts.append(f"{name}^{{{x}}}")
    return " ".join(parts)


def latex_poly(p: MultiPoly, labels) -> str:
    if p.is_zero():
        return "0"
    out = []
    for e, k in p.sorted_terms():
        mono = _latex_mono(e, labels)
        a = abs(k)
        body = str(a) if not mono else (mono if a == 1 else f"{a} \\, {mono}")
        if not out:
            out.append(("-" if k < 0 else "") + body)
        else:
            out.append(("- " if k < 0 else "+ ") + body)
    return " ".join(out)


def _latex_factored(p: MultiPoly, labels) -> str:
    m, q = split_monomial(p)
    if m.is_constant() or len(q.terms) == 1:
        return latex_poly(p, labels)
    return f"{latex_poly(m, labels)} \\left( {latex_poly(q, labels)} \\right)"


def describe_target(target: dict | None) -> str:
    if not target:
        return ""
    f = CFiniteSequence.from_json(target["sequence"])
    p = ExpPolyIndex.from_json(target["index"])
    return f"a(n) = f({p}) where {f}"


@dataclass
class Proposition:
    recurrence: NonlinearRecurrence
    reports: list[VerificationReport]
    target: dict | None = None
    title: str = "Prop."

    def __post_init__(self):
        if not any(r.passed for r in self.reports):
            raise ValueError("a proposition needs at least one passing verification")
        if not self.recurrence.solvable:
            raise ValueError("a proposition needs a solved form")

    @property
    def proved(self) -> bool:
        return any(r.certificate and r.passed for r in self.reports)

    @property
    def integrality_checked(self) -> int | None:
        for r in self.reports:
            if r.mode == "integrality" and r.passed:
                return r.n_checked
        return None

    @property
    def status(self) -> str:
        if self.proved:
            return "proved"
        n = max((r.n_checked for r in self.reports if r.passed), default=0)
        return f"verified-to-{n}"

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    # display

    def _labels(self):
        r = self.recurrence.order
        return [f"a(n-{r - i})" for i in range(r)]

    def solved_text(self) -> str:
        rec = self.recurrence
        labels = self._labels()
        num = _factored_text(rec.numerator, labels)
        den = rec.denominator
        if den.is_constant() and den.constant_term() == 1:
            return f"a(n) = {num}"
        m, q = split_monomial(rec.numerator)
        if len(rec.numerator.terms) > 1 and m.is_constant():
            num = f"({num})"        # a bare sum needs its own parentheses
        return f"a(n) = {num}/({format_poly(den, labels)})"

    def to_text(self) -> str:
        rec = self.recurrence
        r = rec.order
        init = ", ".join(f"a({i + 1}) = {v}" for i, v in enumerate(rec.initial_values))
        lines = [
            f"{self.title} Let a(n) be defined by",
            f"    {init}",
            f"and for n >= {r + 1}, by the recurrence",
            f"    {self.solved_text()}",
            "then a(n) are all integers!",
        ]
        lines.append(f"Status: {self._status_line()}")
        src = describe_target(self.target)
        if src:
            lines.append(f"Source: {src}")
        return "\n".join(lines) + "\n"

    def _status_line(self) -> str:
        bits = []
        if self.proved:
            bits.append("proved (symbolic certificate for the annihilator)")
        for rep in self.reports:
            if rep.mode == "symbolic":
                continue
            bits.append(f"{rep.mode} {rep.status} for n <= {rep.n_checked}")
        return "; ".join(bits)

    def to_latex(self) -> str:
        rec = self.recurrence
        r = rec.order
        labels = self._labels()
        init = " \\quad , \\quad ".join(f"a({i + 1}) = {v}" for i, v in enumerate(rec.initial_values))
        num = _latex_factored(rec.numerator, labels)
        den = rec.denominator
        if den.is_constant() and den.constant_term() == 1:
            rhs = num
        else:
            rhs = f"\\frac{{{num}}}{{{latex_poly(den, labels)}}}"
        out = [
            f"{{\\bf {self.title}}} Let $a(n)$ be defined by",
            "$$",
            init,
            "$$",
            f"and for $n \\geq {r + 1}$, by the recurrence",
            "$$",
            f"a(n) = {rhs}",
            "$$",
            "then $a(n)$ are all integers!",
            "",
            f"% status: {self._status_line()}",
        ]
        return "\n".join(out) + "\n"

    def to_json(self) -> dict:
        return {
            "type": "proposition",
            "status": self.status,
            "recurrence": self.recurrence.to_json(),
            "solved_form": self.solved_text(),
            "target": self.target,
            "verification": [r.to_json() for r in self.reports],
        }

    @classmethod
    def from_json(cls, data: dict) -> Proposition:
        if data.get("type") != "proposition":
            raise ValueError("not a proposition record")
        return cls(NonlinearRecurrence.from_json(data["recurrence"]),
                   [VerificationReport.from_json(r) for r in data["verification"]],
                   data.get("target"))

    def render(self, fmt: str) -> str:
        if fmt == "text":
            return self.to_text()
        if fmt == "latex":
            return self.to_latex()
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        raise ValueError(f"unknown format {fmt!r}")


@dataclass
class FailEntry:
    """Webbook placeholder for a sweep item without a proposition."""

    label: str
    reason: str
    reports: list[VerificationReport] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"type": "fail", "label": self.label, "reason": self.reason}
        if self.reports:
            out["verification"] = [r.to_json() for r in self.reports]
        return out

    def render(self, fmt: str) -> str:
        if fmt == "latex":
            return f"% {self.label}\nFAIL: {self.reason}\n"
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2) + "\n"
        return f"FAIL: {self.reason}\n"
