"""Bound expressions, per-output cost reports, and resource verdicts.

A program *works in time f and space g* on a run when every output event e
satisfies t(e) <= f(i(e)) and s(e) <= g(i(e)), where t, s, i are the time
cost, space cost, and input size of the event.  Bounds are written in a
tiny expression language over the variable ``n``::

    bound = term ('+' term)*
    term  = factor ('*' factor)*
    factor = atom ['^' atom]          -- at least one side constant
    atom  = const | 'n' | 'max' '(' bound ',' bound ')' | '(' bound ')'

All arithmetic is exact (Python integers).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .causality import OutputCosts, cost_summary
from .machine import RunResult
from .syntax import Program


class BoundSyntaxError(Exception):
    pass


@dataclass(frozen=True)
class BoundExpr:
    """A function of n, kept with its source text for reporting."""
    text: str
    _fn: object = field(compare=False, repr=False)

    def __call__(self, n: int) -> int:
        return self._fn(n)


_BOUND_TOKENS = re.compile(r"\s*(\d+|[n+*^(),]|max)")


def _bound_tokens(text):
    toks, pos = [], 0
    while pos < len(text):
        m = _BOUND_TOKENS.match(text, pos)
        if not m:
            raise BoundSyntaxError(f"bad character in bound at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    return toks


def parse_bound(text: str) -> BoundExpr:
    toks = _bound_tokens(text)
    i = [0]

    def peek():
        return toks[i[0]] if i[0] < len(toks) else None

    def eat(tok=None):
        t = peek()
        if t is None or (tok is not None and t != tok):
            raise BoundSyntaxError(f"expected {tok or 'more input'} in bound {text!r}")
        i[0] += 1
        return t

    def atom():
        t = eat()
        if t == "n":
            return lambda n: n
        if t.isdigit():
            v = int(t)
            return lambda n: v
        if t == "max":
            eat("(")
            a = bound()
            eat(",")
            b = bound()
            eat(")")
            return lambda n: max(a(n), b(n))
        if t == "(":
            a = bound()
            eat(")")
            return a
        raise BoundSyntaxError(f"unexpected {t!r} in bound {text!r}")

    def factor():
        base = atom()
        if peek() == "^":
            eat("^")
            exp = atom()
            return lambda n: base(n) ** exp(n)
        return base

    def term():
        f = factor()
        while peek() == "*":
            eat("*")
            g = factor()
            f = (lambda a, b: lambda n: a(n) * b(n))(f, g)
        return f

    def bound():
        f = term()
        while peek() == "+":
            eat("+")
            g = term()
            f = (lambda a, b: lambda n: a(n) + b(n))(f, g)
        return f

    fn = bound()
    if peek() is not None:
        raise BoundSyntaxError(f"trailing input in bound {text!r}")
    return BoundExpr(text, fn)


def eval_bound(b: BoundExpr, n: int) -> int:
    return b(n)


# ---------------------------------------------------------------------------
# reports

@dataclass
class CostReport:
    status: str
    steps: int
    total_weight: int
    records: list  # of OutputCosts


def cost_report(program: Program, result: RunResult,
                space_mode: str = "observed",
                exact_limit: int = 9) -> CostReport:
    records = cost_summary(program, result.records, space_mode, exact_limit)
    return CostReport(result.status, len(result.records),
                      result.total_weight, records)


def render_record(k: int, rec: OutputCosts) -> str:
    inputs = ",".join(f"{ch}:{w}" for ch, w in rec.inputs)
    return (f"output {k} ch={rec.channel} word={rec.word} time={rec.time}"
            f" space={rec.space}({rec.space_mode}) insize={rec.insize}"
            f" inputs=[{inputs}]")


def render_report(report: CostReport, verdict: Optional["Verdict"] = None) -> str:
    lines = [render_record(k, rec) for k, rec in enumerate(report.records)]
    lines.append(f"status {report.status} steps={report.steps}"
                 f" weight={report.total_weight}")
    if verdict is not None:
        lines.append(render_verdict(verdict))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# verdicts

@dataclass(frozen=True)
class Violation:
    event: int       # output record index
    quantity: str    # 'time' or 'space'
    bound: int
    actual: int


@dataclass
class Verdict:
    ok: bool
    violations: list

    def __bool__(self):
        return self.ok


def works_in(report: CostReport, f: BoundExpr, g: BoundExpr) -> Verdict:
    """The pointwise check: t(e) <= f(i(e)) and s(e) <= g(i(e)) for every
    output event of the report.  Evidence on the run at hand only."""
    violations = []
    for k, rec in enumerate(report.records):
        fb = f(rec.insize)
        if rec.time > fb:
            violations.append(Violation(k, "time", fb, rec.time))
        gb = g(rec.insize)
        if rec.space > gb:
            violations.append(Violation(k, "space", gb, rec.space))
    return Verdict(not violations, violations)


def render_verdict(v: Verdict) -> str:
    if v.ok:
        return "verdict pass"
    parts = " ".join(f"{x.quantity}@{x.event}:{x.actual}>{x.bound}"
                     for x in v.violations)
    return f"verdict fail {parts}"


def class_evidence(program: Program, scripts: Sequence, f: BoundExpr,
                   g: BoundExpr, space_mode: str = "observed",
                   exact_limit: int = 9, step_limit: int = 100000,
                   runner=None) -> Verdict:
    """Run the program on each script and aggregate ``works_in`` verdicts.

    Passing is evidence that the program's behavior fits the bounds on the
    tested inputs; it is never a universal claim.  A run that does not end
    quiescent counts as a failure (reported as a time violation at event
    -1 with the step count).
    """
    from .machine import ScriptedInput, run as machine_run
    runner = runner or machine_run
    all_violations = []
    for script in scripts:
        provider = script if not isinstance(script, dict) else ScriptedInput(script)
        result = runner(program, provider, step_limit=step_limit)
        if result.status != "quiescent":
            all_violations.append(Violation(-1, "time", step_limit,
                                            len(result.records)))
            continue
        report = cost_report(program, result, space_mode, exact_limit)
        all_violations.extend(works_in(report, f, g).violations)
    return Verdict(not all_violations, all_violations)
