"""Abstract syntax of the process language: expressions, processes, programs.

Words are Python strings over the characters '0' and '1'; the empty string
is a legal word.  All AST nodes are frozen dataclasses so that process terms
can be hashed and shared freely between configurations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

Word = str


def is_word(s: str) -> bool:
    return all(c in "01" for c in s)


class EvalError(Exception):
    """Raised when an expression cannot be evaluated."""


class UnboundVariable(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class TailOfEmpty(EvalError):
    def __init__(self):
        super().__init__("tail applied to the empty word")


# ---------------------------------------------------------------------------
# string and Boolean expressions

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    word: Word

    def __post_init__(self):
        if not is_word(self.word):
            raise ValueError(f"literal {self.word!r} is not over 0/1")


@dataclass(frozen=True)
class Prepend:
    bit: str  # '0' or '1'
    expr: "StrExpr"


@dataclass(frozen=True)
class Tail:
    expr: "StrExpr"


StrExpr = Union[Var, Lit, Prepend, Tail]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class IsZero:
    expr: StrExpr


@dataclass(frozen=True)
class IsEmpty:
    expr: StrExpr


BoolExpr = Union[BoolLit, IsZero, IsEmpty]


# ---------------------------------------------------------------------------
# channels and processes

@dataclass(frozen=True)
class ExternalIn:
    name: str


@dataclass(frozen=True)
class ExternalOut:
    name: str


@dataclass(frozen=True)
class Internal:
    key: StrExpr


Channel = Union[ExternalIn, ExternalOut, Internal]


@dataclass(frozen=True)
class Nil:
    pass


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Send:
    channel: Channel
    value: StrExpr
    then: "Process"


@dataclass(frozen=True)
class Recv:
    channel: Channel
    var: str
    then: "Process"


@dataclass(frozen=True)
class Cond:
    test: BoolExpr
    then: "Process"
    els: "Process"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


Process = Union[Nil, Call, Send, Recv, Cond, Par]

NIL = Nil()


@dataclass(frozen=True)
class ProcDef:
    name: str
    params: tuple
    body: Process

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass
class Program:
    inputs: frozenset
    outputs: frozenset
    defs: Mapping[str, ProcDef]
    main: Process

    def __eq__(self, other):
        return (isinstance(other, Program)
                and self.inputs == other.inputs
                and self.outputs == other.outputs
                and dict(self.defs) == dict(other.defs)
                and self.main == other.main)


# ---------------------------------------------------------------------------
# evaluation

Environment = Mapping[str, Word]


def eval_str(e: StrExpr, env: Environment) -> Word:
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundVariable(e.name) from None
    if isinstance(e, Lit):
        return e.word
    if isinstance(e, Prepend):
        return e.bit + eval_str(e.expr, env)
    if isinstance(e, Tail):
        v = eval_str(e.expr, env)
        if v == "":
            raise TailOfEmpty()
        return v[1:]
    raise TypeError(f"not a string expression: {e!r}")


def eval_bool(b: BoolExpr, env: Environment) -> bool:
    if isinstance(b, BoolLit):
        return b.value
    if isinstance(b, IsZero):
        return eval_str(b.expr, env).startswith("0")
    if isinstance(b, IsEmpty):
        return eval_str(b.expr, env) == ""
    raise TypeError(f"not a Boolean expression: {b!r}")


def expr_time_cost(e) -> int:
    """Metered cost of evaluating an expression.

    One unit per operator or variable lookup, |w|+1 for a literal.  The cost
    is independent of the environment, which keeps every fixed expression
    constant-time regardless of the lengths of the words bound to its
    variables.
    """
    if isinstance(e, Var):
        return 1
    if isinstance(e, Lit):
        return len(e.word) + 1
    if isinstance(e, (Prepend, Tail)):
        return 1 + expr_time_cost(e.expr)
    if isinstance(e, BoolLit):
        return 1
    if isinstance(e, (IsZero, IsEmpty)):
        return 1 + expr_time_cost(e.expr)
    raise TypeError(f"not an expression: {e!r}")


def env_size(env: Environment) -> int:
    return sum(len(v) + 1 for v in env.values())


# ---------------------------------------------------------------------------
# free variables

def free_vars(p: Process) -> frozenset:
    if isinstance(p, Nil):
        return frozenset()
    if isinstance(p, Call):
        out = frozenset()
        for a in p.args:
            out |= expr_vars(a)
        return out
    if isinstance(p, Send):
        return chan_vars(p.channel) | expr_vars(p.value) | free_vars(p.then)
    if isinstance(p, Recv):
        return chan_vars(p.channel) | (free_vars(p.then) - {p.var})
    if isinstance(p, Cond):
        return expr_vars(p.test) | free_vars(p.then) | free_vars(p.els)
    if isinstance(p, Par):
        return free_vars(p.left) | free_vars(p.right)
    raise TypeError(f"not a process: {p!r}")


def expr_vars(e) -> frozenset:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, (Lit, BoolLit)):
        return frozenset()
    if isinstance(e, (Prepend, Tail, IsZero, IsEmpty)):
        return expr_vars(e.expr)
    raise TypeError(f"not an expression: {e!r}")


def chan_vars(ch: Channel) -> frozenset:
    if isinstance(ch, Internal):
        return expr_vars(ch.key)
    return frozenset()


# ---------------------------------------------------------------------------
# pretty printing (inverse of the concrete grammar in parser.py)

def show_expr(e: StrExpr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Lit):
        return f'"{e.word}"'
    if isinstance(e, Prepend):
        return f"{e.bit}:{show_expr(e.expr)}"
    if isinstance(e, Tail):
        return f"tl {show_expr(e.expr)}"
    raise TypeError(f"not a string expression: {e!r}")


def show_bool(b: BoolExpr) -> str:
    if isinstance(b, BoolLit):
        return "tt" if b.value else "ff"
    if isinstance(b, IsZero):
        return f"is0 {show_expr(b.expr)}"
    if isinstance(b, IsEmpty):
        return f"nil {show_expr(b.expr)}"
    raise TypeError(f"not a Boolean expression: {b!r}")


def show_channel(ch: Channel) -> str:
    if isinstance(ch, (ExternalIn, ExternalOut)):
        return ch.name
    return f"[{show_expr(ch.key)}]"


def show_process(p: Process) -> str:
    if isinstance(p, Nil):
        return "0"
    if isinstance(p, Call):
        return f"{p.name}<{', '.join(show_expr(a) for a in p.args)}>"
    if isinstance(p, Send):
        return f"{show_channel(p.channel)}!{show_expr(p.value)}.{show_process(p.then)}"
    if isinstance(p, Recv):
        return f"{show_channel(p.channel)}?{p.var}.{show_process(p.then)}"
    if isinstance(p, Cond):
        return (f"if {show_bool(p.test)} then {show_process(p.then)}"
                f" else {show_process(p.els)}")
    if isinstance(p, Par):
        return f"({show_process(p.left)} | {show_process(p.right)})"
    raise TypeError(f"not a process: {p!r}")


def show_program(prog: Program) -> str:
    lines = []
    for name in sorted(prog.inputs):
        lines.append(f"input {name};")
    for name in sorted(prog.outputs):
        lines.append(f"output {name};")
    for name in sorted(prog.defs):
        d = prog.defs[name]
        lines.append(f"{d.name}({', '.join(d.params)}) := {show_process(d.body)};")
    lines.append(f"main := {show_process(prog.main)}")
    return "\n".join(lines) + "\n"
