"""Finite-domain dispatch: compiling a map from words to processes into a
cascade of emptiness/first-bit tests that progressively explores the key."""
from __future__ import annotations

from typing import Mapping

from ..syntax import (
    Cond, IsEmpty, IsZero, Lit, NIL, Prepend, ProcDef, Process, StrExpr, Tail,
    Var, Word,
)


def prepend_word(word: Word, base: StrExpr) -> StrExpr:
    """The expression evaluating to ``word`` followed by ``base``."""
    e = base
    for bit in reversed(word):
        e = Prepend(bit, e)
    return e


def word_expr(word: Word) -> StrExpr:
    return Lit(word)


def dispatch_process(table: Mapping[Word, Process], default: Process,
                     key: StrExpr) -> Process:
    """Nested conditionals selecting ``table[key]``, or ``default`` when the
    key is outside the table's domain.  The key is consumed bit by bit with
    emptiness and first-bit tests; ``key`` is re-derived as tl tl ... at
    each depth, mirroring hand-written finite-domain dispatchers."""
    def build(entries: Mapping[Word, Process], expr: StrExpr) -> Process:
        if not entries:
            return default
        empty = entries.get("", default)
        rest = {k: p for k, p in entries.items() if k}
        if not rest:
            return Cond(IsEmpty(expr), empty, default)
        zeros = {k[1:]: p for k, p in rest.items() if k[0] == "0"}
        ones = {k[1:]: p for k, p in rest.items() if k[0] == "1"}
        return Cond(IsEmpty(expr), empty,
                    Cond(IsZero(expr),
                         build(zeros, Tail(expr)),
                         build(ones, Tail(expr))))

    return build(dict(table), key)


def finite_dispatch(name: str, table: Mapping[Word, Process],
                    default: Process, params) -> ProcDef:
    """A definition whose body dispatches on its first parameter."""
    params = tuple(params)
    body = dispatch_process(table, default, Var(params[0]))
    return ProcDef(name, params, body)
