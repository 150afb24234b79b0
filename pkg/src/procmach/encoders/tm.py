"""Compiling deterministic Turing machines to process programs.

A configuration is held in three strings: the state code ``s``, the tape
left of the head in reverse order ``l``, and the tape from the head
rightward ``r`` (the blank region is the part beyond ``r``).  One
recursive definition ``T`` dispatches on the first symbol of ``r`` into
per-symbol finite-domain dispatchers over the state code.  Halting states
emit ``r`` on the output channel; a left move at the left end jams the
machine (process 0, no output).  No parallel composition is emitted, so
runs use a single processor.
"""
from __future__ import annotations

from ..formats import BLANK, TmSpec, assign_codes
from ..syntax import (
    Call, Cond, ExternalIn, ExternalOut, IsEmpty, IsZero, Lit, NIL, Prepend,
    ProcDef, Program, Recv, Send, Tail, Var,
)
from .dispatch import finite_dispatch

IN, OUT = "i", "o"


def _step(spec: TmSpec, codes, state: str, symbol: str):
    """The process taken in state ``state`` reading ``symbol`` (possibly
    the blank), over free variables l and r."""
    if state in spec.halting:
        return Send(ExternalOut(OUT), Var("r"), NIL)
    hit = spec.trans.get((state, symbol))
    if hit is None:
        return NIL
    q2, c, move = hit
    rest = Lit("") if symbol == BLANK else Tail(Var("r"))
    if move == "R":
        return Call("T", (Lit(codes[q2]), Prepend(c, Var("l")), rest))
    # left move: shift the last left symbol back onto the written cell
    shifted = Prepend(c, rest)
    return Cond(IsEmpty(Var("l")),
                NIL,
                Cond(IsZero(Var("l")),
                     Call("T", (Lit(codes[q2]), Tail(Var("l")),
                                Prepend("0", shifted))),
                     Call("T", (Lit(codes[q2]), Tail(Var("l")),
                                Prepend("1", shifted)))))


def encode_tm(spec: TmSpec) -> Program:
    spec.validate()
    codes = assign_codes(spec.states)
    defs = {}
    for symbol, dname in ((BLANK, "Fe"), ("0", "F0"), ("1", "F1")):
        table = {codes[q]: _step(spec, codes, q, symbol) for q in spec.states}
        defs[dname] = finite_dispatch(dname, table, NIL, ("s", "l", "r"))
    defs["T"] = ProcDef("T", ("s", "l", "r"), Cond(
        IsEmpty(Var("r")),
        Call("Fe", (Var("s"), Var("l"), Var("r"))),
        Cond(IsZero(Var("r")),
             Call("F0", (Var("s"), Var("l"), Var("r"))),
             Call("F1", (Var("s"), Var("l"), Var("r"))))))
    main = Recv(ExternalIn(IN), "x",
                Call("T", (Lit(codes[spec.initial]), Lit(""), Var("x"))))
    return Program(frozenset({IN}), frozenset({OUT}), defs, main)
