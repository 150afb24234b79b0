"""Compiling alternating Turing machines to process programs.

Every step branches into two computations, spawned as parallel subtrees.
Each tree node holds a result channel ``d``; its children get ``0:d`` and
``1:d``, so channel words spell out the (reversed) tree address.  A
collector per node reads both child verdicts and combines them with the
conjunction or disjunction matching the node state's polarity.  Leaves
(accepting or rejecting states) put ``"1"`` or ``"0"`` on their channel,
and the root verdict is forwarded to the external output.
"""
from __future__ import annotations

from ..formats import BLANK, AtmSpec, assign_codes
from ..syntax import (
    Call, Cond, ExternalIn, ExternalOut, Internal, IsEmpty, IsZero, Lit, NIL,
    Par, Prepend, ProcDef, Program, Recv, Send, Tail, Var,
)
from .dispatch import finite_dispatch

IN, OUT = "i", "o"
ROOT = "1"   # the root node's result channel


def _bool_gates():
    d = Internal(Var("c"))
    out0 = Send(d, Lit("0"), NIL)
    out1 = Send(d, Lit("1"), NIL)
    andv = ProcDef("AndV", ("x", "y", "c"), Cond(
        IsZero(Var("x")), out0, Cond(IsZero(Var("y")), out0, out1)))
    orv = ProcDef("OrV", ("x", "y", "c"), Cond(
        IsZero(Var("x")), Cond(IsZero(Var("y")), out0, out1), out1))
    return andv, orv


def _step(spec: AtmSpec, codes, state: str, symbol: str, branch: str):
    pol = spec.polarity[state]
    if pol == "A":
        return Send(Internal(Var("d")), Lit("1"), NIL)
    if pol == "R":
        return Send(Internal(Var("d")), Lit("0"), NIL)
    hit = spec.trans.get((state, symbol, branch))
    if hit is None:
        return NIL
    q2, c, move = hit
    rest = Lit("") if symbol == BLANK else Tail(Var("r"))
    if move == "R":
        return Call("N", (Lit(codes[q2]), Prepend(c, Var("l")), rest, Var("d")))
    shifted = Prepend(c, rest)
    return Cond(IsEmpty(Var("l")),
                NIL,
                Cond(IsZero(Var("l")),
                     Call("N", (Lit(codes[q2]), Tail(Var("l")),
                                Prepend("0", shifted), Var("d"))),
                     Call("N", (Lit(codes[q2]), Tail(Var("l")),
                                Prepend("1", shifted), Var("d")))))


def encode_atm(spec: AtmSpec) -> Program:
    spec.validate()
    codes = assign_codes(spec.states)
    defs = {}
    for d in _bool_gates():
        defs[d.name] = d
    params = ("s", "l", "r", "d")
    for branch in "01":
        for symbol, stem in ((BLANK, "Fe"), ("0", "F0"), ("1", "F1")):
            name = stem + branch
            table = {codes[q]: _step(spec, codes, q, symbol, branch)
                     for q in spec.states}
            defs[name] = finite_dispatch(name, table, NIL, params)
        tname = "T" + branch
        defs[tname] = ProcDef(tname, params, Cond(
            IsEmpty(Var("r")),
            Call("Fe" + branch, tuple(Var(p) for p in params)),
            Cond(IsZero(Var("r")),
                 Call("F0" + branch, tuple(Var(p) for p in params)),
                 Call("F1" + branch, tuple(Var(p) for p in params)))))
    # per-node collector: read both child verdicts, combine by polarity.
    # Final states also flow through a collector, with two equal child
    # verdicts; a conjunction reproduces the verdict.
    op_table = {codes[q]: Call("OrV" if spec.polarity[q] == "E" else "AndV",
                               (Var("y"), Var("z"), Var("d")))
                for q in spec.states}
    defs["FOp"] = finite_dispatch("FOp", op_table, NIL, ("s", "y", "z", "d"))
    defs["N"] = ProcDef("N", params, Par(
        Par(Call("T0", (Var("s"), Var("l"), Var("r"), Prepend("0", Var("d")))),
            Call("T1", (Var("s"), Var("l"), Var("r"), Prepend("1", Var("d"))))),
        Recv(Internal(Prepend("0", Var("d"))), "y",
             Recv(Internal(Prepend("1", Var("d"))), "z",
                  Call("FOp", (Var("s"), Var("y"), Var("z"), Var("d")))))))
    main = Recv(ExternalIn(IN), "x", Par(
        Call("N", (Lit(codes[spec.initial]), Lit(""), Var("x"), Lit(ROOT))),
        Recv(Internal(Lit(ROOT)), "y", Send(ExternalOut(OUT), Var("y"), NIL))))
    return Program(frozenset({IN}), frozenset({OUT}), defs, main)
