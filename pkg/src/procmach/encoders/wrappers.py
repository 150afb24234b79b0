"""Behavior wrappers: serverization and the online/offline conversions.

``serverize`` turns a one-shot functional program into a server that
answers every request: each input spawns a fresh copy of the body.

The online/offline wrappers convert between the two presentations of a
monotonic string function h: the *offline* form reads a whole word and
answers h(w); the *online* form emits h of the input received so far,
one difference at a time, reading one bit per round.  Bits on the wire
use the convention that the empty word is 0 and any nonempty word is 1.
The wrapped program keeps its own definitions; its external channels are
rewired onto reserved internal queues (distinctive all-alternating keys,
assumed unused by the wrapped program).
"""
from __future__ import annotations

from ..syntax import (
    Call, Cond, ExternalIn, ExternalOut, Internal, IsEmpty, IsZero, Lit, NIL,
    Par, Prepend, Process, ProcDef, Program, Recv, Send, Tail, Var,
)

# queues linking wrapper and wrapped copy
WRAP_IN = "10101"
WRAP_OUT = "11011"


def _rewire(p: Process, mapping: dict) -> Process:
    def chan(ch):
        if isinstance(ch, ExternalIn) and ("in", ch.name) in mapping:
            return Internal(Lit(mapping[("in", ch.name)]))
        if isinstance(ch, ExternalOut) and ("out", ch.name) in mapping:
            return Internal(Lit(mapping[("out", ch.name)]))
        return ch

    if isinstance(p, (type(NIL),)):
        return p
    if isinstance(p, Call):
        return p
    if isinstance(p, Send):
        return Send(chan(p.channel), p.value, _rewire(p.then, mapping))
    if isinstance(p, Recv):
        return Recv(chan(p.channel), p.var, _rewire(p.then, mapping))
    if isinstance(p, Cond):
        return Cond(p.test, _rewire(p.then, mapping), _rewire(p.els, mapping))
    if isinstance(p, Par):
        return Par(_rewire(p.left, mapping), _rewire(p.right, mapping))
    raise TypeError(f"not a process: {p!r}")


def _fresh(base: str, taken) -> str:
    if base not in taken:
        return base
    k = 2
    while f"{base}{k}" in taken:
        k += 1
    return f"{base}{k}"


def _split_main(prog: Program):
    main = prog.main
    if not (isinstance(main, Recv) and isinstance(main.channel, ExternalIn)):
        raise ValueError("program's main must start by reading its input")
    return main.channel.name, main.var, main.then


def serverize(prog: Program) -> Program:
    """``S := i?x.(Body<x> | S<>)``: every request is answered by a fresh
    copy of the wrapped program's body."""
    in_ch, var, body = _split_main(prog)
    defs = dict(prog.defs)
    bname = _fresh("Body", defs)
    sname = _fresh("Srv", defs)
    defs[bname] = ProcDef(bname, (var,), body)
    defs[sname] = ProcDef(sname, (), Recv(
        ExternalIn(in_ch), var, Par(Call(bname, (Var(var),)), Call(sname))))
    return Program(prog.inputs, prog.outputs, defs, Call(sname))


def offline_from_online(online: Program, in_ch: str = "i",
                        out_ch: str = "o") -> Program:
    """From an online implementation of monotonic h, build the one-shot
    program computing h: read the word, feed it bit by bit, concatenate
    the emitted differences (accumulated in reverse, restored at the
    end), and answer the concatenation."""
    q_main = _rewire(online.main, {("in", in_ch): WRAP_IN,
                                   ("out", out_ch): WRAP_OUT})
    defs = {name: ProcDef(d.name, d.params, _rewire(d.body, {
        ("in", in_ch): WRAP_IN, ("out", out_ch): WRAP_OUT}))
            for name, d in online.defs.items()}
    drive = _fresh("WDrive", defs)
    app = _fresh("WApp", defs)
    nxt = _fresh("WNext", defs)
    fin = _fresh("WFin", defs)
    defs[drive] = ProcDef(drive, ("x", "rc"), Recv(
        Internal(Lit(WRAP_OUT)), "d",
        Call(app, (Var("d"), Var("rc"), Var("x")))))
    defs[app] = ProcDef(app, ("d", "rc", "x"), Cond(
        IsEmpty(Var("d")),
        Call(nxt, (Var("x"), Var("rc"))),
        Cond(IsZero(Var("d")),
             Call(app, (Tail(Var("d")), Prepend("0", Var("rc")), Var("x"))),
             Call(app, (Tail(Var("d")), Prepend("1", Var("rc")), Var("x"))))))
    defs[nxt] = ProcDef(nxt, ("x", "rc"), Cond(
        IsEmpty(Var("x")),
        Call(fin, (Var("rc"), Lit(""))),
        Cond(IsZero(Var("x")),
             Send(Internal(Lit(WRAP_IN)), Lit(""),
                  Call(drive, (Tail(Var("x")), Var("rc")))),
             Send(Internal(Lit(WRAP_IN)), Lit("1"),
                  Call(drive, (Tail(Var("x")), Var("rc")))))))
    defs[fin] = ProcDef(fin, ("rc", "out"), Cond(
        IsEmpty(Var("rc")),
        Send(ExternalOut(out_ch), Var("out"), NIL),
        Cond(IsZero(Var("rc")),
             Call(fin, (Tail(Var("rc")), Prepend("0", Var("out")))),
             Call(fin, (Tail(Var("rc")), Prepend("1", Var("out")))))))
    main = Recv(ExternalIn(in_ch), "x",
                Par(q_main, Call(drive, (Var("x"), Lit("")))))
    return Program(frozenset({in_ch}), frozenset({out_ch}), defs, main)


def online_from_offline(offline: Program, in_ch: str = "i",
                        out_ch: str = "o") -> Program:
    """From a one-shot implementation of monotonic h, build the online
    program: on each round, send the input so far to a fresh copy,
    receive h of it, emit the difference with the output already
    produced, then wait for the next bit."""
    _, var, body = _split_main(offline)
    body = _rewire(body, {("out", out_ch): WRAP_OUT,
                          ("in", in_ch): WRAP_IN})
    defs = {name: ProcDef(d.name, d.params, _rewire(d.body, {
        ("out", out_ch): WRAP_OUT, ("in", in_ch): WRAP_IN}))
            for name, d in offline.defs.items()}
    pbody = _fresh("WBody", defs)
    psrv = _fresh("WSrv", defs)
    snd = _fresh("WSnd", defs)
    diff = _fresh("WDiff", defs)
    step = _fresh("WStep", defs)
    defs[pbody] = ProcDef(pbody, (var,), body)
    defs[psrv] = ProcDef(psrv, (), Recv(
        Internal(Lit(WRAP_IN)), var,
        Par(Call(pbody, (Var(var),)), Call(psrv))))
    # rs carries the input so far, reversed; acc rebuilds it in order
    defs[snd] = ProcDef(snd, ("t", "acc", "rs", "r"), Cond(
        IsEmpty(Var("t")),
        Send(Internal(Lit(WRAP_IN)), Var("acc"),
             Recv(Internal(Lit(WRAP_OUT)), "y",
                  Call(diff, (Var("y"), Var("r"), Var("y"), Var("rs"))))),
        Cond(IsZero(Var("t")),
             Call(snd, (Tail(Var("t")), Prepend("0", Var("acc")),
                        Var("rs"), Var("r"))),
             Call(snd, (Tail(Var("t")), Prepend("1", Var("acc")),
                        Var("rs"), Var("r"))))))
    # drop the cumulated prefix rr from y, emit the remainder, loop
    defs[diff] = ProcDef(diff, ("y", "rr", "oy", "rs"), Cond(
        IsEmpty(Var("rr")),
        Par(Send(ExternalOut(out_ch), Var("y"), NIL),
            Recv(ExternalIn(in_ch), "b",
                 Cond(IsEmpty(Var("b")),
                      Call(step, (Prepend("0", Var("rs")), Var("oy"))),
                      Call(step, (Prepend("1", Var("rs")), Var("oy")))))),
        Call(diff, (Tail(Var("y")), Tail(Var("rr")), Var("oy"), Var("rs")))))
    defs[step] = ProcDef(step, ("rs", "r"),
                         Call(snd, (Var("rs"), Lit(""), Var("rs"), Var("r"))))
    main = Par(Call(psrv), Call(step, (Lit(""), Lit(""))))
    return Program(frozenset({in_ch}), frozenset({out_ch}), defs, main)
