"""Compiling RAM and PRAM programs to process programs.

Integers are unary: n is the word 0^n.  A memory cell at address word a
is a recursive process serving requests on queue a: the empty word is a
no-op, 0w sends the value on queue w, 1w stores w.  The allocator listens
on queue "1" and lazily creates cells up to the largest address seen.
Reply queues start with 1 and have length at least 2, so they never
collide with cell addresses (runs of 0) or the allocator queue.

A PRAM puts one RAM component per external input/output channel pair in
parallel with a shared memory and a clock.  The clock grants component k
one instruction per round via a tick on queue 1^(k+2), and each
instruction acknowledges completion on a separate queue 01^(k+2) (tick
and acknowledgement travel on distinct queues so neither end can consume
its own message).  A halted component keeps its final tick and stops
acknowledging, which lets the whole machine fall quiescent.
"""
from __future__ import annotations

from ..formats import PramProgram, RamProgram
from ..syntax import (
    Call, Cond, ExternalIn, ExternalOut, Internal, IsEmpty, IsZero, Lit, NIL,
    Par, Prepend, Process, ProcDef, Program, Recv, Send, Tail, Var,
)
from .dispatch import prepend_word

ALLOC = "1"


def _cell_def() -> ProcDef:
    serve = Cond(IsEmpty(Var("y")),
                 Call("C", (Var("x"), Var("v"))),
                 Cond(IsZero(Var("y")),
                      Send(Internal(Tail(Var("y"))), Var("v"),
                           Call("C", (Var("x"), Var("v")))),
                      Call("C", (Var("x"), Tail(Var("y"))))))
    return ProcDef("C", ("x", "v"), Recv(Internal(Var("x")), "y", serve))


def _allocator_defs() -> dict:
    """M(c): cells at addresses up to c exist; on request x, create the
    missing cells c+1 .. x (if any) and continue as M(max(c, x))."""
    m = ProcDef("M", ("c",), Recv(Internal(Lit(ALLOC)), "x",
                Call("DM", (Var("x"), Var("c"), Var("x"), Var("c")))))
    # DM compares x <= c bit by bit, carrying the originals along
    dm = ProcDef("DM", ("m", "n", "om", "on"), Cond(
        IsEmpty(Var("m")),
        Call("M", (Var("on"),)),
        Cond(IsEmpty(Var("n")),
             Par(Call("MP", (Prepend("0", Var("on")), Var("om"))),
                 Call("M", (Var("om"),))),
             Call("DM", (Tail(Var("m")), Tail(Var("n")),
                         Var("om"), Var("on"))))))
    # MP(m, n): create the cell at m, then the next one, until m = n
    mp = ProcDef("MP", ("m", "n"), Par(
        Call("C", (Var("m"), Lit(""))),
        Call("EM", (Var("m"), Var("n"), Var("m"), Var("n")))))
    em = ProcDef("EM", ("m", "n", "om", "on"), Cond(
        IsEmpty(Var("m")),
        Cond(IsEmpty(Var("n")), NIL, Call("MP", (Prepend("0", Var("om")),
                                                 Var("on")))),
        Cond(IsEmpty(Var("n")),
             Call("MP", (Prepend("0", Var("om")), Var("on"))),
             Call("EM", (Tail(Var("m")), Tail(Var("n")),
                         Var("om"), Var("on"))))))
    return {d.name: d for d in (m, dm, mp, em)}


def _addr(k: int) -> str:
    return "0" * k


class _Component:
    """Instruction compiler for one RAM, with namespaced definitions."""

    def __init__(self, ram: RamProgram, prefix: str, acc: str, out: str,
                 comp_index: int, tick=None, ack=None):
        self.ram = ram
        self.prefix = prefix
        self.acc = acc
        self.out = out
        self.comp_index = comp_index
        self.tick = tick
        self.ack = ack
        self.sites = 0

    def reply(self) -> str:
        self.sites += 1
        return "1" + "0" * self.sites + "1" * self.comp_index

    def iname(self, j: int) -> str:
        return f"{self.prefix}I{j}"

    def goto(self, j: int) -> Process:
        """Continuation to instruction j: acknowledge the clock first."""
        nxt = Call(self.iname(j)) if j <= len(self.ram.instructions) else NIL
        if self.ack is not None:
            return Send(Internal(Lit(self.ack)), Lit(""), nxt)
        return nxt

    def ensure(self, addr_expr) -> "function":
        return lambda then: Send(Internal(Lit(ALLOC)), addr_expr, then)

    def read(self, cell_expr, var: str):
        rch = self.reply()
        return lambda then: Send(
            Internal(cell_expr), prepend_word("0" + rch, Lit("")),
            Recv(Internal(Lit(rch)), var, then))

    def write(self, cell_expr, value_expr):
        return lambda then: Send(Internal(cell_expr), Prepend("1", value_expr),
                                 then)

    def body(self, j: int) -> Process:
        op, arg = self.ram.instructions[j - 1]
        acc = Lit(self.acc)
        nxt = self.goto(j + 1)

        def seq(steps, last):
            for step in reversed(steps):
                last = step(last)
            return last

        if op == "LOAD":
            a = Lit(_addr(arg))
            return seq([self.ensure(a), self.read(a, "v"),
                        self.write(acc, Var("v"))], nxt)
        if op == "LOADI":
            a = Lit(_addr(arg))
            return seq([self.ensure(a), self.read(a, "v"),
                        self.ensure(Var("v")), self.read(Var("v"), "w"),
                        self.write(acc, Var("w"))], nxt)
        if op == "STORE":
            a = Lit(_addr(arg))
            return seq([self.read(acc, "v"), self.ensure(a),
                        self.write(a, Var("v"))], nxt)
        if op == "STOREI":
            a = Lit(_addr(arg))
            return seq([self.ensure(a), self.read(a, "v"),
                        self.read(acc, "w"), self.ensure(Var("v")),
                        self.write(Var("v"), Var("w"))], nxt)
        if op == "INC":
            return seq([self.read(acc, "v"),
                        self.write(acc, Prepend("0", Var("v")))], nxt)
        if op == "DEC":
            return seq([self.read(acc, "v")], Cond(
                IsEmpty(Var("v")),
                self.write(acc, Lit(""))(nxt),
                self.write(acc, Tail(Var("v")))(nxt)))
        if op == "JZERO":
            return seq([self.read(acc, "v")], Cond(
                IsEmpty(Var("v")), self.goto(arg), nxt))
        if op == "JUMP":
            return self.goto(arg)
        if op == "HALT":
            # read the accumulator and forward it to the external output;
            # no acknowledgement: the component is done
            rch = self.reply()
            return Par(
                Send(Internal(acc), Lit("0" + rch), NIL),
                Recv(Internal(Lit(rch)), "v",
                     Send(ExternalOut(self.out), Var("v"), NIL)))
        raise ValueError(f"unknown instruction {op!r}")

    def defs(self) -> dict:
        out = {}
        for j in range(1, len(self.ram.instructions) + 1):
            body = self.body(j)
            if self.tick is not None:
                body = Recv(Internal(Lit(self.tick)), "tk", body)
            out[self.iname(j)] = ProcDef(self.iname(j), (), body)
        return out


def encode_ram(ram: RamProgram) -> Program:
    ram.validate()
    comp = _Component(ram, "", acc="", out="o", comp_index=0)
    defs = {**_allocator_defs(), "C": _cell_def(), **comp.defs()}
    # the accumulator holds the input; cell "0" backs the allocator's
    # initial claim that every address up to its argument exists
    main = Par(
        Recv(ExternalIn("i"), "x",
             Par(Call(comp.iname(1)), Call("C", (Lit(""), Var("x"))))),
        Par(Call("C", (Lit("0"), Lit(""))), Call("M", (Lit("0"),))))
    return Program(frozenset({"i"}), frozenset({"o"}), defs, main)


def _tick(k: int) -> str:
    return "1" * (k + 2)


def _ack(k: int) -> str:
    return "0" + "1" * (k + 2)


def encode_pram(pram: PramProgram) -> Program:
    pram.validate()
    n = len(pram.components)
    defs = {**_allocator_defs(), "C": _cell_def()}
    comps = []
    for k, ram in enumerate(pram.components, 1):
        comp = _Component(ram, f"P{k}", acc=_addr(k), out=f"o{k}",
                          comp_index=k, tick=_tick(k), ack=_ack(k))
        comps.append(comp)
        defs.update(comp.defs())
    # clock: tick every component, then collect every acknowledgement
    clock: Process = Call("K")
    for k in range(n, 0, -1):
        clock = Recv(Internal(Lit(_ack(k))), f"a{k}", clock)
    for k in range(n, 0, -1):
        clock = Send(Internal(Lit(_tick(k))), Lit(""), clock)
    defs["K"] = ProcDef("K", (), clock)

    parts = []
    for k, comp in enumerate(comps, 1):
        parts.append(Recv(ExternalIn(f"i{k}"), "x", Par(
            Call(comp.iname(1)), Call("C", (Lit(_addr(k)), Var("x"))))))
    base = _addr(n + 1)
    parts.append(Par(Call("C", (Lit(""), Lit(""))),
                     Par(Call("C", (Lit(base), Lit(""))),
                         Par(Call("M", (Lit(base),)), Call("K")))))
    main = parts[0]
    for p in parts[1:]:
        main = Par(main, p)
    return Program(frozenset(f"i{k}" for k in range(1, n + 1)),
                   frozenset(f"o{k}" for k in range(1, n + 1)),
                   defs, main)
