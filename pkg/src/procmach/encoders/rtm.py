"""Internal choice and the compilation of reactive Turing machines.

The tape is held as two stacks around the head.  A stack is a pair of
words: the concatenated symbol codes, and a 0-separated list of unary
code lengths (so elements of varying length can be popped).  ``Pop``
returns the top symbol, the rest of the content, and the rest of the
length list via three sends on queue "0"; popping rebuilds the top code
reversed, which is harmless because every code is a palindrome (we use
the all-ones codes 1, 11, 111, ...).

Each machine step emits its action code on the output channel (silent
steps emit nothing), then pops the stack it moves toward and pushes the
written symbol on the other one.  When several transitions are enabled
the encoding picks one by an internal coin-flip cascade on queue "".
"""
from __future__ import annotations

from typing import Sequence

from ..formats import BLANK, RtmSpec, assign_unary_codes
from ..syntax import (
    Call, Cond, ExternalOut, Internal, IsEmpty, IsZero, Lit, NIL, Par,
    Prepend, Process, ProcDef, Program, Recv, Send, Tail, Var, Word,
)
from .dispatch import dispatch_process, prepend_word

OUT = "o"
POP = "0"     # queue for Pop's three return values
CHOICE = ""   # queue for internal choice


def internal_choice(key: Word, branches: Sequence[Process]) -> Process:
    """The inductive coin-flip cascade over a queue: two senders race a
    two-read selector; the second word read picks between the last branch
    and the cascade over the remaining ones."""
    q = Internal(Lit(key))
    proc: Process = NIL
    for m, branch in enumerate(branches, 1):
        x, y = f"c{m}x", f"c{m}y"
        proc = Par(
            Par(Send(q, Lit("0"), NIL), Send(q, Lit("1"), NIL)),
            Recv(q, x, Recv(q, y,
                            Cond(IsZero(Var(y)), proc, branch))))
    return proc


def _pop_def(blank_code: Word) -> ProcDef:
    ret = Send(Internal(Lit(POP)), Lit(blank_code),
               Send(Internal(Lit(POP)), Lit(""),
                    Send(Internal(Lit(POP)), Lit(""), NIL)))
    done = Send(Internal(Lit(POP)), Var("t"),
                Send(Internal(Lit(POP)), Var("x"),
                     Send(Internal(Lit(POP)), Tail(Var("th")), NIL)))
    step = Cond(IsZero(Var("x")),
                Call("Pop", (Tail(Var("x")), Tail(Var("th")),
                             Prepend("0", Var("t")))),
                Call("Pop", (Tail(Var("x")), Tail(Var("th")),
                             Prepend("1", Var("t")))))
    body = Cond(IsEmpty(Var("th")), ret,
                Cond(IsZero(Var("th")), done, step))
    return ProcDef("Pop", ("x", "th", "t"), body)


def _branch(codes, action, write, move, target) -> Process:
    wcode = codes[write]
    lengths = "1" * len(wcode) + "0"
    if move == "R":
        pop_args = (Var("r"), Var("rc"), Lit(""))
        cont = Call("T", (Lit(codes[target]),
                          prepend_word(wcode, Var("f")),
                          prepend_word(lengths, Var("fc")),
                          Var("hd"), Var("st"), Var("ln")))
    else:
        pop_args = (Var("f"), Var("fc"), Lit(""))
        cont = Call("T", (Lit(codes[target]), Var("st"), Var("ln"),
                          Var("hd"),
                          prepend_word(wcode, Var("r")),
                          prepend_word(lengths, Var("rc"))))
    step = Par(Call("Pop", pop_args),
               Recv(Internal(Lit(POP)), "hd",
                    Recv(Internal(Lit(POP)), "st",
                         Recv(Internal(Lit(POP)), "ln", cont))))
    if action is None:
        return step
    return Send(ExternalOut(OUT), Lit(codes[action]), step)


def encode_rtm(spec: RtmSpec) -> Program:
    spec.validate()
    # one shared code space keeps every code a distinct palindrome
    codes = assign_unary_codes(
        list(spec.states) + [BLANK] + list(spec.data) + list(spec.actions))
    params = ("s", "f", "fc", "d", "r", "rc")
    state_table = {}
    for q in spec.states:
        sym_table = {}
        for sym in [BLANK] + list(spec.data):
            branches = [_branch(codes, a, e, m, t)
                        for (s, a, d, e, m, t) in spec.trans
                        if s == q and d == sym]
            if len(branches) == 1:
                # a single enabled transition needs no coin flip (the
                # one-branch cascade could silently fall through to 0)
                sym_table[codes[sym]] = branches[0]
            elif branches:
                sym_table[codes[sym]] = internal_choice(CHOICE, branches)
        state_table[codes[q]] = dispatch_process(sym_table, NIL, Var("d"))
    body = dispatch_process(state_table, NIL, Var("s"))
    defs = {"T": ProcDef("T", params, body),
            "Pop": _pop_def(codes[BLANK])}
    main = Call("T", (Lit(codes[spec.initial]), Lit(""), Lit(""),
                      Lit(codes[BLANK]), Lit(""), Lit("")))
    return Program(frozenset(), frozenset({OUT}), defs, main)
