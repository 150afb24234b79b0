"""Compiling Boolean circuits to process programs.

Wires 0..m-1 are the inputs, read bitwise from external channels
i1..im; gate k drives wire m+k; declared output wires are forwarded to
o1..on.  Every (wire, consumer) pair gets its own queue, so a wire with
several consumers is fanned out by explicit copies.  The resulting
behavior is not functional (outputs answer in whatever order the inputs
arrive), so it is run and compared against truth tables, never against a
function table.
"""
from __future__ import annotations

from ..formats import CircuitSpec
from ..syntax import (
    Cond, ExternalIn, ExternalOut, Internal, IsZero, Lit, NIL, Par, Process,
    Program, Recv, Send, Var,
)


def _wire_queue(wire: int, consumer: int) -> str:
    return "1" + "0" * (wire + 1) + "1" * (consumer + 1)


def _send_all(queues, bit_word: str) -> Process:
    p: Process = NIL
    for q in reversed(queues):
        p = Send(Internal(Lit(q)), Lit(bit_word), p)
    return p


def _forward_all(queues, var: str) -> Process:
    p: Process = NIL
    for q in reversed(queues):
        p = Send(Internal(Lit(q)), Var(var), p)
    return p


def encode_circuit(spec: CircuitSpec) -> Program:
    spec.validate()
    m = len(spec.gates)
    consumers: dict = {}   # wire -> list of queue names, in consumer order

    def tap(wire: int) -> str:
        q = _wire_queue(wire, len(consumers.setdefault(wire, [])))
        consumers[wire].append(q)
        return q

    # claim queues in a fixed order: gate inputs first, then output taps
    gate_in = [(tap(a), tap(b)) for (_, a, b) in spec.gates]
    out_taps = [tap(w) for w in spec.outputs]

    parts = []
    for k in range(spec.n_inputs):
        parts.append(Recv(ExternalIn(f"i{k + 1}"), "x",
                          _forward_all(consumers.get(k, []), "x")))
    for g, (kind, _a, _b) in enumerate(spec.gates):
        qa, qb = gate_in[g]
        outs = consumers.get(spec.n_inputs + g, [])
        zero, one = _send_all(outs, "0"), _send_all(outs, "1")
        if kind == "AND":
            gate = Cond(IsZero(Var("x")), zero,
                        Cond(IsZero(Var("y")), zero, one))
        else:
            gate = Cond(IsZero(Var("x")),
                        Cond(IsZero(Var("y")), zero, one), one)
        parts.append(Recv(Internal(Lit(qa)), "x",
                          Recv(Internal(Lit(qb)), "y", gate)))
    for j, q in enumerate(out_taps):
        parts.append(Recv(Internal(Lit(q)), "y",
                          Send(ExternalOut(f"o{j + 1}"), Var("y"), NIL)))

    main: Process = parts[0] if parts else NIL
    for p in parts[1:]:
        main = Par(main, p)
    return Program(frozenset(f"i{k + 1}" for k in range(spec.n_inputs)),
                   frozenset(f"o{j + 1}" for j in range(len(spec.outputs))),
                   {}, main)
