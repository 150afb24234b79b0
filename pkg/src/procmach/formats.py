"""Machine descriptions, input scripts, and function tables as text.

All formats are line-oriented; blank lines and ``#`` comments are ignored.
The empty word is written ``""`` wherever a word is expected.

Turing machine (``.tm``)::

    states: q0 q1 halt
    initial: q0
    halting: halt
    trans: q0 0 -> q0 1 R        # read symbol 0, write 1, move right
    trans: q0 _ -> halt 0 L      # _ is the blank

Alternating TM (``.atm``) adds per-state polarity (E existential,
U universal, A accepting, R rejecting) and a branch bit in transitions::

    polarity: q0 U
    trans: q0 1 0 -> q1 1 R      # branch 0

RAM (``.ram``): one instruction per line, from
LOAD k / LOADI k / STORE k / STOREI k / INC / DEC / JZERO t / JUMP t /
HALT (k a cell number, t a 1-based instruction number).

PRAM (``.pram``): RAM components separated by ``component:`` lines.

Circuit (``.circ``)::

    inputs: 2
    gate: AND 0 1      # drives wire 2 (inputs are wires 0..m-1)
    outputs: 2

Reactive TM (``.rtm``)::

    states: s t
    initial: s
    actions: a b
    data: x y
    trans: s a _ x R t           # state, action (or tau), read, write
                                 # (_ is the blank), move, next state
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .syntax import Word, is_word

BLANK = "_"


class FormatError(Exception):
    pass


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_word(token: str) -> Word:
    if token == '""':
        return ""
    if not is_word(token):
        raise FormatError(f"not a word over 0/1: {token!r}")
    return token


# ---------------------------------------------------------------------------
# code assignment

def assign_codes(names: Sequence[str]) -> dict:
    """Fixed-width binary codes in declaration order."""
    width = max(1, (len(names) - 1).bit_length())
    return {name: format(k, f"0{width}b") for k, name in enumerate(names)}


def assign_unary_codes(names: Sequence[str]) -> dict:
    """All-ones codes in declaration order; every code is a palindrome and
    survives string reversal, which the stack encoding relies on."""
    return {name: "1" * (k + 1) for k, name in enumerate(names)}


# ---------------------------------------------------------------------------
# Turing machines

@dataclass
class TmSpec:
    states: list
    initial: str
    halting: set
    trans: dict  # (state, symbol) -> (state, written, move)

    def validate(self):
        if self.initial not in self.states:
            raise FormatError(f"unknown initial state {self.initial!r}")
        for (q, a), (q2, b, m) in self.trans.items():
            if q not in self.states or q2 not in self.states:
                raise FormatError(f"unknown state in transition {q} {a}")
            if q in self.halting:
                raise FormatError(f"transition from halting state {q!r}")
            if a not in ("0", "1", BLANK) or b not in ("0", "1"):
                raise FormatError(f"bad symbols in transition {q} {a}")
            if m not in ("L", "R"):
                raise FormatError(f"bad move {m!r}")


def parse_tm(text: str) -> TmSpec:
    states: list = []
    initial = None
    halting: set = set()
    trans: dict = {}
    for lineno, line in _lines(text):
        key, _, rest = line.partition(":")
        parts = rest.split()
        if key == "states":
            states.extend(parts)
        elif key == "initial":
            (initial,) = parts
        elif key == "halting":
            halting.update(parts)
        elif key == "trans":
            if len(parts) != 6 or parts[2] != "->":
                raise FormatError(f"line {lineno}: bad transition {line!r}")
            q, a, _, q2, b, m = parts
            if (q, a) in trans:
                raise FormatError(f"line {lineno}: duplicate transition {q} {a}")
            trans[(q, a)] = (q2, b, m)
        else:
            raise FormatError(f"line {lineno}: unknown directive {key!r}")
    if initial is None:
        raise FormatError("missing initial state")
    spec = TmSpec(states, initial, halting, trans)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# Alternating Turing machines

@dataclass
class AtmSpec:
    states: list
    polarity: dict  # state -> 'E' | 'U' | 'A' | 'R'
    initial: str
    trans: dict     # (state, symbol, branch) -> (state, written, move)

    def validate(self):
        if self.initial not in self.states:
            raise FormatError(f"unknown initial state {self.initial!r}")
        for q in self.states:
            pol = self.polarity.get(q)
            if pol not in ("E", "U", "A", "R"):
                raise FormatError(f"state {q!r} lacks a polarity")
            if pol in ("A", "R"):
                continue
            for a in ("0", "1", BLANK):
                if any((q, a, i) in self.trans for i in "01"):
                    for i in "01":
                        if (q, a, i) not in self.trans:
                            raise FormatError(
                                f"state {q!r} on {a!r} lacks branch {i}")


def parse_atm(text: str) -> AtmSpec:
    states: list = []
    polarity: dict = {}
    initial = None
    trans: dict = {}
    for lineno, line in _lines(text):
        key, _, rest = line.partition(":")
        parts = rest.split()
        if key == "states":
            states.extend(parts)
        elif key == "initial":
            (initial,) = parts
        elif key == "polarity":
            q, pol = parts
            polarity[q] = pol
        elif key == "trans":
            if len(parts) != 7 or parts[3] != "->":
                raise FormatError(f"line {lineno}: bad transition {line!r}")
            q, a, i, _, q2, b, m = parts
            trans[(q, a, i)] = (q2, b, m)
        else:
            raise FormatError(f"line {lineno}: unknown directive {key!r}")
    if initial is None:
        raise FormatError("missing initial state")
    spec = AtmSpec(states, polarity, initial, trans)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# RAMs and PRAMs

RAM_OPS = {"LOAD": 1, "LOADI": 1, "STORE": 1, "STOREI": 1,
           "INC": 0, "DEC": 0, "JZERO": 1, "JUMP": 1, "HALT": 0}


@dataclass
class RamProgram:
    instructions: list  # of (op, arg or None)

    def validate(self):
        if not self.instructions:
            raise FormatError("empty RAM program")
        n = len(self.instructions)
        for k, (op, arg) in enumerate(self.instructions, 1):
            if op not in RAM_OPS:
                raise FormatError(f"instruction {k}: unknown op {op!r}")
            if (arg is not None) != bool(RAM_OPS[op]):
                raise FormatError(f"instruction {k}: bad operand for {op}")
            if op in ("JZERO", "JUMP") and not 1 <= arg <= n:
                raise FormatError(f"instruction {k}: jump target {arg} out of range")


def _parse_ram_lines(pairs) -> RamProgram:
    instrs = []
    for lineno, line in pairs:
        parts = line.split()
        op = parts[0].upper()
        arg = int(parts[1]) if len(parts) > 1 else None
        instrs.append((op, arg))
    prog = RamProgram(instrs)
    prog.validate()
    return prog


def parse_ram(text: str) -> RamProgram:
    return _parse_ram_lines(_lines(text))


@dataclass
class PramProgram:
    components: list  # of RamProgram

    def validate(self):
        if not self.components:
            raise FormatError("PRAM needs at least one component")


def parse_pram(text: str) -> PramProgram:
    groups: list = []
    for lineno, line in _lines(text):
        if line.rstrip(":") == "component":
            groups.append([])
        else:
            if not groups:
                raise FormatError("PRAM text must start with 'component:'")
            groups[-1].append((lineno, line))
    prog = PramProgram([_parse_ram_lines(g) for g in groups])
    prog.validate()
    return prog


# ---------------------------------------------------------------------------
# circuits

@dataclass
class CircuitSpec:
    n_inputs: int
    gates: list    # of (kind 'AND'|'OR', wire, wire); gate k drives wire n_inputs+k
    outputs: list  # of wire ids

    def validate(self):
        if self.n_inputs < 0:
            raise FormatError("negative input count")
        for k, (kind, a, b) in enumerate(self.gates):
            if kind not in ("AND", "OR"):
                raise FormatError(f"gate {k}: unknown kind {kind!r}")
            for w in (a, b):
                if not 0 <= w < self.n_inputs + k:
                    raise FormatError(f"gate {k}: wire {w} not yet driven")
        for w in self.outputs:
            if not 0 <= w < self.n_inputs + len(self.gates):
                raise FormatError(f"output wire {w} not driven")


def parse_circuit(text: str) -> CircuitSpec:
    n_inputs = 0
    gates: list = []
    outputs: list = []
    for lineno, line in _lines(text):
        key, _, rest = line.partition(":")
        parts = rest.split()
        if key == "inputs":
            n_inputs = int(parts[0])
        elif key == "gate":
            kind, a, b = parts[0].upper(), int(parts[1]), int(parts[2])
            gates.append((kind, a, b))
        elif key == "outputs":
            outputs.extend(int(p) for p in parts)
        else:
            raise FormatError(f"line {lineno}: unknown directive {key!r}")
    spec = CircuitSpec(n_inputs, gates, outputs)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# reactive Turing machines

TAU_ACTION = "tau"


@dataclass
class RtmSpec:
    states: list
    actions: list   # visible action names; 'tau' is written literally
    data: list      # data alphabet, without the blank
    initial: str
    trans: list     # of (state, action or None, read, write, move, state);
                    # read/write use data names or '_' for the blank

    def validate(self):
        syms = set(self.data) | {BLANK}
        for s, a, d, e, m, t in self.trans:
            if s not in self.states or t not in self.states:
                raise FormatError(f"unknown state in {s} -> {t}")
            if a is not None and a not in self.actions:
                raise FormatError(f"unknown action {a!r}")
            if d not in syms or e not in syms:
                raise FormatError(f"unknown symbol in {s} -> {t}")
            if m not in ("L", "R"):
                raise FormatError(f"bad move {m!r}")


def parse_rtm(text: str) -> RtmSpec:
    states: list = []
    actions: list = []
    data: list = []
    initial = None
    trans: list = []
    for lineno, line in _lines(text):
        key, _, rest = line.partition(":")
        parts = rest.split()
        if key == "states":
            states.extend(parts)
        elif key == "actions":
            actions.extend(parts)
        elif key == "data":
            data.extend(parts)
        elif key == "initial":
            (initial,) = parts
        elif key == "trans":
            if len(parts) != 6:
                raise FormatError(f"line {lineno}: bad transition {line!r}")
            s, a, d, e, m, t = parts
            trans.append((s, None if a == TAU_ACTION else a, d, e, m, t))
        else:
            raise FormatError(f"line {lineno}: unknown directive {key!r}")
    if initial is None:
        raise FormatError("missing initial state")
    spec = RtmSpec(states, actions, data, initial, trans)
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# input scripts and function tables

def parse_script(text: str) -> dict:
    """``channel <name>: <word> <word> ...`` lines -> words per channel."""
    script: dict = {}
    for lineno, line in _lines(text):
        if not line.startswith("channel "):
            raise FormatError(f"line {lineno}: expected 'channel <name>: ...'")
        head, _, rest = line[len("channel "):].partition(":")
        name = head.strip()
        script.setdefault(name, []).extend(
            parse_word(tok) for tok in rest.split())
    return script


def parse_funtable(text: str) -> dict:
    """``<word> -> <word>`` lines."""
    table: dict = {}
    for lineno, line in _lines(text):
        parts = line.split()
        if len(parts) != 3 or parts[1] != "->":
            raise FormatError(f"line {lineno}: expected '<word> -> <word>'")
        key = parse_word(parts[0])
        if key in table:
            raise FormatError(f"line {lineno}: duplicate key {parts[0]}")
        table[key] = parse_word(parts[2])
    return table
