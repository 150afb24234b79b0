"""Shared fixture machines and programs for the test suite.

The two Turing machines work over pair-encoded tapes: the logical cell
value v is stored as the bit pair "0v", so the pair "1x" is free to act
as a marker (left-end sentinel for the increment machine, erasure mark
for the palindrome machine).  Inputs whose length is odd or that contain
a "1x" pair are ill-formed; the machines still halt on them, but the
semantic claims (increment, palindrome) are only made for well-formed
inputs.
"""
from procmach.formats import AtmSpec, CircuitSpec, PramProgram, RamProgram, RtmSpec, TmSpec
from procmach.parser import parse_program

BLANK = "_"


# ---------------------------------------------------------------------------
# Turing machines

def increment_tm() -> TmSpec:
    """Binary increment, least-significant cell first.

    Marks cell 0 as the sentinel "11" (remembering its value in the
    state), propagates the carry rightward, always scans to the end of
    the tape (padding a neutral "00" cell when it turns), then rewinds
    to the sentinel and patches cell 0 with its result bit.
    """
    t = {}

    def scanner(name, turn, back):
        t[(name, "0")] = (name + "o", "0", "R")
        t[(name, "1")] = (name + "o", "1", "R")
        t[(name, BLANK)] = (turn, "0", "R")
        t[(name + "o", "0")] = (name, "0", "R")
        t[(name + "o", "1")] = (name, "1", "R")
        t[(name + "o", BLANK)] = (back, "0", "L")
        t[(turn, BLANK)] = (back, "0", "L")
        t[(turn, "0")] = (back, "0", "L")
        t[(turn, "1")] = (back, "1", "L")

    def rewinder(be, bo, fix, result_bit):
        t[(be, "0")] = (bo, "0", "L")
        t[(be, "1")] = (fix, "0", "R")
        t[(bo, "0")] = (be, "0", "L")
        t[(bo, "1")] = (be, "1", "L")
        t[(fix, "0")] = ("h", result_bit, "L")
        t[(fix, "1")] = ("h", result_bit, "L")

    t[("s0", "0")] = ("s1", "1", "R")
    t[("s0", "1")] = ("s1", "1", "R")
    t[("s0", BLANK)] = ("g", "0", "R")   # empty tape: 0 + 1 = cell "01"
    t[("g", BLANK)] = ("h", "1", "L")
    t[("g", "0")] = ("h", "1", "L")
    t[("g", "1")] = ("h", "1", "L")
    t[("s1", "0")] = ("scan1", "1", "R")   # cell 0 was 0: result 1, no carry
    t[("s1", "1")] = ("ce", "1", "R")      # cell 0 was 1: result 0, carry
    t[("s1", BLANK)] = ("be1", "1", "L")
    # carry propagation over cells 1, 2, ...
    t[("ce", "0")] = ("co", "0", "R")
    t[("ce", "1")] = ("co", "1", "R")
    t[("ce", BLANK)] = ("grow", "0", "R")
    t[("co", "1")] = ("ce", "0", "R")      # 1 + carry: write 0, keep carrying
    t[("co", "0")] = ("scan0", "1", "R")   # 0 + carry: write 1, done
    t[("co", BLANK)] = ("be0", "1", "L")
    t[("grow", BLANK)] = ("be0", "1", "L")
    t[("grow", "0")] = ("be0", "1", "L")
    t[("grow", "1")] = ("be0", "1", "L")
    scanner("scan0", "turn0", "be0")
    scanner("scan1", "turn1", "be1")
    rewinder("be0", "bo0", "fix0", "0")
    rewinder("be1", "bo1", "fix1", "1")
    states = ["s0", "s1", "g", "ce", "co", "grow",
              "scan0", "scan0o", "turn0", "scan1", "scan1o", "turn1",
              "be0", "bo0", "fix0", "be1", "bo1", "fix1", "h"]
    return TmSpec(states, "s0", frozenset({"h"}), t)


def palindrome_tm() -> TmSpec:
    """Palindrome acceptor: output is empty iff the cell-decoded word is
    a palindrome.  Erases the outermost unerased pair each round (erased
    cells read "1x" at even positions) and compares their values."""
    t = {}
    t[("seekL", "1")] = ("seekLo", "1", "R")
    t[("seekL", "0")] = ("readL", "1", "R")
    t[("seekL", BLANK)] = ("hA", "0", "R")
    t[("seekLo", "0")] = ("seekL", "0", "R")
    t[("seekLo", "1")] = ("seekL", "1", "R")
    t[("seekLo", BLANK)] = ("hA", "0", "R")
    t[("readL", "0")] = ("sF0", "0", "R")
    t[("readL", "1")] = ("sF1", "1", "R")
    t[("readL", BLANK)] = ("sF0", "0", "R")
    for v in "01":
        sF, sR, sRo = f"sF{v}", f"sR{v}", f"sRo{v}"
        pA, pB, bk = f"pA{v}", f"pB{v}", f"bk{v}"
        # first cell after the erased one: data means scan on, anything
        # else means the erased cell was the middle, so accept
        t[(sF, "0")] = (sRo, "0", "R")
        t[(sF, "1")] = ("toEnd", "1", "R")
        t[(sF, BLANK)] = ("hA", "0", "R")
        # scan right to the erased block (or pad a fresh "10" at the end)
        t[(sR, "0")] = (sRo, "0", "R")
        t[(sR, "1")] = (bk, "1", "L")
        t[(sR, BLANK)] = (pA, "1", "R")
        t[(sRo, "0")] = (sR, "0", "R")
        t[(sRo, "1")] = (sR, "1", "R")
        t[(sRo, BLANK)] = ("bkE", "0", "L")
        t[(pA, BLANK)] = (pB, "0", "L")
        t[(pA, "0")] = (pB, "0", "L")
        t[(pA, "1")] = (pB, "1", "L")
        t[(pB, "1")] = (bk, "1", "L")
        t[(pB, "0")] = (bk, "0", "L")
        # compare the rightmost unerased value with v
        good, bad = ("0", "1") if v == "0" else ("1", "0")
        t[(bk, good)] = ("bkE", good, "L")
        t[(bk, bad)] = ("hR", bad, "L")
        t[(bk, BLANK)] = ("hR", "0", "L")
    t[("bkE", "0")] = ("rwO", "1", "L")
    t[("bkE", "1")] = ("rwO", "1", "L")
    t[("rwO", "0")] = ("rwE", "0", "L")
    t[("rwO", "1")] = ("rwE", "1", "L")
    t[("rwE", "0")] = ("rwO", "0", "L")
    t[("rwE", "1")] = ("seekLo", "1", "R")
    t[("toEnd", "0")] = ("toEnd", "0", "R")
    t[("toEnd", "1")] = ("toEnd", "1", "R")
    t[("toEnd", BLANK)] = ("hA", "0", "R")
    states = ["seekL", "seekLo", "readL", "sF0", "sF1",
              "sR0", "sRo0", "pA0", "pB0", "bk0",
              "sR1", "sRo1", "pA1", "pB1", "bk1",
              "bkE", "rwO", "rwE", "toEnd", "hA", "hR"]
    return TmSpec(states, "seekL", frozenset({"hA", "hR"}), t)


def well_formed(word: str) -> bool:
    return len(word) % 2 == 0 and all(word[i] == "0"
                                      for i in range(0, len(word), 2))


def decode_cells(word: str) -> str:
    """Logical string of a well-formed pair-encoded tape."""
    return "".join(word[i + 1] for i in range(0, len(word), 2))


def decode_number(word: str) -> int:
    """Value of a pair-encoded tape read as a number, cell 0 least
    significant.  Tolerates "1x" pads (they read as their value bit)."""
    return sum((1 << j) for j, b in enumerate(decode_cells(word)) if b == "1")


# ---------------------------------------------------------------------------
# alternating machine: balanced AND-OR tree

def andor_atm(depth: int) -> AtmSpec:
    """Balanced AND-OR tree of the given depth (root universal).

    The head tracks how many 1-branches were taken: branch 1 moves one
    cell right, branch 0 takes a right-left detour and stays put.  The
    leaf reached along path p therefore reads input bit number ones(p),
    so an input of depth+1 bits assigns every leaf variable.
    """
    states, polarity, trans = [], {}, {}

    def w(sym):
        return sym if sym != BLANK else "0"

    def node(k):
        return "leaf" if k == depth else f"n{k}"

    for k in range(depth):
        states.append(f"n{k}")
        polarity[f"n{k}"] = "U" if k % 2 == 0 else "E"
        for sym in ("0", "1", BLANK):
            trans[(f"n{k}", sym, "0")] = (f"s{k + 1}", w(sym), "R")
            trans[(f"n{k}", sym, "1")] = (node(k + 1), w(sym), "R")
    for k in range(1, depth + 1):
        states.append(f"s{k}")
        polarity[f"s{k}"] = "E"
        for sym in ("0", "1", BLANK):
            for br in "01":
                trans[(f"s{k}", sym, br)] = (node(k), w(sym), "L")
    states.append("leaf")
    polarity["leaf"] = "E"
    for br in "01":
        trans[("leaf", "1", br)] = ("acc", "1", "R")
        trans[("leaf", "0", br)] = ("rej", "0", "R")
        trans[("leaf", BLANK, br)] = ("rej", "0", "R")
    states += ["acc", "rej"]
    polarity["acc"] = "A"
    polarity["rej"] = "R"
    return AtmSpec(states, polarity, "n0" if depth else "leaf", trans)


def andor_value(depth: int, word: str) -> bool:
    """Direct evaluation of the balanced AND-OR tree formula."""
    def bit(pos):
        return pos < len(word) and word[pos] == "1"

    def value(k, pos):
        if k == depth:
            return bit(pos)
        a, b = value(k + 1, pos), value(k + 1, pos + 1)
        return (a and b) if k % 2 == 0 else (a or b)

    return value(0, 0)


# ---------------------------------------------------------------------------
# RAM / PRAM / circuit

def add_ram(b: int) -> RamProgram:
    """Unary addition: output 0^(a+b) on input 0^a, looping b down to 0
    while incrementing the accumulated sum."""
    code = [
        ("STORE", 1),       # mem[0] := a
        ("LOAD", 2),        # acc := mem[00] = 0
    ]
    code += [("INC", None)] * b          # acc := b
    loop = len(code) + 1
    code += [
        ("JZERO", loop + 8),             # while acc != 0:
        ("DEC", None),
        ("STORE", 2),                    #   mem[00] := acc - 1
        ("LOAD", 1),
        ("INC", None),
        ("STORE", 1),                    #   mem[0] += 1
        ("LOAD", 2),
        ("JUMP", loop),
        ("LOAD", 1),
        ("HALT", None),
    ]
    return RamProgram([(op, arg) for op, arg in code])


def indirect_ram() -> RamProgram:
    """Exercises LOADI/STOREI: stores 0^(a+1) at address 0^a, then loads
    it back indirectly."""
    return RamProgram([
        ("STORE", 1),       # mem[0] := a (used as an address below)
        ("INC", None),      # acc := 0^(a+1)
        ("STOREI", 1),      # mem[0^a] := acc
        ("LOAD", 3),        # clobber acc
        ("LOADI", 1),       # acc := mem[0^a]
        ("HALT", None),
    ])


def echo_pram() -> PramProgram:
    """Two components that each return their own input unchanged, after
    a couple of synchronized rounds."""
    comp = RamProgram([("INC", None), ("DEC", None), ("HALT", None)])
    return PramProgram([comp, comp])


def adder_circuit() -> CircuitSpec:
    """Two-bit adder in dual-rail form: inputs are a0 !a0 a1 !a1 b0 !b0
    b1 !b1 (each logical bit with its complement), outputs are the sum
    bits s0 s1 and the carry.  AND/OR gates suffice on dual rails."""
    gates = [
        ("AND", 0, 5),   # 8:  a0 and not b0
        ("AND", 1, 4),   # 9:  not a0 and b0
        ("OR", 8, 9),    # 10: s0
        ("AND", 0, 4),   # 11: c0
        ("OR", 1, 5),    # 12: not c0
        ("AND", 2, 7),   # 13
        ("AND", 3, 6),   # 14
        ("OR", 13, 14),  # 15: x = a1 xor b1
        ("AND", 2, 6),   # 16: a1 and b1
        ("AND", 3, 7),   # 17
        ("OR", 16, 17),  # 18: not x
        ("AND", 15, 12), # 19
        ("AND", 18, 11), # 20
        ("OR", 19, 20),  # 21: s1
        ("AND", 15, 11), # 22
        ("OR", 16, 22),  # 23: carry
    ]
    return CircuitSpec(8, gates, [10, 21, 23])


def adder_truth(a0: int, a1: int, b0: int, b1: int):
    total = (a0 + 2 * a1) + (b0 + 2 * b1)
    return total & 1, (total >> 1) & 1, (total >> 2) & 1


# ---------------------------------------------------------------------------
# reactive Turing machine

def rtm3() -> RtmSpec:
    """Three-state deterministic RTM shuttling over two cells, emitting
    a and b alternately, forever."""
    trans = [
        ("q0", "a", BLANK, "0", "R", "q1"),
        ("q1", "b", BLANK, "1", "L", "q2"),
        ("q1", "b", "1", "1", "L", "q2"),
        ("q2", "a", "0", "0", "R", "q1"),
    ]
    return RtmSpec(["q0", "q1", "q2"], ["a", "b"], ["0", "1"], "q0", trans)


# ---------------------------------------------------------------------------
# plain process programs

ECHO_SRC = """
input i; output o;
main := i?x.o!x.0
"""

# bit-reverse helper shared by the offline programs below
_REV = 'R(x,a) := if nil x then o!a.0 else ' \
       '(if is0 x then R<tl x, 0:a> else R<tl x, 1:a>);'

OFFLINE_IDENTITY_SRC = """
input i; output o;
main := i?x.o!x.0
"""

OFFLINE_DOUBLE_SRC = f"""
input i; output o;
{_REV}
D(x,a) := if nil x then R<a, ""> else
  (if is0 x then D<tl x, 0:0:a> else D<tl x, 1:1:a>);
main := i?x.D<x, "">
"""

OFFLINE_COUNT1_SRC = """
input i; output o;
C(x,a) := if nil x then o!a.0 else
  (if is0 x then C<tl x, a> else C<tl x, 1:a>);
main := i?x.C<x, "">
"""

# online presentations: first emit h("") (empty for all three), then
# loop reading one encoded bit (empty word = 0) and emitting the next
# difference
ONLINE_IDENTITY_SRC = """
input i; output o;
X() := i?b.(if nil b then o!"0".X<> else o!"1".X<>);
main := o!"".X<>
"""

ONLINE_DOUBLE_SRC = """
input i; output o;
X() := i?b.(if nil b then o!"00".X<> else o!"11".X<>);
main := o!"".X<>
"""

ONLINE_COUNT1_SRC = """
input i; output o;
X() := i?b.(if nil b then o!"".X<> else o!"1".X<>);
main := o!"".X<>
"""


def h_identity(s: str) -> str:
    return s


def h_double(s: str) -> str:
    return "".join(b + b for b in s)


def h_count1(s: str) -> str:
    return "1" * s.count("1")


ONLINE_OFFLINE = [
    (OFFLINE_IDENTITY_SRC, ONLINE_IDENTITY_SRC, h_identity),
    (OFFLINE_DOUBLE_SRC, ONLINE_DOUBLE_SRC, h_double),
    (OFFLINE_COUNT1_SRC, ONLINE_COUNT1_SRC, h_count1),
]


def parse(src: str):
    return parse_program(src)


# hand-written parallel programs (every one contains at least one Spn)
DIAMOND_SRCS = [
    # two senders, one receiver
    'output o; main := (["0"]!"1".0 | (["1"]!"0".0 | ["0"]?x.o!x.0))',
    # producer/consumer chains on disjoint queues
    'main := ((["0"]!"10".["0"]!"1".0 | ["0"]?x.["0"]?y.0) |'
    ' (["1"]!"0".0 | ["1"]?z.0))',
    # fan-out to both children after a spawn
    'output o; main := ["0"]!"11".(["0"]?x.(o!x.0 | o!"0".0))',
    # nested spawns with private environments
    'main := ["1"]!"0".(["1"]?a.(0 | (0 | 0)) | 0)',
    # conditional behind a receive
    'output o; main := (["0"]!"01".0 |'
    ' ["0"]?x.(if is0 x then o!tl x.0 else o!x.0))',
    # recursion plus parallelism
    'output o; W(n) := if nil n then o!"".0 else (0 | W<tl n>);'
    ' main := W<"111">',
    # two independent pipelines
    'output o; main := ((["00"]!"0".["01"]!"1".0 | ["00"]?x.o!x.0) |'
    ' ["01"]?y.o!y.0)',
    # a queue used as a cell: write then read back twice
    'main := ["0"]!"".((["0"]?x.["0"]!"0".0 | 0) | ["0"]?y.0)',
    # inputs feeding two workers
    'input i; output o; main := (i?x.o!x.0 | i?y.o!y.0)',
    # send computed keys
    'main := (["10"]!"0".0 | (["10"]?x.[x]!"1".0 | ["0"]?y.0))',
]
