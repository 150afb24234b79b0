"""Concrete grammar and parser for process programs.

Grammar (line comments start with '#'):

    program  = ("input" NAME ";")* ("output" NAME ";")* def* "main" ":=" proc
    def      = NAME "(" [VAR ("," VAR)*] ")" ":=" proc ";"
    proc     = "0"
             | NAME "<" [expr ("," expr)*] ">"
             | chan "!" expr "." proc
             | chan "?" VAR "." proc
             | "if" bool "then" proc "else" proc
             | "(" proc "|" proc ")"     -- plain "(" proc ")" also accepted
    chan     = NAME                       -- declared input/output channel
             | "[" expr "]"              -- internal queue key
    expr     = VAR | '"' [01]* '"' | "0" ":" expr | "1" ":" expr
             | "tl" expr | "(" expr ")"
    bool     = "tt" | "ff" | "is0" expr | "nil" expr

After parsing, bound variables are alpha-renamed so that within ``main`` and
within each definition body they are pairwise distinct (and distinct from
the definition's parameters).
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    BoolLit, Call, Cond, ExternalIn, ExternalOut, Internal, IsEmpty, IsZero,
    Lit, Nil, NIL, Par, Prepend, ProcDef, Program, Recv, Send, Tail, Var,
    free_vars,
)


class ParseError(Exception):
    def __init__(self, msg, line=None, col=None):
        loc = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{msg}{loc}")
        self.line = line
        self.col = col


class SemanticError(Exception):
    pass


KEYWORDS = {"input", "output", "main", "if", "then", "else",
            "tt", "ff", "is0", "nil", "tl"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<string>"[01]*")
  | (?P<assign>:=)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<digit>[01])
  | (?P<sym>[;<>(),.\[\]!?|:])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str  # 'ident', 'string', 'digit', or the symbol itself
    text: str
    line: int
    col: int


def tokenize(text):
    toks = []
    pos, line, linestart = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}",
                             line, pos - linestart + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind == "ws":
            line += tok.count("\n")
            if "\n" in tok:
                linestart = pos + tok.rindex("\n") + 1
        else:
            col = pos - linestart + 1
            if kind == "sym" or kind == "assign":
                toks.append(Token(tok, tok, line, col))
            else:
                toks.append(Token(kind, tok, line, col))
        pos = m.end()
    toks.append(Token("eof", "", line, len(text) - linestart + 1))
    return toks


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.i = 0

    @property
    def cur(self):
        return self.toks[self.i]

    def error(self, expected):
        t = self.cur
        got = t.text or "end of input"
        raise ParseError(f"expected {expected}, got {got!r}", t.line, t.col)

    def accept(self, kind, text=None):
        t = self.cur
        if t.kind == kind and (text is None or t.text == text):
            self.i += 1
            return t
        return None

    def expect(self, kind, text=None):
        t = self.accept(kind, text)
        if t is None:
            self.error(text or kind)
        return t

    # -- expressions -------------------------------------------------------

    def expr(self):
        t = self.cur
        if t.kind == "digit":
            self.i += 1
            self.expect(":")
            return Prepend(t.text, self.expr())
        if t.kind == "string":
            self.i += 1
            return Lit(t.text[1:-1])
        if t.kind == "ident" and t.text == "tl":
            self.i += 1
            return Tail(self.expr())
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            return Var(t.text)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        self.error("string expression")

    def boolean(self):
        t = self.cur
        if t.kind == "ident" and t.text in ("tt", "ff"):
            self.i += 1
            return BoolLit(t.text == "tt")
        if t.kind == "ident" and t.text == "is0":
            self.i += 1
            return IsZero(self.expr())
        if t.kind == "ident" and t.text == "nil":
            self.i += 1
            return IsEmpty(self.expr())
        self.error("Boolean expression")

    # -- processes ---------------------------------------------------------

    def process(self, decls):
        t = self.cur
        if t.kind == "digit" and t.text == "0" and self.toks[self.i + 1].kind != ":":
            self.i += 1
            return NIL
        if self.accept("("):
            left = self.process(decls)
            if self.accept("|"):
                right = self.process(decls)
                self.expect(")")
                return Par(left, right)
            self.expect(")")
            return left
        if t.kind == "ident" and t.text == "if":
            self.i += 1
            b = self.boolean()
            self.expect("ident", "then")
            p = self.process(decls)
            self.expect("ident", "else")
            q = self.process(decls)
            return Cond(b, p, q)
        if self.accept("["):
            key = self.expr()
            self.expect("]")
            return self.comm_tail(Internal(key), decls, t)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if self.accept("<"):
                args = []
                if not self.accept(">"):
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                    self.expect(">")
                return Call(t.text, tuple(args))
            inputs, outputs = decls
            if self.cur.kind == "!":
                if t.text not in outputs:
                    raise SemanticError(
                        f"send on {t.text!r}, which is not a declared output channel")
                return self.comm_tail(ExternalOut(t.text), decls, t)
            if self.cur.kind == "?":
                if t.text not in inputs:
                    raise SemanticError(
                        f"receive on {t.text!r}, which is not a declared input channel")
                return self.comm_tail(ExternalIn(t.text), decls, t)
            self.error("'!' , '?' or '<' after name")
        self.error("process")

    def comm_tail(self, chan, decls, at):
        if self.accept("!"):
            if isinstance(chan, ExternalIn):
                raise SemanticError(f"send on input channel {chan.name!r}")
            value = self.expr()
            self.expect(".")
            return Send(chan, value, self.process(decls))
        if self.accept("?"):
            if isinstance(chan, ExternalOut):
                raise SemanticError(f"receive on output channel {chan.name!r}")
            var = self.expect("ident").text
            if var in KEYWORDS:
                raise ParseError(f"keyword {var!r} used as variable", at.line, at.col)
            self.expect(".")
            return Recv(chan, var, self.process(decls))
        self.error("'!' or '?'")

    # -- programs ----------------------------------------------------------

    def program(self):
        inputs, outputs = set(), set()
        while self.cur.kind == "ident" and self.cur.text == "input":
            self.i += 1
            inputs.add(self.expect("ident").text)
            self.expect(";")
        while self.cur.kind == "ident" and self.cur.text == "output":
            self.i += 1
            outputs.add(self.expect("ident").text)
            self.expect(";")
        if inputs & outputs:
            raise SemanticError(
                f"channels declared both input and output: {sorted(inputs & outputs)}")
        decls = (inputs, outputs)
        defs = {}
        while True:
            t = self.cur
            if t.kind == "ident" and t.text == "main":
                break
            if t.kind != "ident" or t.text in KEYWORDS:
                self.error("definition or 'main'")
            self.i += 1
            self.expect("(")
            params = []
            if not self.accept(")"):
                params.append(self.expect("ident").text)
                while self.accept(","):
                    params.append(self.expect("ident").text)
                self.expect(")")
            if len(set(params)) != len(params):
                raise SemanticError(f"duplicate parameter in definition of {t.text!r}")
            self.expect(":=")
            body = self.process(decls)
            self.expect(";")
            if t.text in defs:
                raise SemanticError(f"duplicate definition of {t.text!r}")
            defs[t.text] = ProcDef(t.text, tuple(params), body)
        self.expect("ident", "main")
        self.expect(":=")
        main = self.process(decls)
        self.expect("eof")
        return Program(frozenset(inputs), frozenset(outputs), defs, main)


# ---------------------------------------------------------------------------
# alpha renaming: make bound variables pairwise distinct

def _rename(p, used, taken, subst):
    """Rename bound variables of p so none repeats a name in `taken`."""
    if isinstance(p, Nil):
        return p
    if isinstance(p, Call):
        return Call(p.name, tuple(_substitute(a, subst) for a in p.args))
    if isinstance(p, Send):
        return Send(_subst_chan(p.channel, subst), _substitute(p.value, subst),
                    _rename(p.then, used, taken, subst))
    if isinstance(p, Recv):
        var = p.var
        if var in taken:
            var = _fresh(p.var, used)
            subst = dict(subst, **{p.var: Var(var)})
        elif p.var in subst:
            subst = {k: v for k, v in subst.items() if k != p.var}
        used.add(var)
        taken = taken | {var}
        return Recv(_subst_chan(p.channel, subst), var,
                    _rename(p.then, used, taken, subst))
    if isinstance(p, Cond):
        return Cond(_subst_bool(p.test, subst),
                    _rename(p.then, used, taken, subst),
                    _rename(p.els, used, taken, subst))
    if isinstance(p, Par):
        # sequential threading of `taken` keeps names distinct across branches
        left = _rename(p.left, used, taken, subst)
        taken = taken | _bound_vars(left)
        return Par(left, _rename(p.right, used, taken, subst))
    raise TypeError(f"not a process: {p!r}")


def _bound_vars(p):
    if isinstance(p, (Nil, Call)):
        return frozenset()
    if isinstance(p, Send):
        return _bound_vars(p.then)
    if isinstance(p, Recv):
        return _bound_vars(p.then) | {p.var}
    if isinstance(p, Cond):
        return _bound_vars(p.then) | _bound_vars(p.els)
    if isinstance(p, Par):
        return _bound_vars(p.left) | _bound_vars(p.right)
    raise TypeError


def _fresh(base, used):
    n = 2
    while f"{base}_{n}" in used:
        n += 1
    return f"{base}_{n}"


def _substitute(e, subst):
    if isinstance(e, Var):
        return subst.get(e.name, e)
    if isinstance(e, Lit):
        return e
    if isinstance(e, Prepend):
        return Prepend(e.bit, _substitute(e.expr, subst))
    if isinstance(e, Tail):
        return Tail(_substitute(e.expr, subst))
    raise TypeError


def _subst_bool(b, subst):
    if isinstance(b, BoolLit):
        return b
    if isinstance(b, IsZero):
        return IsZero(_substitute(b.expr, subst))
    if isinstance(b, IsEmpty):
        return IsEmpty(_substitute(b.expr, subst))
    raise TypeError


def _subst_chan(ch, subst):
    if isinstance(ch, Internal):
        return Internal(_substitute(ch.key, subst))
    return ch


def alpha_rename_process(p, reserved=frozenset()):
    used = set(reserved) | {v for v in free_vars(p)} | set(_bound_vars(p))
    return _rename(p, used, frozenset(reserved), {})


# ---------------------------------------------------------------------------
# validation

def validate_program(prog: Program) -> None:
    fv = free_vars(prog.main)
    if fv:
        raise SemanticError(f"free variable {sorted(fv)[0]!r} in main")
    for d in prog.defs.values():
        extra = free_vars(d.body) - set(d.params)
        if extra:
            raise SemanticError(
                f"free variable {sorted(extra)[0]!r} in definition of {d.name!r}")
    for name, body in [("main", prog.main)] + [
            (d.name, d.body) for d in prog.defs.values()]:
        for callee, arity in _calls(body):
            d = prog.defs.get(callee)
            if d is None:
                raise SemanticError(f"call to undefined identifier {callee!r} in {name}")
            if d.arity != arity:
                raise SemanticError(
                    f"{callee!r} called with {arity} arguments in {name},"
                    f" defined with {d.arity}")


def _calls(p):
    if isinstance(p, Nil):
        return
    elif isinstance(p, Call):
        yield p.name, len(p.args)
    elif isinstance(p, (Send, Recv)):
        yield from _calls(p.then)
    elif isinstance(p, Cond):
        yield from _calls(p.then)
        yield from _calls(p.els)
    elif isinstance(p, Par):
        yield from _calls(p.left)
        yield from _calls(p.right)


def parse_program(text: str) -> Program:
    prog = _Parser(tokenize(text)).program()
    defs = {name: ProcDef(d.name, d.params,
                          alpha_rename_process(d.body, reserved=set(d.params)))
            for name, d in prog.defs.items()}
    prog = Program(prog.inputs, prog.outputs, defs,
                   alpha_rename_process(prog.main))
    validate_program(prog)
    return prog
