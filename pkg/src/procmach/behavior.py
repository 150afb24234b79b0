"""Finite transition systems, weak bisimilarity, and divergence.

The transition system of a program branches over every word on its input
channels, so only a finite fragment can be materialized: ``explore_lts``
restricts input branching to a given finite set of words and stops at a
state limit (and optionally a visible-action depth), marking unexpanded
states as truncated.

Labels are ``"tau"``, ``("in", channel, word)``, ``("out", channel, word)``.

``weak_bisim`` computes the greatest relation closed under the weak
simulation clauses in both directions.  With ``divergence_sensitive``,
related states must agree on divergence (the ability to perform an
infinite sequence of internal moves); the one canonical consequence is
that a silent loop is not equivalent to a deadlock.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .machine import (
    Config, MachineError, ProcState, ScriptedInput, fire, initial_config,
)
from .syntax import (
    Call, Cond, ExternalIn, Internal, Nil, Par, Program, Recv, Send, Word,
    eval_str, EvalError,
)

TAU = "tau"


@dataclass
class FiniteLts:
    init: object
    states: set
    edges: dict                      # state -> list of (label, state)
    truncated: set = field(default_factory=set)   # unexpanded states
    errors: set = field(default_factory=set)      # states with aborted moves

    def moves(self, s):
        return self.edges.get(s, [])

    @property
    def complete(self) -> bool:
        return not self.truncated and not self.errors


# ---------------------------------------------------------------------------
# exploring a program

def _canonical(config: Config):
    procs = frozenset((s.tag, s.proc, frozenset(s.env.items()))
                      for s in config.processors.values())
    queues = frozenset((k, tuple(q)) for k, q in config.queues.items() if q)
    return (procs, queues)


def _config_of(state) -> Config:
    procs, queues = state
    return Config({tag: ProcState(proc, dict(env), tag)
                   for tag, proc, env in procs},
                  {k: list(q) for k, q in queues})


def _successors(state, program: Program, input_words):
    """Yield (label, successor state); raises nothing, collects errors."""
    procs, _ = state
    out = []
    errors = False
    for tag, proc, _env in sorted(procs):
        is_input = (isinstance(proc, Recv)
                    and isinstance(proc.channel, ExternalIn))
        words = input_words if is_input else [None]
        for w in words:
            config = _config_of(state)
            provider = ScriptedInput({proc.channel.name: [w]} if is_input else {})
            if isinstance(proc, Recv) and isinstance(proc.channel, Internal):
                st = config.processors[tag]
                try:
                    key = eval_str(proc.channel.key, st.env)
                except EvalError:
                    errors = True
                    continue
                if not config.queues.get(key):
                    continue
            try:
                rec = fire(config, tag, program, provider, 0)
            except MachineError:
                errors = True
                continue
            if rec.op == "Out":
                label = ("out", rec.channel, rec.word)
            elif rec.op == "Inp":
                label = ("in", rec.channel, rec.word)
            else:
                label = TAU
            out.append((label, _canonical(config)))
    return out, errors


def explore_lts(program: Program, input_words, state_limit: int = 5000,
                visible_depth: Optional[int] = None) -> FiniteLts:
    """Breadth-first fragment of the program's transition system.

    Input branching ranges over ``input_words`` on every ready input
    channel.  States beyond ``state_limit``, or past ``visible_depth``
    visible actions, are kept but marked truncated.
    """
    input_words = sorted(set(input_words), key=lambda w: (len(w), w))
    init = _canonical(initial_config(program))
    lts = FiniteLts(init, {init}, {})
    depth = {init: 0}
    queue = deque([init])
    while queue:
        s = queue.popleft()
        if visible_depth is not None and depth[s] >= visible_depth:
            lts.truncated.add(s)
            continue
        succs, errs = _successors(s, program, input_words)
        if errs:
            lts.errors.add(s)
        lts.edges[s] = succs
        for label, t in succs:
            d = depth[s] + (0 if label == TAU else 1)
            if t not in lts.states:
                if len(lts.states) >= state_limit:
                    lts.truncated.add(s)
                    lts.edges[s] = [m for m in lts.edges[s] if m[1] in lts.states]
                    continue
                lts.states.add(t)
                depth[t] = d
                queue.append(t)
            elif d < depth[t]:
                depth[t] = d
                queue.append(t)
    return lts


# ---------------------------------------------------------------------------
# the transition system of a function table

def functional_lts(table: Mapping[Word, Word],
                   in_channel: str = "i", out_channel: str = "o") -> FiniteLts:
    """One input transition per word of the domain, then the one matching
    output transition, then a terminal state."""
    init = ("ask",)
    lts = FiniteLts(init, {init}, {init: []})
    for w in sorted(table, key=lambda w: (len(w), w)):
        mid = ("answer", w)
        done = ("done", w)
        lts.states.update({mid, done})
        lts.edges[init].append((("in", in_channel, w), mid))
        lts.edges[mid] = [(("out", out_channel, table[w]), done)]
        lts.edges[done] = []
    return lts


# ---------------------------------------------------------------------------
# divergence

def divergent_states(lts: FiniteLts) -> set:
    """States with an infinite internal path: those that reach, via
    internal moves, an internal cycle."""
    tau_succ = {s: [t for (l, t) in lts.moves(s) if l == TAU] for s in lts.states}
    # iterative Tarjan for strongly connected components of the tau graph
    index: dict = {}
    low: dict = {}
    on: set = set()
    stack: list = []
    counter = [0]
    in_cycle: set = set()

    for root in lts.states:
        if root in index:
            continue
        work = [(root, iter(tau_succ[root]))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(tau_succ[w])))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                if len(comp) > 1 or v in tau_succ[v]:
                    in_cycle.update(comp)

    # backward closure under tau edges
    rev: dict = {s: [] for s in lts.states}
    for s in lts.states:
        for t in tau_succ[s]:
            rev[t].append(s)
    result = set(in_cycle)
    frontier = list(in_cycle)
    while frontier:
        t = frontier.pop()
        for s in rev[t]:
            if s not in result:
                result.add(s)
                frontier.append(s)
    return result


# ---------------------------------------------------------------------------
# weak bisimilarity

@dataclass
class BisimVerdict:
    equivalent: bool
    divergence_sensitive: bool
    conclusive: bool
    witness: Optional[object] = None  # on failure: (state_a, state_b, reason)

    def __bool__(self):
        return self.equivalent


def _tau_closure(lts: FiniteLts) -> dict:
    clo = {}
    for s in lts.states:
        seen = {s}
        frontier = [s]
        while frontier:
            v = frontier.pop()
            for l, t in lts.moves(v):
                if l == TAU and t not in seen:
                    seen.add(t)
                    frontier.append(t)
        clo[s] = seen
    return clo


def _weak_moves(lts: FiniteLts, clo: dict) -> dict:
    """state -> {visible label -> set of weak destinations (tau* a tau*)}."""
    weak: dict = {}
    for s in lts.states:
        dests: dict = {}
        for v in clo[s]:
            for l, t in lts.moves(v):
                if l != TAU:
                    dests.setdefault(l, set()).update(clo[t])
        weak[s] = dests
    return weak


def weak_bisim(a: FiniteLts, b: FiniteLts,
               divergence_sensitive: bool = False) -> BisimVerdict:
    """Greatest weak bisimulation between the explored fragments.

    With the divergence flag, every related pair must agree on divergence;
    the condition is enforced on the relation and its inverse alike, so
    the verdict stays symmetric.  A positive verdict on a truncated or
    error-carrying fragment is reported as inconclusive.
    """
    clo_a, clo_b = _tau_closure(a), _tau_closure(b)
    weak_a, weak_b = _weak_moves(a, clo_a), _weak_moves(b, clo_b)
    if divergence_sensitive:
        div_a, div_b = divergent_states(a), divergent_states(b)

    rel = {(s, t) for s in a.states for t in b.states}
    if divergence_sensitive:
        rel = {(s, t) for (s, t) in rel if (s in div_a) == (t in div_b)}
    reasons: dict = {}

    def matched(s, t, lts_s, clo_s, weak_t, clo_t, flip):
        """Every strong move of s weakly matched by t; returns bad move."""
        for l, s2 in lts_s.moves(s):
            if l == TAU:
                if not any(((s2, t2) if not flip else (t2, s2)) in rel
                           for t2 in clo_t[t]):
                    return l
            else:
                if not any(((s2, t2) if not flip else (t2, s2)) in rel
                           for t2 in weak_t[t].get(l, ())):
                    return l
        return None

    changed = True
    while changed:
        changed = False
        for pair in list(rel):
            s, t = pair
            bad = matched(s, t, a, clo_a, weak_b, clo_b, False)
            if bad is None:
                bad = matched(t, s, b, clo_b, weak_a, clo_a, True)
            if bad is not None:
                rel.discard(pair)
                reasons[pair] = (s, t, bad)
                changed = True

    init_pair = (a.init, b.init)
    equivalent = init_pair in rel
    conclusive = a.complete and b.complete
    witness = rel if equivalent else reasons.get(
        init_pair, (a.init, b.init, "divergence mismatch"))
    return BisimVerdict(equivalent, divergence_sensitive,
                        conclusive or not equivalent, witness)


def bounded_weak_bisim(a: FiniteLts, b: FiniteLts, depth: int) -> BisimVerdict:
    """Weak bisimilarity up to ``depth`` rounds of visible actions.

    Each round demands that every weak visible move on either side is
    matched by a weak move with the same label into the previous round's
    relation.  Internal moves are absorbed, so this is insensitive to
    divergence; useful when the fragments are depth-truncated.
    """
    clo_a, clo_b = _tau_closure(a), _tau_closure(b)
    weak_a, weak_b = _weak_moves(a, clo_a), _weak_moves(b, clo_b)
    rel = {(s, t) for s in a.states for t in b.states}
    for _ in range(depth):
        new = set()
        for s, t in rel:
            ok = True
            for l, dests in weak_a[s].items():
                for s2 in dests:
                    if not any((s2, t2) in rel for t2 in weak_b[t].get(l, ())):
                        ok = False
            for l, dests in weak_b[t].items():
                for t2 in dests:
                    if not any((s2, t2) in rel for s2 in weak_a[s].get(l, ())):
                        ok = False
            if ok:
                new.add((s, t))
        if new == rel:
            break
        rel = new
    equivalent = (a.init, b.init) in rel
    return BisimVerdict(equivalent, False, True,
                        rel if equivalent else (a.init, b.init, "bounded round"))


def check_functional(program: Program, table: Mapping[Word, Word],
                     state_limit: int = 5000,
                     in_channel: str = "i",
                     out_channel: str = "o") -> BisimVerdict:
    """Does the program, fed one word from the table's domain, answer with
    exactly the table's value?  Divergence-sensitive comparison against
    the table's transition system."""
    lts = explore_lts(program, set(table), state_limit)
    spec = functional_lts(table, in_channel, out_channel)
    return weak_bisim(lts, spec, divergence_sensitive=True)
