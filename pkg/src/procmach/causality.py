"""Causal structure of runs and per-output cost measures.

A run is a sequence of step records.  Two steps are *dependent* when

- their tags are comparable in the prefix order (same processor, or one
  processor is a descendant of the other via Spn), or
- both are queue operations (Snd/Rcv) on the same queue key, or
- both are inputs (Inp) on the same external channel, or
- both are outputs (Out) on the same external channel.

Everything else commutes.  The causal order of a run is the transitive
closure of dependence restricted to pairs in run order; an *event* is a
step together with everything below it.

Cost measures, per event e:

- ``time_cost``: the heaviest dependence-respecting chain ending at e
  (sum of rule weights along the chain).
- ``input_size``: sum of |w| + 1 over the Inp steps causally below e
  (inclusive, though an Out event is never an Inp event).
- ``space_cost``: the largest configuration size |C| seen while replaying
  the downset of e.  ``observed`` mode replays the downset in original run
  order; ``exact`` mode takes the maximum over all linearizations of the
  downset (feasible only for small downsets).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Optional, Sequence

from .machine import StepRecord, replay
from .syntax import Program


def tags_comparable(a: str, b: str) -> bool:
    return a.startswith(b) or b.startswith(a)


def dependent(a: StepRecord, b: StepRecord) -> bool:
    if tags_comparable(a.tag, b.tag):
        return True
    if a.op in ("Snd", "Rcv") and b.op in ("Snd", "Rcv") and a.channel == b.channel:
        return True
    if a.op == "Inp" and b.op == "Inp" and a.channel == b.channel:
        return True
    if a.op == "Out" and b.op == "Out" and a.channel == b.channel:
        return True
    return False


@dataclass
class CausalDag:
    records: Sequence[StepRecord]
    preds: list  # preds[i]: sorted list of immediate predecessor indices

    def downset(self, i: int) -> list:
        """Indices of all steps causally below step i, inclusive, sorted."""
        seen = {i}
        stack = [i]
        while stack:
            for j in self.preds[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return sorted(seen)

    def below(self, i: int, j: int) -> bool:
        return i in set(self.downset(j))


def build_causal_dag(records: Sequence[StepRecord]) -> CausalDag:
    """Immediate-predecessor edges whose transitive closure is the full
    dependence order.

    For each step it suffices to link back to: the latest earlier step on
    the same processor line (tag a prefix of this one; earlier comparable
    tags are always prefixes, since a child tag cannot exist before its
    parent's Spn), the latest earlier queue operation on the same key, and
    the latest earlier Inp/Out on the same external channel.  Steps inside
    one class form a chain, so one edge per class closes transitively.
    """
    last_on_line: dict = {}   # tag -> index of latest step with that exact tag
    last_queue: dict = {}     # queue key -> index of latest Snd/Rcv
    last_io: dict = {}        # (op, channel) -> index of latest Inp/Out
    preds: list = []
    for i, r in enumerate(records):
        ps = set()
        # walk up the prefix chain: the nearest ancestor line that has acted
        tag = r.tag
        while True:
            if tag in last_on_line:
                ps.add(last_on_line[tag])
                break
            if not tag:
                break
            tag = tag[:-1]
        if r.op in ("Snd", "Rcv"):
            if r.channel in last_queue:
                ps.add(last_queue[r.channel])
            last_queue[r.channel] = i
        elif r.op in ("Inp", "Out"):
            key = (r.op, r.channel)
            if key in last_io:
                ps.add(last_io[key])
            last_io[key] = i
        last_on_line[r.tag] = i
        preds.append(sorted(ps))
    return CausalDag(records, preds)


def time_cost(dag: CausalDag, i: int) -> int:
    """Weight of the heaviest causal chain ending at step i."""
    down = dag.downset(i)
    best = {}
    for j in down:
        prev = [best[k] for k in dag.preds[j] if k in best]
        best[j] = dag.records[j].weight + (max(prev) if prev else 0)
    return best[i]


def oracle_time_cost(dag: CausalDag, i: int) -> int:
    """Brute force over all chains in the downset of step i.

    Exponential; for cross-checks on small downsets only.
    """
    down = dag.downset(i)
    recs = dag.records

    def heaviest(j):
        below = [k for k in down if k < j and dependent(recs[k], recs[j])]
        return recs[j].weight + max((heaviest(k) for k in below), default=0)

    return heaviest(i)


def input_size(dag: CausalDag, i: int) -> int:
    return sum(len(dag.records[j].word) + 1
               for j in dag.downset(i) if dag.records[j].op == "Inp")


def space_cost(program: Program, dag: CausalDag, i: int,
               mode: str = "observed", exact_limit: int = 9) -> int:
    """Peak configuration size while producing the event of step i.

    ``observed``: replay the downset in original run order.
    ``exact``: maximum peak over every linearization of the downset (an
    event's space cost ranges over all of its essential runs).
    Returns the observed value (a lower bound) if an exact request
    exceeds ``exact_limit`` steps.
    """
    down = dag.downset(i)
    recs = [dag.records[j] for j in down]
    observed = max(replay(program, recs))
    if mode == "observed" or len(down) > exact_limit:
        return observed
    if mode != "exact":
        raise ValueError(f"unknown space mode {mode!r}")
    best = observed
    for order in _linearizations(dag, down):
        peak = max(replay(program, [dag.records[j] for j in order]))
        best = max(best, peak)
    return best


def _linearizations(dag: CausalDag, down: Sequence[int]):
    downset = set(down)
    preds = {j: [k for k in dag.preds[j] if k in downset] for j in down}
    order: list = []
    placed: set = set()

    def extend():
        if len(order) == len(down):
            yield list(order)
            return
        for j in down:
            if j not in placed and all(k in placed for k in preds[j]):
                placed.add(j)
                order.append(j)
                yield from extend()
                order.pop()
                placed.remove(j)

    yield from extend()


def output_events(dag: CausalDag) -> list:
    """Indices of the Out steps, in run (and hence emission) order."""
    return [i for i, r in enumerate(dag.records) if r.op == "Out"]


@dataclass
class OutputCosts:
    index: int          # step index in the run
    channel: str
    word: str
    time: int
    space: int
    space_mode: str     # 'observed' or 'exact'
    insize: int
    inputs: list        # (channel, word) of Inp steps below, in causal order


def cost_summary(program: Program, records: Sequence[StepRecord],
                 space_mode: str = "observed",
                 exact_limit: int = 9) -> list:
    """Per-output costs for a finished run."""
    dag = build_causal_dag(records)
    out = []
    for i in output_events(dag):
        r = records[i]
        down = dag.downset(i)
        mode = space_mode
        if mode == "exact" and len(down) > exact_limit:
            mode = "observed"
        out.append(OutputCosts(
            index=i, channel=r.channel, word=r.word,
            time=time_cost(dag, i),
            space=space_cost(program, dag, i, mode, exact_limit),
            space_mode=mode,
            insize=input_size(dag, i),
            inputs=[(records[j].channel, records[j].word)
                    for j in down if records[j].op == "Inp"]))
    return out
