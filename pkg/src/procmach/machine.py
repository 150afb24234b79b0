"""The process machine: configurations, single steps, and complete runs.

A configuration holds a set of processors, each a triple of a residual
process, an environment, and a binary-string tag, together with a family of
string-keyed FIFO queues.  Eight rules can fire:

======  ==========================  =======================================
rule    redex                       weight
======  ==========================  =======================================
Nil     ``0``                       1
Rec     ``A<E1,...,Ek>``            1 + sum of the t(Ei)
Snd     ``[F]!E.P``                 1 + t(E) + t(F)
Rcv     ``[F]?x.P``                 1 + t(F) + |s|   (s the string read)
Out     ``o!E.P``                   1 + t(E)
Inp     ``i?x.P``                   1 + |s|          (s the string read)
Cnd     ``if B then P else Q``      1 + t(B)
Spn     ``(P | Q)``                 1 + |M|          (M the environment)
======  ==========================  =======================================

where t(E) is the time to evaluate E (``expr_time_cost``) and |M| is the
environment size (``env_size``).  Spn replaces the processor tagged p with
two processors tagged p0 and p1, each keeping a copy of M.

The size |C| of a configuration is the total queue content length plus the
sum of the environment sizes.

Runs end quiescent (no rule can fire: every processor is gone or blocked
on an empty queue or an exhausted input channel), hit a step limit, or
abort on an evaluation error.
"""
from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .syntax import (
    Call, Cond, EvalError, ExternalIn, ExternalOut, Internal, Nil, Par,
    Process, Program, Recv, Send, Word, env_size, eval_bool, eval_str,
    expr_time_cost,
)


@dataclass
class ProcState:
    proc: Process
    env: dict
    tag: str

    def copy(self) -> "ProcState":
        return ProcState(self.proc, dict(self.env), self.tag)


@dataclass
class Config:
    processors: dict  # tag -> ProcState
    queues: dict      # key word -> list of words (front at index 0)

    def copy(self) -> "Config":
        return Config({t: s.copy() for t, s in self.processors.items()},
                      {k: list(q) for k, q in self.queues.items()})

    def size(self) -> int:
        total = sum(len(w) for q in self.queues.values() for w in q)
        total += sum(env_size(s.env) for s in self.processors.values())
        return total


def initial_config(program: Program) -> Config:
    return Config({"": ProcState(program.main, {}, "")}, {})


@dataclass(frozen=True)
class StepRecord:
    """One machine step, with everything needed to replay it."""
    index: int
    tag: str
    op: str                # Nil Rec Snd Rcv Out Inp Cnd Spn
    weight: int
    channel: Optional[str] = None  # queue key (Snd/Rcv) or channel name (Out/Inp)
    word: Optional[Word] = None    # string moved, if any


@dataclass(frozen=True)
class Candidate:
    tag: str
    op: str


class InputProvider:
    """Supplies words for external input channels, one at a time."""

    def peek(self, channel: str) -> Optional[Word]:
        raise NotImplementedError

    def take(self, channel: str) -> Word:
        raise NotImplementedError


class ScriptedInput(InputProvider):
    def __init__(self, words: Mapping[str, Sequence[Word]]):
        self.words = {ch: list(ws) for ch, ws in words.items()}
        self.pos = {ch: 0 for ch in self.words}

    def peek(self, channel):
        i = self.pos.get(channel, 0)
        ws = self.words.get(channel, [])
        return ws[i] if i < len(ws) else None

    def take(self, channel):
        w = self.peek(channel)
        if w is None:
            raise RuntimeError(f"input channel {channel!r} exhausted")
        self.pos[channel] += 1
        return w


class CallbackInput(InputProvider):
    """Asks ``ask(channel)`` for each word; caches the answer until taken.

    ``ask`` returns a word, or None for end of input on that channel.
    """

    def __init__(self, ask):
        self.ask = ask
        self.cache: dict = {}
        self.closed: set = set()

    def peek(self, channel):
        if channel in self.cache:
            return self.cache[channel]
        if channel in self.closed:
            return None
        w = self.ask(channel)
        if w is None:
            self.closed.add(channel)
            return None
        self.cache[channel] = w
        return w

    def take(self, channel):
        w = self.peek(channel)
        if w is None:
            raise RuntimeError(f"input channel {channel!r} exhausted")
        del self.cache[channel]
        return w


class MachineError(Exception):
    """An evaluation error surfaced while firing a rule."""

    def __init__(self, tag: str, cause: EvalError):
        super().__init__(f"processor {tag or 'root'!r}: {cause}")
        self.tag = tag
        self.cause = cause


def candidates(config: Config, provider: InputProvider) -> Iterator[Candidate]:
    """Rules that can fire now, in tag order.

    A Recv on an internal queue whose key fails to evaluate is still a
    candidate: firing it raises, which aborts the run (errors are not
    silently an excuse to block).
    """
    for tag in sorted(config.processors):
        state = config.processors[tag]
        p = state.proc
        if isinstance(p, Nil):
            yield Candidate(tag, "Nil")
        elif isinstance(p, Call):
            yield Candidate(tag, "Rec")
        elif isinstance(p, Send):
            yield Candidate(tag, "Snd" if isinstance(p.channel, Internal) else "Out")
        elif isinstance(p, Recv):
            if isinstance(p.channel, Internal):
                try:
                    key = eval_str(p.channel.key, state.env)
                except EvalError:
                    yield Candidate(tag, "Rcv")
                    continue
                if config.queues.get(key):
                    yield Candidate(tag, "Rcv")
            else:
                if provider.peek(p.channel.name) is not None:
                    yield Candidate(tag, "Inp")
        elif isinstance(p, Cond):
            yield Candidate(tag, "Cnd")
        elif isinstance(p, Par):
            yield Candidate(tag, "Spn")


def fire(config: Config, tag: str, program: Program, provider: InputProvider,
         index: int) -> StepRecord:
    """Fire the unique rule for processor ``tag``, mutating ``config``.

    Raises MachineError if expression evaluation fails, KeyError if there
    is no such processor, and RuntimeError if the rule is not enabled.
    """
    state = config.processors[tag]
    p = state.proc
    env = state.env
    try:
        if isinstance(p, Nil):
            del config.processors[tag]
            return StepRecord(index, tag, "Nil", 1)
        if isinstance(p, Call):
            d = program.defs[p.name]
            weight = 1 + sum(expr_time_cost(a) for a in p.args)
            values = [eval_str(a, env) for a in p.args]
            state.proc = d.body
            state.env = dict(zip(d.params, values))
            return StepRecord(index, tag, "Rec", weight)
        if isinstance(p, Send):
            if isinstance(p.channel, Internal):
                weight = (1 + expr_time_cost(p.value)
                          + expr_time_cost(p.channel.key))
                key = eval_str(p.channel.key, env)
                value = eval_str(p.value, env)
                config.queues.setdefault(key, []).append(value)
                state.proc = p.then
                return StepRecord(index, tag, "Snd", weight, channel=key,
                                  word=value)
            weight = 1 + expr_time_cost(p.value)
            value = eval_str(p.value, env)
            state.proc = p.then
            return StepRecord(index, tag, "Out", weight,
                              channel=p.channel.name, word=value)
        if isinstance(p, Recv):
            if isinstance(p.channel, Internal):
                key = eval_str(p.channel.key, env)
                queue = config.queues.get(key)
                if not queue:
                    raise RuntimeError(f"receive on empty queue {key!r}")
                word = queue.pop(0)
                if not queue:
                    del config.queues[key]
                weight = 1 + expr_time_cost(p.channel.key) + len(word)
                env[p.var] = word
                state.proc = p.then
                return StepRecord(index, tag, "Rcv", weight, channel=key,
                                  word=word)
            word = provider.take(p.channel.name)
            env[p.var] = word
            state.proc = p.then
            return StepRecord(index, tag, "Inp", 1 + len(word),
                              channel=p.channel.name, word=word)
        if isinstance(p, Cond):
            weight = 1 + expr_time_cost(p.test)
            branch = p.then if eval_bool(p.test, env) else p.els
            state.proc = branch
            return StepRecord(index, tag, "Cnd", weight)
        if isinstance(p, Par):
            weight = 1 + env_size(env)
            del config.processors[tag]
            config.processors[tag + "0"] = ProcState(p.left, dict(env), tag + "0")
            config.processors[tag + "1"] = ProcState(p.right, dict(env), tag + "1")
            return StepRecord(index, tag, "Spn", weight)
    except EvalError as exc:
        raise MachineError(tag, exc) from exc
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# schedulers

def fifo_tag_scheduler(cands: Sequence[Candidate], rng=None) -> Candidate:
    """Deterministic default: the candidate with the smallest tag
    (shorter tags first, then lexicographic)."""
    return min(cands, key=lambda c: (len(c.tag), c.tag))


class RandomScheduler:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def __call__(self, cands, rng=None):
        return self.rng.choice(list(cands))


# ---------------------------------------------------------------------------
# runs

@dataclass
class RunResult:
    status: str                 # 'quiescent', 'step-limit', 'error'
    records: list               # of StepRecord
    config: Config
    outputs: list               # of (channel, word), in emission order
    sizes: list                 # |C| after each step; sizes[0] is initial
    error: Optional[str] = None

    @property
    def total_weight(self) -> int:
        return sum(r.weight for r in self.records)

    def output_words(self, channel: str) -> list:
        return [w for ch, w in self.outputs if ch == channel]


def run(program: Program, provider: Optional[InputProvider] = None,
        scheduler=fifo_tag_scheduler, step_limit: int = 100000) -> RunResult:
    if provider is None:
        provider = ScriptedInput({})
    if scheduler is fifo_tag_scheduler:
        return _run_fifo(program, provider, step_limit)
    config = initial_config(program)
    records: list = []
    outputs: list = []
    sizes = [config.size()]
    while True:
        cands = list(candidates(config, provider))
        if not cands:
            return RunResult("quiescent", records, config, outputs, sizes)
        if len(records) >= step_limit:
            return RunResult("step-limit", records, config, outputs, sizes)
        chosen = scheduler(cands)
        try:
            rec = fire(config, chosen.tag, program, provider, len(records))
        except MachineError as exc:
            return RunResult("error", records, config, outputs, sizes,
                             error=str(exc))
        records.append(rec)
        sizes.append(config.size())
        if rec.op == "Out":
            outputs.append((rec.channel, rec.word))


def _run_fifo(program: Program, provider: InputProvider,
              step_limit: int) -> RunResult:
    """Default-scheduler run loop that avoids rescanning every processor.

    Enabled tags sit in a heap ordered like ``fifo_tag_scheduler``; blocked
    receivers are parked per queue key (or per input channel) and woken when
    a send lands.  Entries may go stale, so each pop revalidates.  The
    configuration size is tracked incrementally: a step changes only the
    firing processor's environment and at most one queue.
    """
    config = initial_config(program)
    records: list = []
    outputs: list = []
    size = config.size()
    sizes = [size]
    heap: list = []
    blocked_q: dict = {}   # queue key -> set of tags
    blocked_in: dict = {}  # input channel -> set of tags

    def poll(tag: str) -> bool:
        """True if enabled now; if blocked, park the tag for wake-up."""
        state = config.processors.get(tag)
        if state is None:
            return False
        p = state.proc
        if not isinstance(p, Recv):
            return True
        if isinstance(p.channel, Internal):
            try:
                key = eval_str(p.channel.key, state.env)
            except EvalError:
                return True  # firing will surface the error
            if config.queues.get(key):
                return True
            blocked_q.setdefault(key, set()).add(tag)
            return False
        if provider.peek(p.channel.name) is not None:
            return True
        blocked_in.setdefault(p.channel.name, set()).add(tag)
        return False

    def classify(tag: str) -> None:
        if poll(tag):
            heapq.heappush(heap, (len(tag), tag))

    classify("")
    while True:
        chosen = None
        while heap:
            _, tag = heapq.heappop(heap)
            if poll(tag):
                chosen = tag
                break
        if chosen is None:
            return RunResult("quiescent", records, config, outputs, sizes)
        if len(records) >= step_limit:
            return RunResult("step-limit", records, config, outputs, sizes)
        pre = env_size(config.processors[chosen].env)
        try:
            rec = fire(config, chosen, program, provider, len(records))
        except MachineError as exc:
            return RunResult("error", records, config, outputs, sizes,
                             error=str(exc))
        if rec.op == "Spn":
            post = (env_size(config.processors[chosen + "0"].env)
                    + env_size(config.processors[chosen + "1"].env))
            classify(chosen + "0")
            classify(chosen + "1")
        else:
            state = config.processors.get(chosen)
            post = env_size(state.env) if state is not None else 0
            classify(chosen)
        if rec.op == "Snd":
            size += len(rec.word)
            for tag in blocked_q.pop(rec.channel, ()):
                classify(tag)
        elif rec.op == "Rcv":
            size -= len(rec.word)
        size += post - pre
        records.append(rec)
        sizes.append(size)
        if rec.op == "Out":
            outputs.append((rec.channel, rec.word))


def replay(program: Program, records: Sequence[StepRecord]) -> list:
    """Re-execute ``records`` in the given order, returning |C| after each
    step (index 0 is the initial size).

    Input words are fed from the records themselves, so any order that
    respects the causal structure of the original run replays exactly.
    """
    feed: dict = {}
    for r in records:
        if r.op == "Inp":
            feed.setdefault(r.channel, []).append(r.word)
    provider = ScriptedInput(feed)
    config = initial_config(program)
    sizes = [config.size()]
    for i, r in enumerate(records):
        rec = fire(config, r.tag, program, provider, i)
        if rec.op != r.op:
            raise RuntimeError(
                f"replay mismatch at step {i}: expected {r.op}, fired {rec.op}")
        sizes.append(config.size())
    return sizes
