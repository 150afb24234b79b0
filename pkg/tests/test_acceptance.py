"""End-to-end acceptance checks for the whole toolchain.

Measured regression constants are exact rationals, frozen from a
reference run of this implementation; any drift in the machine's cost
accounting shows up as an inequality or equality failure here.
"""
import itertools
import random
from fractions import Fraction

import pytest

from procmach.behavior import (
    TAU, FiniteLts, bounded_weak_bisim, explore_lts, weak_bisim,
)
from procmach.causality import (
    build_causal_dag, cost_summary, dependent, output_events, space_cost,
    time_cost, oracle_time_cost,
)
from procmach.encoders import (
    encode_atm, encode_circuit, encode_pram, encode_ram, encode_rtm, encode_tm,
)
from procmach.encoders.wrappers import (
    offline_from_online, online_from_offline, serverize,
)
from procmach.machine import (
    RandomScheduler, ScriptedInput, candidates, fire, initial_config, replay,
    run,
)

from fixtures import (
    DIAMOND_SRCS, ECHO_SRC, OFFLINE_COUNT1_SRC, OFFLINE_DOUBLE_SRC,
    ONLINE_OFFLINE, add_ram, adder_circuit, adder_truth, andor_atm,
    andor_value, echo_pram, increment_tm, indirect_ram, palindrome_tm, parse,
    rtm3,
)
from genprog import gen_program
from oracles import eval_atm, eval_circuit, replay_costs, run_ram, run_tm, rtm_lts

# frozen regression constants (exact rationals measured on a reference run)
SLOWDOWN_INCREMENT = Fraction(409, 4)
SLOWDOWN_PALINDROME = Fraction(116)
SERVER_TIME_RATIO = Fraction(1105, 1087)
SERVER_SPACE_INCREMENT = 14
SERVER_SPACE_OVERHEAD = 9
WRAP_OFFLINE_TIME = Fraction(13)
WRAP_OFFLINE_SPACE = Fraction(4)
WRAP_ONLINE_TIME = Fraction(561, 41)
WRAP_ONLINE_SPACE = Fraction(77, 15)

GEN_SCRIPT = {"i": ["01", "1", ""]}


def all_words(max_len, min_len=0):
    for n in range(min_len, max_len + 1):
        for bits in itertools.product("01", repeat=n):
            yield "".join(bits)


def quiet_run(prog, script, limit=500_000):
    result = run(prog, ScriptedInput(script), step_limit=limit)
    assert result.status == "quiescent", result.status
    return result


def output_times(result):
    dag = build_causal_dag(result.records)
    return [time_cost(dag, i) for i in output_events(dag)]


# ---------------------------------------------------------------------------
# 1 + 2: Turing machine fidelity and constant slowdown

@pytest.fixture(scope="module", params=["increment", "palindrome"])
def tm_family(request):
    spec = {"increment": increment_tm, "palindrome": palindrome_tm}[request.param]()
    frozen = {"increment": SLOWDOWN_INCREMENT,
              "palindrome": SLOWDOWN_PALINDROME}[request.param]
    prog = encode_tm(spec)
    runs = {}
    for w in all_words(8):
        expect, steps = run_tm(spec, w, 100_000)
        result = run(prog, ScriptedInput({"i": [w]}), step_limit=500_000)
        runs[w] = (expect, steps, result)
    return spec, prog, frozen, runs


def test_tm_fidelity_all_short_words(tm_family):
    _, _, _, runs = tm_family
    for w, (expect, _, result) in runs.items():
        assert result.status == "quiescent", w
        got = result.output_words("o")
        assert got == ([] if expect is None else [expect]), w
        assert all(r.tag == "" for r in result.records), w


def test_tm_constant_slowdown(tm_family):
    _, _, frozen, runs = tm_family
    worst = {}
    for w, (expect, steps, result) in runs.items():
        if expect is None or not w:
            continue
        (t,) = output_times(result)
        n = len(w)
        worst[n] = max(worst.get(n, Fraction(0)), Fraction(t, steps))
    assert worst[1] == frozen
    assert all(worst[n] <= frozen for n in range(1, 9))


# ---------------------------------------------------------------------------
# 3: alternation compiles to causal parallelism

def test_atm_fidelity_all_depths():
    for depth in range(1, 5):
        spec = andor_atm(depth)
        prog = encode_atm(spec)
        for w in all_words(depth + 1, depth + 1):
            expect = eval_atm(spec, w, 1_000_000)
            assert expect == andor_value(depth, w), (depth, w)
            got = quiet_run(prog, {"i": [w]}).output_words("o")
            assert got == ["1" if expect else "0"], (depth, w)


def test_atm_depth4_parallel_structure():
    prog = encode_atm(andor_atm(4))
    result = quiet_run(prog, {"i": ["10110"]})
    dag = build_causal_dag(result.records)
    (out,) = output_events(dag)
    assert time_cost(dag, out) < result.total_weight / 2
    left = [i for i, r in enumerate(result.records) if r.tag.startswith("000")]
    right = [i for i, r in enumerate(result.records) if r.tag.startswith("001")]
    assert left and right
    for i in left[:40]:
        for j in right[:40]:
            assert not dag.below(i, j) and not dag.below(j, i)


# ---------------------------------------------------------------------------
# 4: critical-path time cost equals the brute-force chain maximum

def test_time_cost_equals_chain_oracle():
    rng = random.Random(20260826)
    checked = 0
    while checked < 200:
        prog = gen_program(rng)
        result = run(prog, ScriptedInput(GEN_SCRIPT), step_limit=60)
        if result.status != "quiescent" or not (1 <= len(result.records) <= 12):
            continue
        dag = build_causal_dag(result.records)
        for i in range(len(result.records)):
            assert time_cost(dag, i) == oracle_time_cost(dag, i)
        checked += 1


# ---------------------------------------------------------------------------
# 5: space cost ranges over the linearizations of the downset

def linear_extensions(records, down):
    downset = set(down)
    preds = {j: [k for k in down if k < j and dependent(records[k], records[j])]
             for j in down}
    order, placed = [], set()

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


def test_space_cost_exact_is_linearization_maximum():
    rng = random.Random(5150)
    checked = 0
    while checked < 40:
        prog = gen_program(rng)
        result = run(prog, ScriptedInput(GEN_SCRIPT), step_limit=30)
        if result.status != "quiescent" or not (1 <= len(result.records) <= 8):
            continue
        dag = build_causal_dag(result.records)
        total_order = all(
            dag.below(i, j) for i in range(len(result.records))
            for j in range(i, len(result.records)))
        for i in range(len(result.records)):
            down = dag.downset(i)
            brute = max(
                max(replay(prog, [result.records[j] for j in order]))
                for order in linear_extensions(result.records, down))
            exact = space_cost(prog, dag, i, "exact", exact_limit=8)
            observed = space_cost(prog, dag, i, "observed")
            assert exact == brute
            assert observed <= exact
            if total_order:
                assert observed == exact
        checked += 1


# ---------------------------------------------------------------------------
# 6: determinism, forward diamond, and backward triangle on state graphs

def _record_key(rec):
    return (rec.tag, rec.op, rec.weight, rec.channel, rec.word)


class _Graph:
    def __init__(self, program, script):
        self.program = program
        self.script = script

    def provider(self, pos):
        return ScriptedInput({ch: ws[pos.get(ch, 0):]
                              for ch, ws in self.script.items()})

    def enabled(self, config, pos):
        """record key -> (successor config, successor positions)."""
        out = {}
        for c in candidates(config.copy(), self.provider(pos)):
            succ = config.copy()
            rec = fire(succ, c.tag, self.program, self.provider(pos), 0)
            pos2 = dict(pos)
            if rec.op == "Inp":
                pos2[rec.channel] = pos2.get(rec.channel, 0) + 1
            key = _record_key(rec)
            assert key not in out, f"two transitions with event {key}"
            out[key] = (succ, pos2)
        return out

    @staticmethod
    def freeze(config, pos):
        procs = tuple(sorted(
            ((t, st.proc, tuple(sorted(st.env.items())))
             for t, st in config.processors.items()), key=lambda x: x[0]))
        queues = tuple(sorted((k, tuple(q))
                              for k, q in config.queues.items() if q))
        return procs, queues, tuple(sorted(pos.items()))


def check_diamond_axioms(program, script, state_limit=10_000):
    g = _Graph(program, script)
    init = (initial_config(program), {})
    seen = {g.freeze(*init)}
    frontier = [init]
    states = 0
    while frontier:
        config, pos = frontier.pop()
        states += 1
        assert states <= state_limit, "state space too large for this check"
        moves = g.enabled(config, pos)
        for k1, (s1, pos1) in moves.items():
            f1 = g.freeze(s1, pos1)
            if f1 not in seen:
                seen.add(f1)
                frontier.append((s1, pos1))
            moves1 = g.enabled(s1, pos1)
            # forward diamond: an independent co-enabled event survives
            for k2 in moves:
                if k2 == k1 or dependent(_rec(k1), _rec(k2)):
                    continue
                assert k2 in moves1, (k1, k2)
            # backward triangle: an independent event enabled after k1
            # was already enabled before it, and the two orders commute
            for k2, (s12, pos12) in moves1.items():
                if dependent(_rec(k1), _rec(k2)):
                    continue
                assert k2 in moves, (k1, k2)
                s2, pos2 = moves[k2]
                moves2 = g.enabled(s2, pos2)
                assert k1 in moves2, (k1, k2)
                s21, pos21 = moves2[k1]
                assert g.freeze(s12, pos12) == g.freeze(s21, pos21), (k1, k2)
    return states


def _rec(key):
    from procmach.machine import StepRecord
    tag, op, weight, channel, word = key
    return StepRecord(0, tag, op, weight, channel=channel, word=word)


def diamond_fixtures():
    progs = [(src, parse(src)) for src in DIAMOND_SRCS]
    rng = random.Random(314159)
    while len(progs) < 20:
        prog = gen_program(rng)
        result = run(prog, ScriptedInput(GEN_SCRIPT), step_limit=80)
        if result.status != "quiescent":
            continue
        if not any(r.op == "Spn" for r in result.records):
            continue
        progs.append((f"generated {len(progs)}", prog))
    return progs


@pytest.mark.parametrize("case", range(20))
def test_diamond_axioms(case):
    name, prog = diamond_fixtures()[case]
    check_diamond_axioms(prog, GEN_SCRIPT)


# ---------------------------------------------------------------------------
# 7: function tables coincide exactly when their behaviors do

DOMAIN = ["", "0", "1", "00", "01", "10", "11"]


def test_functional_behavior_separates_tables():
    from procmach.behavior import functional_lts
    tables = [dict(zip(DOMAIN, values))
              for values in itertools.product(["", "0"], repeat=len(DOMAIN))]
    ltss = [functional_lts(t) for t in tables]
    for a in range(len(tables)):
        for b in range(len(tables)):
            v = weak_bisim(ltss[a], ltss[b], divergence_sensitive=True)
            assert v.conclusive
            assert v.equivalent == (tables[a] == tables[b]), (a, b)


def test_functional_behavior_separates_richer_tables():
    from procmach.behavior import functional_lts
    rng = random.Random(77)
    for _ in range(150):
        ta = {w: rng.choice(DOMAIN) for w in DOMAIN}
        tb = dict(ta)
        if rng.random() < 0.5:
            w = rng.choice(DOMAIN)
            tb[w] = rng.choice([v for v in DOMAIN if v != tb[w]])
        v = weak_bisim(functional_lts(ta), functional_lts(tb),
                       divergence_sensitive=True)
        assert v.equivalent == (ta == tb)


def test_tau_loop_versus_deadlock():
    loop = FiniteLts(0, {0}, {0: [(TAU, 0)]})
    dead = FiniteLts(0, {0}, {0: []})
    assert weak_bisim(loop, dead).equivalent
    assert not weak_bisim(loop, dead, divergence_sensitive=True).equivalent


# ---------------------------------------------------------------------------
# 8: scheduling nondeterminism is invisible for functional programs

@pytest.mark.parametrize("src_or_prog", [
    ECHO_SRC, OFFLINE_DOUBLE_SRC, OFFLINE_COUNT1_SRC, "tm"])
def test_schedule_independence(src_or_prog):
    prog = (encode_tm(increment_tm()) if src_or_prog == "tm"
            else parse(src_or_prog))
    script = {"i": ["0100"]}
    reference = quiet_run(prog, script)
    for seed in range(100):
        result = run(prog, ScriptedInput(script), RandomScheduler(seed),
                     step_limit=500_000)
        assert result.status == "quiescent"
        assert result.outputs == reference.outputs


# ---------------------------------------------------------------------------
# 9: serverization answers every request at a constant extra price

def test_server_three_requests():
    spec = increment_tm()
    base = encode_tm(spec)
    server = serverize(base)
    requests = ["0101", "0001", "0100"]
    expected = [run_tm(spec, s, 100_000)[0] for s in requests]
    assert all(e is not None for e in expected)
    result = quiet_run(server, {"i": requests})
    assert result.output_words("o") == expected

    alone = []
    for s in requests:
        (t,) = output_times(quiet_run(base, {"i": [s]}))
        alone.append(t)
    summary = cost_summary(server, result.records)
    times = [c.time for c in summary]
    spaces = [c.space for c in summary]

    worst = Fraction(0)
    storage = 0
    for k, s in enumerate(requests):
        storage += 1 + len(s)
        worst = max(worst, Fraction(times[k], alone[k] + storage))
    assert worst == SERVER_TIME_RATIO

    for k, s in enumerate(requests):
        if k:
            assert spaces[k] - spaces[k - 1] == SERVER_SPACE_INCREMENT
            assert (spaces[k] - spaces[k - 1]
                    == (1 + len(requests[k])) + SERVER_SPACE_OVERHEAD)


# ---------------------------------------------------------------------------
# 10: online and offline presentations convert at a measured price

def test_online_offline_wrappers():
    worst_off_t = worst_off_s = worst_on_t = worst_on_s = Fraction(0)
    for off_src, on_src, h in ONLINE_OFFLINE:
        off, on = parse(off_src), parse(on_src)
        wrapped_off = offline_from_online(on)
        wrapped_on = online_from_offline(off)
        for s in all_words(4):
            n = len(s)
            enc = ["" if b == "0" else "1" for b in s]

            on_costs = cost_summary(on, quiet_run(on, {"i": enc}).records)
            off_costs = [cost_summary(
                off, quiet_run(off, {"i": [s[:j]]}).records)[0]
                for j in range(n + 1)]

            woff = quiet_run(wrapped_off, {"i": [s]})
            assert woff.output_words("o") == [h(s)]
            (wc,) = cost_summary(wrapped_off, woff.records)
            t_bound = sum(c.time for c in on_costs) + 2 * n + 1
            s_bound = max(c.space for c in on_costs) + (n + 1)
            worst_off_t = max(worst_off_t, Fraction(wc.time, t_bound))
            worst_off_s = max(worst_off_s, Fraction(wc.space, s_bound))

            won = quiet_run(wrapped_on, {"i": enc})
            outs = won.output_words("o")
            assert len(outs) == n + 1
            for k in range(n + 1):
                assert "".join(outs[:k + 1]) == h(s[:k])
            for k, wc in enumerate(cost_summary(wrapped_on, won.records)):
                t_bound = 1 + sum((j + 1) + off_costs[j].time
                                  for j in range(k + 1))
                s_bound = (off_costs[k].space + (len(h(s[:k])) + 1) + (k + 1))
                worst_on_t = max(worst_on_t, Fraction(wc.time, t_bound))
                worst_on_s = max(worst_on_s, Fraction(wc.space, s_bound))
    assert worst_off_t == WRAP_OFFLINE_TIME
    assert worst_off_s == WRAP_OFFLINE_SPACE
    assert worst_on_t == WRAP_ONLINE_TIME
    assert worst_on_s == WRAP_ONLINE_SPACE


# ---------------------------------------------------------------------------
# 11: RAM, PRAM, and circuit compilers

def test_ram_addition_all_small_operands():
    for b in range(7):
        ram = add_ram(b)
        prog = encode_ram(ram)
        for a in range(7):
            w = "0" * a
            expect = run_ram(ram, w)
            assert expect == "0" * (a + b)
            assert quiet_run(prog, {"i": [w]}).output_words("o") == [expect]
    ram = indirect_ram()
    prog = encode_ram(ram)
    for w in ["", "0", "000"]:
        assert quiet_run(prog, {"i": [w]}).output_words("o") == [run_ram(ram, w)]


def test_pram_echo_under_clock():
    prog = encode_pram(echo_pram())
    result = quiet_run(prog, {"i1": ["0"], "i2": ["0000"]})
    assert result.output_words("o1") == ["0"]
    assert result.output_words("o2") == ["0000"]


def test_circuit_adder_truth_table():
    spec = adder_circuit()
    prog = encode_circuit(spec)
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        bits = [a0, 1 - a0, a1, 1 - a1, b0, 1 - b0, b1, 1 - b1]
        script = {f"i{k + 1}": [str(v)] for k, v in enumerate(bits)}
        result = quiet_run(prog, script)
        got = tuple(int(result.output_words(f"o{k + 1}")[0]) for k in range(3))
        assert got == adder_truth(a0, a1, b0, b1)
        assert list(got) == eval_circuit(spec, bits)


# ---------------------------------------------------------------------------
# 12: reactive TM encoding is weakly bisimilar to the direct semantics

def test_rtm_weak_bisimilarity_bounded():
    spec = rtm3()
    prog = encode_rtm(spec)
    lts = explore_lts(prog, [], state_limit=20_000, visible_depth=5)
    v = bounded_weak_bisim(lts, rtm_lts(spec, 6), 4)
    assert v.equivalent and v.conclusive


# ---------------------------------------------------------------------------
# 13: every recorded weight and size survives independent recomputation

def test_weights_and_sizes_recomputed_independently():
    rng = random.Random(987654321)
    for _ in range(500):
        prog = gen_program(rng)
        result = run(prog, ScriptedInput(GEN_SCRIPT), step_limit=200)
        weights, sizes = replay_costs(prog, result.records)
        assert weights == [r.weight for r in result.records]
        assert sizes == result.sizes
