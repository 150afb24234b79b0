"""Command-line interface.

Subcommands:

- ``run``      execute a program on a script (or interactively)
- ``report``   per-output cost report for a run
- ``check``    bound checking over a directory of scripts
- ``encode``   compile a machine description to a process program
- ``compare``  behavioral comparison of programs and function tables
- ``explore``  dump an explored transition-system fragment

Exit codes: 0 success, 1 check/comparison failed, 2 parse error,
3 runtime error, 4 step limit hit, 5 inconclusive comparison.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .behavior import TAU, explore_lts, functional_lts, weak_bisim
from .complexity import (
    BoundSyntaxError, class_evidence, cost_report, parse_bound, render_report,
    render_verdict, works_in,
)
from .formats import (
    FormatError, parse_atm, parse_circuit, parse_funtable, parse_pram,
    parse_ram, parse_rtm, parse_script, parse_tm,
)
from .machine import CallbackInput, RandomScheduler, ScriptedInput, fifo_tag_scheduler, run
from .parser import ParseError, SemanticError, parse_program
from .syntax import EvalError, show_program

OK, FAIL, EPARSE, ERUN, ESTEPS, EINCONCLUSIVE = 0, 1, 2, 3, 4, 5

ENCODERS = {}


def _load_encoders():
    from .encoders import (
        encode_atm, encode_circuit, encode_pram, encode_ram, encode_rtm,
        encode_tm,
    )
    ENCODERS.update({
        "tm": (parse_tm, encode_tm),
        "atm": (parse_atm, encode_atm),
        "ram": (parse_ram, encode_ram),
        "pram": (parse_pram, encode_pram),
        "circuit": (parse_circuit, encode_circuit),
        "rtm": (parse_rtm, encode_rtm),
    })


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_program(path: str):
    return parse_program(_read(path))


def _provider(args):
    if getattr(args, "interactive", False):
        def ask(channel):
            try:
                line = input(f"{channel}? ").strip()
            except EOFError:
                return None
            if line in ("", "end"):
                return None
            return "" if line == '""' else line
        return CallbackInput(ask)
    if getattr(args, "script", None):
        return ScriptedInput(parse_script(_read(args.script)))
    return ScriptedInput({})


def _scheduler(args):
    if getattr(args, "scheduler", "fifo") == "random":
        return RandomScheduler(getattr(args, "seed", 0) or 0)
    return fifo_tag_scheduler


def _run(args):
    prog = _load_program(args.program)
    result = run(prog, _provider(args), _scheduler(args),
                 step_limit=args.step_limit)
    return prog, result


def cmd_run(args):
    prog, result = _run(args)
    for ch, w in result.outputs:
        print(f'out {ch} "{w}"')
    print(f"status {result.status} steps={len(result.records)}"
          f" weight={result.total_weight}")
    if result.status == "error":
        print(result.error, file=sys.stderr)
        return ERUN
    if result.status == "step-limit":
        return ESTEPS
    return OK


def cmd_report(args):
    prog, result = _run(args)
    if result.status == "error":
        print(result.error, file=sys.stderr)
        return ERUN
    report = cost_report(prog, result, args.space, args.exact_limit)
    verdict = None
    if args.time or args.space_bound:
        f = parse_bound(args.time or "n^9")
        g = parse_bound(args.space_bound or "n^9")
        verdict = works_in(report, f, g)
    sys.stdout.write(render_report(report, verdict))
    if result.status == "step-limit":
        return ESTEPS
    if verdict is not None and not verdict:
        return FAIL
    return OK


def cmd_check(args):
    prog = _load_program(args.program)
    scripts = []
    for name in sorted(os.listdir(args.suite)):
        if name.endswith(".in"):
            scripts.append(parse_script(_read(os.path.join(args.suite, name))))
    if not scripts:
        print("no *.in scripts in suite directory", file=sys.stderr)
        return EPARSE
    verdict = class_evidence(prog, scripts, parse_bound(args.time),
                             parse_bound(args.space_bound),
                             space_mode=args.space,
                             exact_limit=args.exact_limit,
                             step_limit=args.step_limit)
    print(f"checked {len(scripts)} scripts (evidence on these inputs only)")
    print(render_verdict(verdict))
    return OK if verdict else FAIL


def cmd_encode(args):
    _load_encoders()
    parse_fn, encode_fn = ENCODERS[args.kind]
    prog = encode_fn(parse_fn(_read(args.spec)))
    text = show_program(prog)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def _lts_for(path: str, words, state_limit: int):
    if path.endswith(".fun"):
        return functional_lts(parse_funtable(_read(path))), None
    prog = _load_program(path)
    return explore_lts(prog, words, state_limit), prog


def cmd_compare(args):
    words = [("" if w == '""' else w) for w in (args.inputs or [])]
    a, _ = _lts_for(args.a, words, args.state_limit)
    b, _ = _lts_for(args.b, words, args.state_limit)
    verdict = weak_bisim(a, b, divergence_sensitive=args.div_sensitive)
    kind = "divergence-sensitive weak" if args.div_sensitive else "weak"
    if verdict.equivalent and not verdict.conclusive:
        print(f"inconclusive: equivalent on truncated fragments ({kind})")
        return EINCONCLUSIVE
    print(f"{'equivalent' if verdict.equivalent else 'not equivalent'} ({kind})")
    if not verdict.equivalent:
        s, t, reason = verdict.witness
        print(f"distinguished at {s!r} vs {t!r}: {reason}")
    return OK if verdict.equivalent else FAIL


def cmd_explore(args):
    prog = _load_program(args.program)
    words = [("" if w == '""' else w) for w in (args.inputs or [])]
    lts = explore_lts(prog, words, args.state_limit)
    index = {s: k for k, s in enumerate(sorted(lts.states, key=repr))}
    print(f"states {len(lts.states)} truncated {len(lts.truncated)}")
    print(f"init {index[lts.init]}")
    for s in sorted(lts.states, key=repr):
        for label, t in lts.moves(s):
            name = "tau" if label == TAU else f"{label[0]} {label[1]} \"{label[2]}\""
            print(f"{index[s]} --{name}--> {index[t]}")
    return OK


def build_parser():
    top = argparse.ArgumentParser(
        prog="procmach",
        description="virtual machine and analysis tools for process programs")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common_run(p):
        p.add_argument("program")
        p.add_argument("--script", help="input script file")
        p.add_argument("--interactive", action="store_true")
        p.add_argument("--scheduler", choices=["fifo", "random"], default="fifo")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--step-limit", type=int, default=100000)

    p = sub.add_parser("run", help="execute a program")
    common_run(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("report", help="per-output cost report")
    common_run(p)
    p.add_argument("--space", choices=["observed", "exact"], default="observed")
    p.add_argument("--exact-limit", type=int,
                   default=int(os.environ.get("PROCMACH_EXACT_LIMIT", "9")))
    p.add_argument("--time", help="time bound over n")
    p.add_argument("--space-bound", help="space bound over n")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("check", help="bound check over a script suite")
    p.add_argument("program")
    p.add_argument("suite", help="directory of *.in scripts")
    p.add_argument("--time", required=True)
    p.add_argument("--space-bound", required=True)
    p.add_argument("--space", choices=["observed", "exact"], default="observed")
    p.add_argument("--exact-limit", type=int,
                   default=int(os.environ.get("PROCMACH_EXACT_LIMIT", "9")))
    p.add_argument("--step-limit", type=int, default=100000)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("encode", help="compile a machine description")
    p.add_argument("--kind", required=True,
                   choices=["tm", "atm", "ram", "pram", "circuit", "rtm"])
    p.add_argument("spec")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("compare", help="compare two behaviors")
    p.add_argument("a", help="program file or function table (*.fun)")
    p.add_argument("b", help="program file or function table (*.fun)")
    p.add_argument("--inputs", nargs="*", default=[])
    p.add_argument("--state-limit", type=int, default=5000)
    p.add_argument("--div-sensitive", action="store_true")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("explore", help="dump an explored LTS fragment")
    p.add_argument("program")
    p.add_argument("--inputs", nargs="*", default=[])
    p.add_argument("--state-limit", type=int, default=5000)
    p.set_defaults(fn=cmd_explore)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, SemanticError, FormatError, BoundSyntaxError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EPARSE
    except (EvalError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERUN


if __name__ == "__main__":
    sys.exit(main())
