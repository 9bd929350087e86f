"""Command-line front end: ``milkit solve|validate|bench``."""
from __future__ import annotations

import argparse
import json
import sys

from .bk import BkBase
from .core.model import MilError
from .core.syntax import (
    ParseError,
    metagol_names,
    parse_hypothesis,
    parse_problem,
    print_hypothesis,
)
from .core.terms import format_atom

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_TIMEOUT = 2
EXIT_PARSE = 3
EXIT_ERROR = 4

STRATEGIES = ("auto", "general", "fc", "sa", "baseline")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _stats_line(d: dict) -> str:
    return " ".join(f"{k}={int(v) if isinstance(v, bool) else v}" for k, v in d.items())


def pick_strategy(problem, strategy: str) -> str:
    if strategy != "auto":
        return strategy
    return "fc" if problem.is_forward_chained() and not problem.rules else "general"


def cmd_solve(args) -> int:
    from .solver import solve

    try:
        problem = parse_problem(_read(args.problem))
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    strategy = pick_strategy(problem, args.strategy)
    res = solve(problem, strategy, max_n=args.max_size, max_skolems=args.max_skolems,
                timeout=args.timeout, seq_max_len=args.seq_max_len,
                seq_max_count=args.seq_max_count)
    names = metagol_names(res.hypothesis, problem) if res.solved and args.names == "metagol" else None
    text = print_hypothesis(res.hypothesis, problem, names) if res.solved else ""
    stats = {"strategy": strategy, "status": res.status, "n": res.n, "k": res.k}
    stats.update(res.stats.as_dict())
    if args.timing:
        stats["time_s"] = f"{res.time_s:.3f}"
    if args.output == "json-lines":
        row = {"status": res.status, "n": res.n, "k": res.k,
               "rules": text.splitlines(), "message": res.message, "stats": stats}
        print(json.dumps(row, sort_keys=True))
    elif res.solved:
        sys.stdout.write(text)
    else:
        print(res.message or res.status)
    print(_stats_line(stats), file=sys.stderr)
    if res.solved:
        return EXIT_OK
    if res.status == "unsat":
        return EXIT_NO_SOLUTION
    if res.status == "timeout":
        return EXIT_TIMEOUT
    print(f"error: {res.message}", file=sys.stderr)
    return EXIT_ERROR


def cmd_validate(args) -> int:
    from .solver import validate

    try:
        problem = parse_problem(_read(args.problem))
        hyp = parse_hypothesis(_read(args.hypothesis), problem)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    strategy = None if args.strategy == "auto" else args.strategy
    try:
        report = validate(problem, hyp, BkBase.from_problem(problem), strategy)
    except MilError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    lines = []
    for kind, atom, derived in report["examples"]:
        ok = derived if kind == "pos" else not derived
        lines.append(f"{kind} {format_atom(atom)} {'entailed' if derived else 'not entailed'}"
                     f" {'ok' if ok else 'FAIL'}")
    for sub, productive, ordered in report["rules"]:
        lines.append(f"rule {sub.rule_id}({','.join(sub.preds)}) "
                     f"productive={'yes' if productive else 'no'} "
                     f"ordered={'yes' if ordered else 'no'}")
    reasons = [f"{why} {format_atom(atom)}" for why, atom in report["violations"]]
    reasons += [f"unproductive rule {sub.rule_id}({','.join(sub.preds)})"
                for sub, productive, _ in report["rules"] if not productive]
    if args.output == "json-lines":
        print(json.dumps({"valid": report["valid"], "ordered": report["ordered"],
                          "reasons": reasons, "details": lines}, sort_keys=True))
    else:
        for line in lines:
            print(line)
        if report["valid"]:
            print("valid")
        else:
            print("invalid: " + "; ".join(reasons))
    return EXIT_OK if report["valid"] else EXIT_NO_SOLUTION


def cmd_bench(args) -> int:
    from .bench import BenchConfig, format_summary, run_suite, summarize, to_csv

    sizes = [int(s) for s in args.sizes.split(",") if s]
    strategies = [s for s in args.strategies.split(",") if s]
    for s in strategies:
        if s not in STRATEGIES[1:]:
            print(f"error: unknown strategy {s!r}", file=sys.stderr)
            return EXIT_ERROR
    cfg = BenchConfig(family=args.family, sizes=sizes, instances=args.instances,
                      seed=args.seed, strategies=strategies, timeout=args.timeout,
                      max_n=args.max_size, max_skolems=args.max_skolems,
                      timing=args.timing)
    try:
        rows = run_suite(cfg)
    except MilError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_ERROR
    csv_text = to_csv(rows)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    if rows:
        sys.stderr.write(format_summary(summarize(rows), args.timing))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="milkit", description="Meta-interpretive learning engine.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--strategy", choices=STRATEGIES, default="auto")
        p.add_argument("--max-size", type=int, default=8)
        p.add_argument("--max-skolems", type=int, default=3)
        p.add_argument("--timeout", type=float, default=600.0)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--seq-max-len", type=int, default=64)
        p.add_argument("--seq-max-count", type=int, default=256)
        p.add_argument("--output", choices=("text", "json-lines"), default="text")
        p.add_argument("--no-timing", dest="timing", action="store_false",
                       help="omit wall-clock times so output is reproducible")

    p = sub.add_parser("solve", help="learn a minimal hypothesis for a problem file")
    p.add_argument("problem")
    p.add_argument("--names", choices=("skolem", "metagol"), default="skolem",
                   help="display invented predicates as p1.. or <target>_1..")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a hypothesis file against a problem file")
    p.add_argument("problem")
    p.add_argument("hypothesis")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="run a benchmark family and print CSV rows")
    p.add_argument("--family", choices=("b1", "b2", "b3"), required=True)
    p.add_argument("--sizes", required=True, help="comma-separated sizes")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--strategies", default="fc,sa,baseline")
    p.add_argument("--csv", help="write CSV here instead of stdout")
    common(p)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
