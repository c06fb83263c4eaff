"""Command-line entry point: ``htnplan plan|validate|bench``.

Exit codes: 0 success, 1 no plan found / invalid plan / failed cell,
2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

from .bench.runner import load_suite, run_benchmark
from .bench.validate import validate_plan
from .parser import ParseError, format_plan, parse_domain, parse_plan, parse_problem
from .planner import PlannerOptions, PlanningError, SearchTimeout, plan

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="htnplan", description="HTN planner with task interaction")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("plan", help="search for plans")
    pl.add_argument("domain")
    pl.add_argument("problem")
    pl.add_argument("--mode", choices=["baseline", "enhanced"], default="enhanced")
    quota = pl.add_mutually_exclusive_group()
    quota.add_argument("--max-plans", type=int, default=1, metavar="N")
    quota.add_argument("--all", action="store_true", help="enumerate every plan")
    pl.add_argument("--max-depth", type=int, default=10000, metavar="N")
    pl.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    pl.add_argument("--stats", action="store_true", help="report search statistics")
    pl.add_argument("--output", choices=["text", "json"], default="text")

    va = sub.add_parser("validate", help="check a plan file against a problem")
    va.add_argument("domain")
    va.add_argument("problem")
    va.add_argument("plan_file")

    be = sub.add_parser("bench", help="run a benchmark suite")
    be.add_argument("suite")
    return p


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load(domain_path: str, problem_path: str):
    return parse_domain(_read(domain_path)), parse_problem(_read(problem_path))


def cmd_plan(args) -> int:
    if args.max_plans is not None and args.max_plans < 1:
        print("htnplan: --max-plans must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    domain, problem = _load(args.domain, args.problem)
    options = PlannerOptions(mode=args.mode, max_plans=None if args.all else args.max_plans,
                             max_depth=args.max_depth, time_limit=args.time_limit)
    search = plan(problem, domain, options)
    plans = []
    timed_out = False
    try:
        for p in search:
            plans.append(p)
    except SearchTimeout as exc:
        timed_out = True
        print(f"htnplan: {exc}", file=sys.stderr)
    if args.output == "json":
        out = {"problem": problem.name, "mode": options.mode.value,
               "plans": [[str(s) for s in p] for p in plans]}
        if args.stats:
            out["stats"] = asdict(search.stats)
            out["timed_out"] = timed_out
        print(json.dumps(out, indent=2))
    else:
        for i, p in enumerate(plans):
            if i:
                print()
            print(f"; plan {i + 1} ({len(p)} steps)")
            sys.stdout.write(format_plan(p))
        if not plans:
            print("; no plan found")
        if args.stats:
            for key, value in asdict(search.stats).items():
                print(f"; {key} = {value}")
    return EXIT_OK if plans else EXIT_FAIL


def cmd_validate(args) -> int:
    domain, problem = _load(args.domain, args.problem)
    report = validate_plan(domain, problem, parse_plan(_read(args.plan_file)))
    if report.valid:
        print("valid")
        return EXIT_OK
    print(f"invalid at step {report.failing_step}: {report.reason}")
    return EXIT_FAIL


def cmd_bench(args) -> int:
    config = load_suite(args.suite)
    results = run_benchmark(config)
    ok = True
    for r in results:
        print(f"{r.problem_name:<20} {r.mode:<9} quota={r.plans_requested!s:<5} "
              f"found={r.plans_found:<6} status={r.status:<9} valid={r.all_valid} "
              f"time={r.stats['wall_time']:.3f}s")
        ok = ok and r.all_valid
    if config.output is not None:
        print(f"results written to {config.output}")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"plan": cmd_plan, "validate": cmd_validate, "bench": cmd_bench}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"htnplan: parse error: {exc}", file=sys.stderr)
    except (OSError, ValueError, PlanningError) as exc:
        print(f"htnplan: {exc}", file=sys.stderr)
    except KeyError as exc:
        print(f"htnplan: missing key {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
