"""Command line: ``gik solve``, ``gik bench`` and ``gik generate``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bench import plan, read_csv, run_bench, write_csv
from .errors import BudgetExceeded, GikError
from .generate import FAMILIES, generate
from .instance import format_fraction
from .io import dumps_instance, load_instance
from .runner import ALGORITHMS, run_algorithm

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _default_budget() -> int | None:
    raw = os.environ.get("GIK_BUDGET_MS")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise GikError(f"GIK_BUDGET_MS must be an integer, got {raw!r}") from None


def _split(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _sizes(text: str, periods: int) -> list[tuple[int, int]]:
    out = []
    for tok in _split(text):
        n, _, T = tok.partition("x")
        try:
            out.append((int(n), int(T) if T else periods))
        except ValueError:
            raise GikError(f"bad size {tok!r}; use N or NxT") from None
    return out


def _params(pairs: list[str]) -> dict:
    out = {}
    for p in pairs:
        key, sep, value = p.partition("=")
        if not sep:
            raise GikError(f"bad parameter {p!r}; use key=value")
        out[key] = value
    return out


def cmd_solve(args) -> int:
    budget = args.budget_ms if args.budget_ms is not None else _default_budget()
    inst = load_instance(args.input)
    run = run_algorithm(inst, args.algorithm, args.epsilon, budget)
    print(json.dumps({
        "algorithm": args.algorithm,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "chain": run.chain.to_lists(),
        "profit": format_fraction(run.profit),
        "certified": run.certified,
        "wall_ms": run.wall_ms,
    }))
    if not run.certified:
        print("budget exhausted; returning the best chain found so far", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_bench(args) -> int:
    budget = args.budget_ms if args.budget_ms is not None else _default_budget()
    tasks = plan(_split(args.families), _sizes(args.sizes, args.periods), _split(args.epsilons),
                 args.seeds, _split(args.algorithms), budget)
    records = run_bench(tasks, jobs=args.jobs)
    if args.out == "-":
        write_csv(records, sys.stdout, float_view=args.float_view)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(records, fh, float_view=args.float_view)
        read_csv(args.out)  # fail loudly if the file does not parse back
    if any(not r.certified for r in records):
        print("some runs exhausted their budget", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def cmd_generate(args) -> int:
    params = _params(args.param)
    for key in ("max_weight", "max_profit", "spread", "gap"):
        if key in params:
            params[key] = int(params[key])
    text = dumps_instance(generate(args.seed, args.family, args.n, args.T, params))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gik", description="Generalized incremental knapsack solvers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one instance file")
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--epsilon", help="rational tolerance, e.g. 1/4")
    p.add_argument("--input", required=True, help="instance JSON file")
    p.add_argument("--budget-ms", type=int, help="wall-clock budget (default $GIK_BUDGET_MS)")
    p.add_argument("--seed", type=int, default=0, help="echoed in the output; solvers are deterministic")
    p.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="sweep generated instances and write a CSV table")
    b.add_argument("--families", default="uniform", help=f"comma list from {', '.join(FAMILIES)}")
    b.add_argument("--sizes", default="4", help="comma list of N or NxT")
    b.add_argument("--periods", type=int, default=2, help="T for sizes given without x")
    b.add_argument("--epsilons", default="1/4")
    b.add_argument("--seeds", type=int, default=10, help="seeds 0..N-1")
    b.add_argument("--algorithms", default="exact,half")
    b.add_argument("--budget-ms", type=int)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--float-view", action="store_true", help="add approximate decimal columns")
    b.add_argument("--out", required=True, help="CSV path, or - for stdout")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("generate", help="write a seeded instance as JSON")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--T", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--param", action="append", default=[], help="key=value, repeatable")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        # only reachable if a solver escapes run_algorithm's handling
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GikError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
