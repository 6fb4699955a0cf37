"""Command line front end.

Exit codes: 0 success, 1 infeasible instance (or infeasible solution for
``check``), 2 malformed input, 3 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, InfeasibleError, InstanceError, ParseError
from .generate import GenSpec, gen_random
from .io import parse_instance, parse_solution, serialize_instance, write_report, write_solution
from .model import cost, embedding_problems, path_lengths, validate_instance, violations
from .oracle import OracleBudget, brute_force_optimum
from .render import render_svg
from .scaling import Mode, SolveConfig, solve

EXIT_OK, EXIT_INFEASIBLE, EXIT_MALFORMED, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("toposteiner")


def _b(flag: bool) -> str:
    return "true" if flag else "false"


def _load(path: str):
    return parse_instance(Path(path).read_bytes())


def _emit(data: bytes, dest: str | None) -> None:
    if dest is None or dest == "-":
        sys.stdout.write(data.decode("utf-8"))
    else:
        Path(dest).write_bytes(data)


def cmd_validate(args) -> int:
    inst = _load(args.file)
    report = validate_instance(inst)
    print(f"ok={_b(report.ok)} feasible={_b(report.feasible)}")
    for line in report.messages():
        print(f"  {line}")
    if not report.ok:
        return EXIT_MALFORMED
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_solve(args) -> int:
    inst = _load(args.file)
    config = SolveConfig(mode=Mode(args.mode), max_rounds_per_level=args.max_rounds)
    started = time.perf_counter()
    report = solve(inst, config)
    log.info("solved %s in %.3fs", inst.name or args.file, time.perf_counter() - started)
    if args.out:
        _emit(write_solution(inst, report), args.out)
    if args.report:
        _emit(write_report(inst, report), args.report)
    if args.svg:
        Path(args.svg).write_bytes(render_svg(inst, report.final))
    print(f"cost2={report.cost} feasible={_b(report.feasible)} levels={len(report.levels)}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load(args.file)
    budget = OracleBudget(max_placements=args.budget)
    result = brute_force_optimum(inst, budget, method=args.method)
    print(f"cost2={result.cost} method={result.method}")
    return EXIT_OK


def cmd_check(args) -> int:
    inst = _load(args.file)
    emb, claims = parse_solution(Path(args.solution).read_bytes())
    problems = embedding_problems(inst, emb)
    if problems:
        print("agree=false " + "; ".join(problems))
        return EXIT_MALFORMED
    cost2 = cost(inst, emb)
    lengths = path_lengths(inst, emb)
    feasible = not violations(inst, emb, lengths)
    agree = cost2 == claims.get("cost2") and feasible == claims.get("feasible")
    claimed = {row.get("id"): row.get("d2") for row in claims.get("path_lengths", []) if isinstance(row, dict)}
    if claimed and claimed != lengths:
        agree = False
    print(f"cost2={cost2} feasible={_b(feasible)} agree={_b(agree)}")
    if not agree:
        return EXIT_MALFORMED
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def cmd_gen(args) -> int:
    spec = GenSpec(
        n_terminals=args.terminals,
        coord_range=args.range,
        restricted_fraction=Fraction(args.restricted_fraction),
        slack=args.slack,
        seed=args.seed,
        name=args.name,
    )
    _emit(serialize_instance(gen_random(spec)), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    inst = _load(args.file)
    emb = None
    if args.solution:
        emb, _ = parse_solution(Path(args.solution).read_bytes())
        problems = embedding_problems(inst, emb)
        if problems:
            raise ParseError("; ".join(problems), args.solution)
    Path(args.out).write_bytes(render_svg(inst, emb))
    return EXIT_OK


def _bench_one(path: str, mode: str) -> tuple[str, int, int, int, bool, int, float]:
    inst = parse_instance(Path(path).read_bytes())
    started = time.perf_counter()
    report = solve(inst, SolveConfig(mode=Mode(mode)))
    elapsed = time.perf_counter() - started
    rounds = sum(lv.dp_rounds for lv in report.levels)
    return Path(path).name, len(inst.vertices), report.m, report.cost, report.feasible, rounds, elapsed


def cmd_bench(args) -> int:
    files = sorted(str(p) for p in Path(args.dir).glob("*.json"))
    if not files:
        print(f"no *.json instances in {args.dir}", file=sys.stderr)
        return EXIT_MALFORMED
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, files, [args.mode] * len(files)))
    else:
        rows = [_bench_one(f, args.mode) for f in files]
    print(f"{'instance':<32} {'|V|':>5} {'m':>3} {'cost2':>8} {'feas':>5} {'rounds':>6} {'sec':>8}")
    for name, n, m, c, feas, rounds, sec in rows:
        print(f"{name:<32} {n:>5} {m:>3} {c:>8} {_b(feas):>5} {rounds:>6} {sec:>8.3f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="toposteiner",
        description="Optimal rectilinear embedding of a fixed Steiner tree under root-path length limits.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log per-level progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check structure and feasibility of an instance")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("solve", help="compute an optimal embedding")
    s.add_argument("file")
    s.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PRACTICAL.value)
    s.add_argument("--max-rounds", type=int, default=None, help="cap on DP rounds per level")
    s.add_argument("--out", help="solution document destination ('-' for stdout)")
    s.add_argument("--svg", help="write an SVG drawing of the solution")
    s.add_argument("--report", help="write the level trace and bound checks")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("oracle", help="exhaustive optimum for small instances")
    s.add_argument("file")
    s.add_argument("--budget", type=int, default=OracleBudget().max_placements, help="max enumerated placements")
    s.add_argument("--method", choices=["auto", "enumerate", "grid-dp"], default="auto")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("check", help="recompute cost and feasibility of a solution document")
    s.add_argument("file")
    s.add_argument("--solution", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("gen", help="generate a random feasible instance")
    s.add_argument("--terminals", type=int, required=True, help="number of terminals including the root")
    s.add_argument("--range", type=int, required=True, help="coordinates drawn from [-R, R]")
    s.add_argument("--restricted-fraction", default="0", help="probability a terminal gets a limit (e.g. 1/2)")
    s.add_argument("--slack", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--name")
    s.add_argument("--out")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("render", help="draw an instance (and optionally a solution) as SVG")
    s.add_argument("file")
    s.add_argument("--solution")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("bench", help="solve every *.json instance in a directory")
    s.add_argument("--dir", required=True)
    s.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.PRACTICAL.value)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ParseError, InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
