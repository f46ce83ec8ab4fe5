"""Command-line surface.

Commands: solve, verify, exact, lp, gap, gen, bench.  Machine-readable
output: JSON summaries on stdout, CSV to a file for bench.  Exit codes:
0 success, 2 infeasible instance/solution, 3 budget exceeded, 4 parse error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import bench as bench_mod
from .errors import (
    BudgetExceeded,
    CannotSatisfyFeasibility,
    EnumerationTooLarge,
    FaultnetError,
    InfeasibleInstance,
    ParseError,
    WidthBudgetExceeded,
)
from .instances import generate, parse, serialize
from .lp import gap_experiment, solve_problem_lp
from .oracles import check_problem_feasible

EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_PARSE = 4


def _read_instance(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_solve(args) -> int:
    inst = _read_instance(args.instance)
    g = inst.to_graph()
    sol = bench_mod.run_algorithm(inst, args.alg, args.seed)
    ok, witness = check_problem_feasible(g, inst.problem, sol)
    summary = {
        "algorithm": args.alg,
        "seed": args.seed,
        "cost": g.total_cost(sol),
        "edges": sorted(sol),
        "feasible": ok,
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"edges": sorted(sol)}, fh)
    _emit(summary)
    return 0 if ok else EXIT_INFEASIBLE


def cmd_verify(args) -> int:
    inst = _read_instance(args.instance)
    g = inst.to_graph()
    with open(args.solution, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    edges = frozenset(int(e) for e in payload["edges"])
    ok, witness = check_problem_feasible(g, inst.problem, edges)
    _emit(
        {
            "feasible": ok,
            "cost": g.total_cost(edges),
            "witness": repr(witness) if witness is not None else None,
        }
    )
    return 0 if ok else EXIT_INFEASIBLE


def cmd_exact(args) -> int:
    from .exact import exact_solve

    inst = _read_instance(args.instance)
    g = inst.to_graph()
    sol, cost = exact_solve(g, inst.problem)
    _emit({"cost": cost, "edges": sorted(sol)})
    return 0


def cmd_lp(args) -> int:
    inst = _read_instance(args.instance)
    g = inst.to_graph()
    sol, model = solve_problem_lp(g, inst.problem)
    if args.dump_model:
        with open(args.dump_model, "w", encoding="utf-8") as fh:
            fh.write(model.dump())
    _emit(
        {
            "objective": sol.objective,
            "rounds": sol.rounds,
            "separation_clean": sol.separation_clean,
            "x": list(sol.x),
        }
    )
    return 0


def cmd_gap(args) -> int:
    report = gap_experiment(args.k)
    _emit(dataclasses.asdict(report))
    return 0


def cmd_gen(args) -> int:
    params = json.loads(args.params) if args.params else {}
    inst = generate(args.kind, n=args.n, m=args.m, seed=args.seed, params=params)
    text = serialize(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _emit({"written": args.out, "vertices": inst.n, "edges": len(inst.edge_specs)})
    else:
        sys.stdout.write(text)
    return 0


def cmd_bench(args) -> int:
    with open(args.suite, "r", encoding="utf-8") as fh:
        suite = json.load(fh)
    records, csv_text, code = bench_mod.bench(
        suite,
        jobs=args.jobs,
        with_timing=not args.no_timing,
        allow_infeasible=args.allow_infeasible,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(csv_text)
    if args.solutions:
        with open(args.solutions, "w", encoding="utf-8") as fh:
            fh.write(bench_mod.solutions_json(records))
    errors = [r for r in records if r.error]
    _emit(
        {
            "cells": len(records),
            "errors": len(errors),
            "csv": args.out,
        }
    )
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="faultnet")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one algorithm on an instance file")
    p.add_argument("instance")
    p.add_argument("--alg", required=True, choices=bench_mod.ALGORITHMS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the solution JSON here")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against the oracle")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("exact", help="exact minimum-cost baseline")
    p.add_argument("instance")
    p.set_defaults(fn=cmd_exact)

    p = sub.add_parser("lp", help="solve the LP relaxation by cutting planes")
    p.add_argument("instance")
    p.add_argument("--dump-model", help="write the final row system here")
    p.set_defaults(fn=cmd_lp)

    p = sub.add_parser("gap", help="run the (1,k) integrality-gap experiment")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(fn=cmd_gap)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", help="JSON dict of generator parameters")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark suite to CSV")
    p.add_argument("suite")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--allow-infeasible", action="store_true")
    p.add_argument("--solutions", help="also write a JSON map of solutions")
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BudgetExceeded, EnumerationTooLarge, WidthBudgetExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InfeasibleInstance, CannotSatisfyFeasibility) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"bad parameters: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FaultnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
