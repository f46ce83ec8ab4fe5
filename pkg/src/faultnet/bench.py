"""Benchmark harness: run algorithm x instance x seed cells, emit CSV.

Every cell runs one algorithm on one instance, verifies the output against
the matching oracle, optionally attaches the exact baseline, and records a
RunRecord row.  Cell errors land in the row's error column and the run
continues.  Rows are assembled in suite order regardless of worker
completion order, and floats print with 9 significant digits, so a suite is
reproducible byte for byte (timings can be suppressed for comparisons).

CSV schema (header row included)::

    instance,algorithm,seed,cost,exact_opt,ratio,feasible,guarantee,wall_ms,error

plus one trailing summary row per algorithm (instance column "__summary__")
carrying the maximum observed ratio.
"""

from __future__ import annotations

import concurrent.futures
import json
import time
from dataclasses import dataclass

from .bulk import solve_bulk_sndp, solve_flex_sndp, solve_rsndp
from .errors import BudgetExceeded, FaultnetError
from .exact import exact_solve
from .flexalg import (
    fgc_guarantee,
    flex_st_guarantee,
    solve_fgc,
    solve_flex_st,
    solve_flex_st_22,
)
from .instances import InstanceFile, parse, serialize
from .oracles import check_problem_feasible

CSV_HEADER = "instance,algorithm,seed,cost,exact_opt,ratio,feasible,guarantee,wall_ms,error"

ALGORITHMS = (
    "fgc",
    "flex-st",
    "flex-st-22",
    "flex-sndp",
    "bulk",
    "rsndp",
    "exact",
)


@dataclass
class RunRecord:
    instance: str
    algorithm: str
    seed: int
    cost: float | None = None
    exact_opt: float | None = None
    ratio: float | None = None
    feasible: bool | None = None
    guarantee: float | None = None
    wall_ms: float | None = None
    error: str = ""
    edges: tuple[int, ...] = ()

    def csv_row(self, with_timing: bool = True) -> str:
        def num(x):
            return "" if x is None else format(x, ".9g")

        feas = "" if self.feasible is None else str(self.feasible).lower()
        wall = num(self.wall_ms) if with_timing else ""
        return ",".join(
            [
                self.instance,
                self.algorithm,
                str(self.seed),
                num(self.cost),
                num(self.exact_opt),
                num(self.ratio),
                feas,
                num(self.guarantee),
                wall,
                self.error,
            ]
        )


def _uniform_pq(inst: InstanceFile):
    pqs = {(r.p, r.q) for r in inst.problem.flex}
    if len(pqs) != 1:
        raise FaultnetError("algorithm needs a uniform (p, q)")
    return next(iter(pqs))


def run_algorithm(inst: InstanceFile, algorithm: str, seed: int) -> frozenset:
    """Dispatch one algorithm, validating applicability."""
    g = inst.to_graph()
    prob = inst.problem
    if algorithm == "fgc":
        if not prob.is_fgc(g.n):
            raise FaultnetError("fgc needs an all-pairs uniform flex problem")
        p, q = _uniform_pq(inst)
        return solve_fgc(g, p, q)
    if algorithm == "flex-st":
        if prob.kind != "flex" or len(prob.flex) != 1:
            raise FaultnetError("flex-st needs a single flex pair")
        r = prob.flex[0]
        return solve_flex_st(g, r.s, r.t, r.p, r.q)
    if algorithm == "flex-st-22":
        if prob.kind != "flex" or len(prob.flex) != 1:
            raise FaultnetError("flex-st-22 needs a single flex pair")
        r = prob.flex[0]
        if (r.p, r.q) != (2, 2):
            raise FaultnetError("flex-st-22 needs requirement (2, 2)")
        return solve_flex_st_22(g, r.s, r.t)
    if algorithm == "flex-sndp":
        if prob.kind != "flex":
            raise FaultnetError("flex-sndp needs a flex problem")
        return solve_flex_sndp(g, prob.flex, seed=seed)
    if algorithm == "bulk":
        if prob.kind != "bulk":
            raise FaultnetError("bulk needs a bulk problem")
        return solve_bulk_sndp(g, prob.scenarios, seed=seed)
    if algorithm == "rsndp":
        if prob.kind != "rsndp":
            raise FaultnetError("rsndp needs a relative problem")
        return solve_rsndp(g, prob.relative, seed=seed)
    if algorithm == "exact":
        sol, _cost = exact_solve(g, prob)
        return sol
    raise FaultnetError(f"unknown algorithm {algorithm!r}")


def guarantee_for(inst: InstanceFile, algorithm: str) -> float | None:
    prob = inst.problem
    if algorithm == "exact":
        return 1.0
    if algorithm == "fgc":
        p, q = _uniform_pq(inst)
        return fgc_guarantee(p, q)
    if algorithm == "flex-st":
        p, q = _uniform_pq(inst)
        return flex_st_guarantee(p, q)
    if algorithm == "flex-st-22":
        return 5.0
    # Poly-log guarantees: no fixed constant is claimed.
    return None


def run_cell(inst_text: str, instance_id: str, algorithm: str, seed: int, want_exact: bool) -> RunRecord:
    rec = RunRecord(instance=instance_id, algorithm=algorithm, seed=seed)
    try:
        inst = parse(inst_text)
        g = inst.to_graph()
        start = time.perf_counter()
        sol = run_algorithm(inst, algorithm, seed)
        rec.wall_ms = (time.perf_counter() - start) * 1000.0
        rec.cost = g.total_cost(sol)
        rec.edges = tuple(sorted(sol))
        ok, _witness = check_problem_feasible(g, inst.problem, sol)
        rec.feasible = ok
        rec.guarantee = guarantee_for(inst, algorithm)
        if want_exact and algorithm != "exact":
            try:
                _opt_sol, opt = exact_solve(g, inst.problem)
                rec.exact_opt = opt
                if opt > 0:
                    rec.ratio = rec.cost / opt
            except BudgetExceeded:
                pass
        elif algorithm == "exact":
            rec.exact_opt = rec.cost
            rec.ratio = 1.0
    except FaultnetError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def _cells_of_suite(suite: dict) -> list[tuple[str, str, str, int, bool]]:
    """Flatten a suite dict into (instance text, id, algorithm, seed, exact)."""
    from .instances import generate

    want_exact = bool(suite.get("exact", False))
    insts = []
    for entry in suite["instances"]:
        if isinstance(entry, str):
            with open(entry, "r", encoding="utf-8") as fh:
                text = fh.read()
            insts.append((entry, text))
        else:
            inst = generate(
                entry["kind"],
                n=entry.get("n"),
                m=entry.get("m"),
                seed=entry.get("seed", 0),
                params=entry.get("params"),
            )
            insts.append((entry.get("id", entry["kind"]), serialize(inst)))
    cells = []
    for inst_id, text in insts:
        for algorithm in suite["algorithms"]:
            for seed in suite.get("seeds", [0]):
                cells.append((text, inst_id, algorithm, int(seed), want_exact))
    return cells


def bench(
    suite: dict,
    jobs: int = 1,
    with_timing: bool = True,
    allow_infeasible: bool = False,
) -> tuple[list[RunRecord], str, int]:
    """Run a suite; returns (records, csv text, exit code).

    Exit code 2 flags an infeasible algorithm output under the default
    policy; per-cell errors are recorded in rows without stopping the run.
    """
    cells = _cells_of_suite(suite)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell_star, cells))
    else:
        records = [_run_cell_star(cell) for cell in cells]
    lines = [CSV_HEADER]
    exit_code = 0
    for rec in records:
        if rec.feasible is False and not allow_infeasible:
            rec.error = rec.error or "infeasible-output"
            exit_code = 2
        lines.append(rec.csv_row(with_timing=with_timing))
    for algorithm in suite["algorithms"]:
        ratios = [
            r.ratio for r in records if r.algorithm == algorithm and r.ratio is not None
        ]
        summary = RunRecord(
            instance="__summary__",
            algorithm=algorithm,
            seed=0,
            ratio=max(ratios) if ratios else None,
        )
        lines.append(summary.csv_row(with_timing=with_timing))
    return records, "\n".join(lines) + "\n", exit_code


def _run_cell_star(cell) -> RunRecord:
    return run_cell(*cell)


def solutions_json(records: list[RunRecord]) -> str:
    """Deterministic JSON map of cell -> sorted solution edge ids."""
    payload = {
        f"{r.instance}|{r.algorithm}|{r.seed}": list(r.edges) for r in records
    }
    return json.dumps(payload, indent=0, sort_keys=True)
