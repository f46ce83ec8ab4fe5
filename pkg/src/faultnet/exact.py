"""Exact exponential baseline: provably minimum-cost feasible edge sets.

Branch and bound over edge include/exclude decisions, with feasibility
pruning in both directions (the chosen set alone, and chosen plus all still
undecided edges) and an admissible remaining-cost bound read off one violated
structure.  Flex problems get incrementally-maintained per-cut boundary
counters, which is what makes the 200-instance acceptance sweeps affordable;
bulk and relative problems recompute connectivity per node.

This is the oracle that backs every derived expected value in the test
suite, so it favors simplicity over cleverness everywhere the budget allows.
"""

from __future__ import annotations

import os

from .errors import BudgetExceeded, InfeasibleInstance
from .graph import FaultGraph, connected_components, same_component
from .oracles import (
    BulkScenario,
    Problem,
    RelativeRequirement,
    check_problem_feasible,
    expand_rsndp_to_bulk,
)

COST_EPS = 1e-12


def exact_budget() -> int:
    return int(os.environ.get("FAULTNET_EXACT_BUDGET", "30"))


class _FlexChecker:
    """Incremental feasibility for flex problems.

    Canonical cuts are subsets of vertices 0..n-2 (anchor n-1 outside),
    indexed by mask-1.  For each requirement class the bad-cut counter
    tracks cuts that currently fail "p safe or p+q total"; feasibility is
    bad == 0.  ``chosen`` and ``pool`` counters evolve by edge toggles.
    """

    def __init__(self, g: FaultGraph, reqs):
        self.g = g
        n = g.n
        self.ncuts = (1 << (n - 1)) - 1
        classes: dict[tuple[int, int], list[int]] = {}
        all_pairs_classes = {}
        for r in reqs:
            classes.setdefault((r.p, r.q), []).append((r.s, r.t))
        # relevant[c] = list of class indices the cut is constrained by
        self.class_list = sorted(classes.items())
        self.thresholds = [pq for pq, _ in self.class_list]
        self.relevant: list[list[int]] = [[] for _ in range(self.ncuts)]
        for ci, (_pq, pairs) in enumerate(self.class_list):
            for idx in range(self.ncuts):
                mask = idx + 1
                for s, t in pairs:
                    if ((mask >> s) ^ (mask >> t)) & 1:
                        self.relevant[idx].append(ci)
                        break
        self.safe: list[list[int]] = []
        self.tot: list[list[int]] = []
        self.bad: list[list[int]] = []
        self.cross: list[list[int]] = []
        for e in g.edges:
            u, v = e.u, e.v
            self.cross.append(
                [
                    idx
                    for idx in range(self.ncuts)
                    if (((idx + 1) >> u) ^ ((idx + 1) >> v)) & 1
                ]
            )

    def _status(self, which, idx, ci):
        p, q = self.thresholds[ci]
        return self.safe[which][idx] >= p or self.tot[which][idx] >= p + q

    def toggle(self, which: int, eid: int, delta: int) -> None:
        e = self.g.edges[eid]
        safe = self.safe[which]
        tot = self.tot[which]
        bad = self.bad[which]
        ds = delta if e.safe else 0
        for idx in self.cross[eid]:
            rel = self.relevant[idx]
            if not rel:
                continue
            before = [self._status(which, idx, ci) for ci in rel]
            tot[idx] += delta
            safe[idx] += ds
            for k, ci in enumerate(rel):
                after = self._status(which, idx, ci)
                if before[k] != after:
                    bad[ci] += 1 if not after else -1

    def init_counts(self, chosen, pool) -> None:
        # Reset to all-zero counters: every relevant (cut, class) is bad
        # since p >= 1, then replay the given edge sets.
        ncls = len(self.class_list)
        self.safe = [[0] * self.ncuts for _ in range(2)]  # 0 chosen, 1 pool
        self.tot = [[0] * self.ncuts for _ in range(2)]
        self.bad = [[0] * ncls for _ in range(2)]
        per_class = [0] * ncls
        for idx in range(self.ncuts):
            for ci in self.relevant[idx]:
                per_class[ci] += 1
        for which in range(2):
            for ci in range(ncls):
                self.bad[which][ci] = per_class[ci]
        for eid in chosen:
            self.toggle(0, eid, +1)
        for eid in pool:
            self.toggle(1, eid, +1)

    def chosen_feasible(self) -> bool:
        return not any(self.bad[0])

    def pool_feasible(self) -> bool:
        return not any(self.bad[1])

    def violated_candidates(self, undecided) -> list[int]:
        """Edges among ``undecided`` crossing one currently-bad cut."""
        for ci in range(len(self.class_list)):
            if self.bad[0][ci] == 0:
                continue
            for idx in range(self.ncuts):
                if ci in self.relevant[idx] and not self._status(0, idx, ci):
                    mask = idx + 1
                    g = self.g
                    return [
                        eid
                        for eid in undecided
                        if ((mask >> g.edges[eid].u) ^ (mask >> g.edges[eid].v)) & 1
                    ]
        return []


class _ScenarioChecker:
    """Recompute-style feasibility for bulk (and expanded rsndp) problems."""

    def __init__(self, g: FaultGraph, scenarios):
        self.g = g
        self.scenarios = scenarios
        self.chosen: set[int] = set()
        self.pool: set[int] = set()

    def toggle(self, which, eid, delta):
        target = self.chosen if which == 0 else self.pool
        if delta > 0:
            target.add(eid)
        else:
            target.discard(eid)

    def init_counts(self, chosen, pool):
        self.chosen = set(chosen)
        self.pool = set(pool)

    def _feasible(self, edge_set) -> bool:
        for sc in self.scenarios:
            alive = edge_set - sc.fail
            for u, v in sc.pairs:
                if not same_component(self.g, alive, u, v):
                    return False
        return True

    def chosen_feasible(self):
        return self._feasible(self.chosen)

    def pool_feasible(self):
        return self._feasible(self.pool)

    def violated_candidates(self, undecided):
        for sc in self.scenarios:
            alive = self.chosen - sc.fail
            comps = connected_components(self.g, alive)
            comp_of = {}
            for ci, comp in enumerate(comps):
                for v in comp:
                    comp_of[v] = ci
            for u, v in sc.pairs:
                if comp_of[u] != comp_of[v]:
                    side = comps[comp_of[u]]
                    g = self.g
                    return [
                        eid
                        for eid in undecided
                        if eid not in sc.fail
                        and (g.edges[eid].u in side) != (g.edges[eid].v in side)
                    ]
        return []


def _make_checker(g: FaultGraph, problem: Problem):
    if problem.kind == "flex":
        return _FlexChecker(g, problem.flex)
    if problem.kind == "bulk":
        return _ScenarioChecker(g, problem.scenarios)
    return _ScenarioChecker(g, expand_rsndp_to_bulk(g, problem.relative))


def exact_solve(
    g: FaultGraph, problem: Problem, budget: int | None = None
) -> tuple[frozenset, float]:
    """Provably minimum-cost feasible edge set for the given problem.

    Cost-ordered DFS over include/exclude decisions (expensive edges decided
    first, exclusion branch first) seeded with a reverse-delete greedy upper
    bound.  Raises BudgetExceeded when m exceeds the search budget and
    InfeasibleInstance when even the full edge set fails.
    """
    cap = exact_budget() if budget is None else budget
    if g.m > cap:
        raise BudgetExceeded(f"m={g.m} exceeds exact-search budget {cap}")
    ok, _ = check_problem_feasible(g, problem, g.all_edge_ids())
    if not ok:
        raise InfeasibleInstance("graph itself is infeasible for the problem")

    checker = _make_checker(g, problem)
    order = sorted(range(g.m), key=lambda eid: (-g.cost_of(eid), eid))
    costs = [g.cost_of(eid) for eid in range(g.m)]

    # Greedy seed: keep everything, then drop expensive edges while feasible.
    checker.init_counts(chosen=range(g.m), pool=range(g.m))
    kept = set(range(g.m))
    for eid in order:
        checker.toggle(0, eid, -1)
        if checker.chosen_feasible():
            kept.discard(eid)
        else:
            checker.toggle(0, eid, +1)
    best_set = frozenset(kept)
    best_cost = sum(costs[eid] for eid in kept)

    # Reset counters for the DFS: nothing chosen, everything in the pool.
    checker.init_counts(chosen=(), pool=range(g.m))

    def dfs(k: int, cost_in: float) -> None:
        nonlocal best_set, best_cost
        if cost_in >= best_cost - COST_EPS:
            return
        if checker.chosen_feasible():
            best_cost = cost_in
            best_set = frozenset(chosen_now)
            return
        if k == g.m or not checker.pool_feasible():
            return
        undecided = order[k:]
        fix_candidates = checker.violated_candidates(undecided)
        if fix_candidates:
            lb = min(costs[eid] for eid in fix_candidates)
            if cost_in + lb >= best_cost - COST_EPS:
                return
        eid = order[k]
        # Exclude branch first: expensive edges drop out early.
        checker.toggle(1, eid, -1)
        if checker.pool_feasible():
            dfs(k + 1, cost_in)
        checker.toggle(1, eid, +1)
        # Include branch.
        chosen_now.add(eid)
        checker.toggle(0, eid, +1)
        dfs(k + 1, cost_in + costs[eid])
        checker.toggle(0, eid, -1)
        chosen_now.discard(eid)

    chosen_now: set[int] = set()
    dfs(0, 0.0)
    return best_set, best_cost
