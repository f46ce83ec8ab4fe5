"""Constant-factor algorithms for flexible connectivity.

Spanning case (solve_fgc): exact base at level (p, 0), then one augmentation
round per unsafe-failure level.  A round is a single uncrossable-family
primal-dual cover when p <= 2 or when lifting to level 1, and otherwise runs
in p stages keyed by the number of safe edges on the violated boundary
(supported for q <= 3 and for q = 4 with even p; odd p at q = 4 has a
non-uncrossable final stage and is rejected at planning time).

Single-pair case (solve_flex_st, solve_flex_st_22): each round seeds the
partial solution with the support of a min-cost flow under capacities
(safe: p+q, unsafe: p) and demand p(p+q), decomposes that flow into unit
paths, and covers each stage's violated cuts through ring subfamilies
indexed by path subsets, each solved exactly.  Requires p+q > pq/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .cover import CutFamily, CoverResult, primal_dual_cover, ring_cover_exact
from .errors import (
    BaseNotFeasible,
    InfeasibleInstance,
    ParameterConditionViolated,
    StageCoverFailed,
    UnsupportedParameters,
)
from .exact import exact_budget, exact_solve
from .flow import flow_decompose, min_cost_flow
from .graph import FaultGraph, spanning_cut_masks, st_cut_masks
from .oracles import FlexRequirement, Problem, fgc_requirements, is_flex_feasible


@dataclass(frozen=True)
class PathBundle:
    """Unit s-t paths from a flow decomposition, with their edge sets."""

    paths: tuple[tuple[int, ...], ...]

    @property
    def edge_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(p) for p in self.paths)

    def __len__(self) -> int:
        return len(self.paths)


@dataclass(frozen=True)
class StageSpec:
    label: str
    safe_count: int | None  # None = all violated cuts as one family
    engine: str  # "primal-dual" | "ring-exact"


@dataclass(frozen=True)
class StagePlan:
    """Per-level augmentation plan: target (p, q), scope, ordered stages."""

    p: int
    q: int
    scope: str  # "spanning" | "st"
    s: int = 0
    t: int = 0
    stages: tuple[StageSpec, ...] = ()


@dataclass(frozen=True)
class StageRecord:
    label: str
    families: int
    added: frozenset
    cost: float
    dual_lower_bound: float | None


def fgc_supported(p: int, q: int) -> bool:
    if p < 1 or q < 0:
        return False
    return q <= 3 or p == 2 or (q == 4 and p % 2 == 0)


def make_fgc_plan(p: int, q: int) -> StagePlan:
    """Plan for lifting a (p, q-1)-feasible spanning solution to (p, q)."""
    if p < 1 or q < 1:
        raise UnsupportedParameters(f"no augmentation plan for (p, q)=({p}, {q})")
    if p <= 2 or q == 1:
        stages = (StageSpec("all-violated", None, "primal-dual"),)
    elif q in (2, 3) or (q == 4 and p % 2 == 0):
        stages = tuple(
            StageSpec(f"safe={i}", i, "primal-dual") for i in range(p)
        )
    else:
        raise UnsupportedParameters(
            f"stage families for (p, q)=({p}, {q}) are not uncrossable"
            + (" (odd p, q=4)" if q == 4 else "")
        )
    return StagePlan(p=p, q=q, scope="spanning", stages=stages)


def make_flex_st_plan(p: int, q: int, s: int, t: int) -> StagePlan:
    if p + q <= p * q / 2:
        raise ParameterConditionViolated(
            f"(p, q)=({p}, {q}) violates p+q > pq/2"
        )
    stages = tuple(StageSpec(f"safe={i}", i, "ring-exact") for i in range(p))
    return StagePlan(p=p, q=q, scope="st", s=s, t=t, stages=stages)


# -- violated-cut machinery ----------------------------------------------------

def _scope_masks(g: FaultGraph, plan: StagePlan):
    if plan.scope == "spanning":
        return spanning_cut_masks(g.n)
    return st_cut_masks(g.n, plan.s, plan.t)


def _boundary_profile(g: FaultGraph, F: Sequence, mask: int):
    """(all boundary ids, safe boundary ids) of the F edge list across mask."""
    bnd, safe = [], []
    for e in F:
        if ((mask >> e.u) ^ (mask >> e.v)) & 1:
            bnd.append(e.id)
            if e.safe:
                safe.append(e.id)
    return bnd, safe


def _violated_membership(g: FaultGraph, F: frozenset, plan: StagePlan):
    """Raw predicate: boundary has exactly p+q-1 edges, fewer than p safe,
    and the cut is in scope."""
    p, q = plan.p, plan.q
    fe = [g.edges[eid] for eid in sorted(F)]
    if plan.scope == "spanning":
        def membership(mask: int) -> bool:
            if mask <= 0 or mask >= (1 << g.n) - 1:
                return False
            safe = total = 0
            for e in fe:
                if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                    total += 1
                    if total > p + q - 1:
                        return False
                    if e.safe:
                        safe += 1
            return total == p + q - 1 and safe < p
    else:
        s, t = plan.s, plan.t
        def membership(mask: int) -> bool:
            if mask <= 0 or mask >= (1 << g.n) - 1:
                return False
            if not ((mask >> s) & 1) or ((mask >> t) & 1):
                return False
            safe = total = 0
            for e in fe:
                if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                    total += 1
                    if total > p + q - 1:
                        return False
                    if e.safe:
                        safe += 1
            return total == p + q - 1 and safe < p
    return membership


def _feasible_for(g: FaultGraph, F: Iterable[int], plan: StagePlan, q: int) -> bool:
    if plan.scope == "st":
        ok, _ = is_flex_feasible(
            g, [FlexRequirement(plan.s, plan.t, plan.p, q)], F
        )
        return ok
    p = plan.p
    fe = [g.edges[eid] for eid in sorted(F)]
    for mask in spanning_cut_masks(g.n):
        safe = total = 0
        for e in fe:
            if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                total += 1
                if e.safe:
                    safe += 1
        if safe < p and total < p + q:
            return False
    return True


def membership_ciq(
    g: FaultGraph,
    mask: int,
    Q: Sequence[Iterable[int]],
    F: frozenset,
    p: int,
    q: int,
    s: int,
    t: int,
) -> bool:
    """Is the cut in the ring subfamily keyed by the path subset Q?

    True iff the cut is violated (boundary of exactly p+q-1 F-edges, fewer
    than p safe, separating s from t with s inside), each path of Q meets
    the boundary in exactly one edge, those edges are distinct and safe, and
    together they are exactly the cut's safe boundary.
    """
    plan = StagePlan(p=p, q=q, scope="st", s=s, t=t)
    if not _violated_membership(g, F, plan)(mask):
        return False
    fe = [g.edges[eid] for eid in sorted(F)]
    bnd, safe_bnd = _boundary_profile(g, fe, mask)
    if len(safe_bnd) != len(Q):
        return False
    bnd_set = set(bnd)
    hit_edges = []
    for path in Q:
        hits = [eid for eid in path if eid in bnd_set]
        if len(hits) != 1 or not g.edges[hits[0]].safe:
            return False
        hit_edges.append(hits[0])
    return len(set(hit_edges)) == len(hit_edges) and set(hit_edges) == set(safe_bnd)


def _enumerate_matchings(edge_opts: list[list[int]]) -> list[frozenset]:
    """All sets of distinct path indices formed by picking one option per
    safe edge (perfect matchings of the candidacy relation)."""
    results: set[frozenset] = set()

    def rec(k: int, used: tuple[int, ...]):
        if k == len(edge_opts):
            results.add(frozenset(used))
            return
        for j in edge_opts[k]:
            if j not in used:
                rec(k + 1, used + (j,))

    rec(0, ())
    return sorted(results, key=sorted)


def _cap_flow_bundle(g: FaultGraph, F: frozenset, plan: StagePlan) -> PathBundle:
    """Decomposed flow of value p(p+q) inside (V, F) under the stage caps."""
    p, q = plan.p, plan.q
    caps = [0] * g.m
    for eid in F:
        caps[eid] = p + q if g.edges[eid].safe else p
    flow = min_cost_flow(g, caps, plan.s, plan.t, p * (p + q))
    return PathBundle(tuple(flow_decompose(g, flow)))


def _ring_families(
    g: FaultGraph, F: frozenset, plan: StagePlan, i: int
) -> list[CutFamily]:
    """The nonempty C_i^Q subfamilies of stage i, one per useful path subset.

    Every violated cut with i safe boundary edges must land in at least one
    subfamily (guaranteed under p+q > pq/2); anything else means the stage
    construction cannot cover the family and is reported, not papered over.
    """
    p, q = plan.p, plan.q
    bundle = _cap_flow_bundle(g, F, plan)
    path_sets = bundle.edge_sets
    membership = _violated_membership(g, F, plan)
    fe = [g.edges[eid] for eid in sorted(F)]
    members_i = []
    for mask in st_cut_masks(g.n, plan.s, plan.t):
        if membership(mask):
            _bnd, safe_bnd = _boundary_profile(g, fe, mask)
            if len(safe_bnd) == i:
                members_i.append(mask)
    groups: dict[frozenset, list[int]] = {}
    for mask in members_i:
        bnd, safe_bnd = _boundary_profile(g, fe, mask)
        bnd_set = set(bnd)
        opts = []
        for eid in safe_bnd:
            cand = [
                j
                for j, pset in enumerate(path_sets)
                if eid in pset and len(bnd_set & pset) == 1
            ]
            opts.append(cand)
        qsets = _enumerate_matchings(opts) if all(opts) else []
        if i == 0:
            qsets = [frozenset()]
        if not qsets:
            raise StageCoverFailed(
                f"violated cut {bin(mask)} has no qualifying path subset at "
                f"stage {i} (p={p}, q={q})"
            )
        for qs in qsets:
            groups.setdefault(qs, []).append(mask)
    families = []
    ground = g.all_edge_ids() - F
    for qs in sorted(groups, key=sorted):
        Q = [bundle.paths[j] for j in sorted(qs)]
        fam = CutFamily(
            graph=g,
            members=tuple(sorted(groups[qs])),
            membership=(
                lambda mask, Q=tuple(Q): membership_ciq(
                    g, mask, Q, F, p, q, plan.s, plan.t
                )
            ),
            ground=ground,
            label=f"C_{i}^{sorted(qs)}",
        )
        families.append(fam)
    return families


def _stage_families(
    g: FaultGraph, F: frozenset, plan: StagePlan, spec: StageSpec
) -> list[CutFamily]:
    membership = _violated_membership(g, F, plan)
    if spec.engine == "ring-exact":
        return _ring_families(g, F, plan, spec.safe_count)
    fe = [g.edges[eid] for eid in sorted(F)]
    members = []
    for mask in _scope_masks(g, plan):
        if membership(mask):
            if spec.safe_count is None:
                members.append(mask)
            else:
                _bnd, safe_bnd = _boundary_profile(g, fe, mask)
                if len(safe_bnd) == spec.safe_count:
                    members.append(mask)
    if spec.safe_count is None:
        stage_membership = membership
    else:
        want = spec.safe_count

        def stage_membership(mask: int, _m=membership, _want=want) -> bool:
            if not _m(mask):
                return False
            _bnd, safe_bnd = _boundary_profile(g, fe, mask)
            return len(safe_bnd) == _want

    return [
        CutFamily(
            graph=g,
            members=tuple(sorted(members)),
            membership=stage_membership,
            ground=g.all_edge_ids() - F,
            label=f"{plan.scope}({plan.p},{plan.q}) {spec.label}",
        )
    ]


def augment_stages_detailed(
    g: FaultGraph, F: Iterable[int], p: int, q: int, plan: StagePlan
) -> tuple[frozenset, list[StageRecord]]:
    """Run the plan's stages, growing F; returns the result and per-stage
    cover records.  F must already be feasible at (p, q-1)."""
    if (p, q) != (plan.p, plan.q):
        raise ValueError("plan parameters disagree with the call")
    F = frozenset(F)
    if not _feasible_for(g, F, plan, q - 1):
        raise BaseNotFeasible(f"input edges are not ({p}, {q - 1})-feasible")
    records = []
    for spec in plan.stages:
        families = _stage_families(g, F, plan, spec)
        added: set[int] = set()
        dual = 0.0
        for fam in families:
            if spec.engine == "primal-dual":
                result: CoverResult = primal_dual_cover(fam)
                added |= result.edges
                dual += result.dual_lower_bound
            else:
                added |= ring_cover_exact(fam)
        records.append(
            StageRecord(
                label=spec.label,
                families=len(families),
                added=frozenset(added),
                cost=g.total_cost(added),
                dual_lower_bound=dual if spec.engine == "primal-dual" else None,
            )
        )
        F = F | added
    if not _feasible_for(g, F, plan, q):
        raise StageCoverFailed(
            f"stages completed but the result is not ({p}, {q})-feasible"
        )
    return F, records


def augment_stages(
    g: FaultGraph, F: Iterable[int], p: int, q: int, plan: StagePlan
) -> frozenset:
    out, _records = augment_stages_detailed(g, F, p, q, plan)
    return out


# -- spanning solver -----------------------------------------------------------

def _ecss_base(g: FaultGraph, p: int) -> frozenset:
    """Fallback (p, 0) base: level-by-level connectivity augmentation with
    primal-dual covers (each level's deficient-cut family is uncrossable)."""
    F: frozenset = frozenset()
    for k in range(1, p + 1):
        fe = [g.edges[eid] for eid in sorted(F)]

        def membership(mask: int, _fe=fe, _k=k) -> bool:
            if mask <= 0 or mask >= (1 << g.n) - 1:
                return False
            total = 0
            for e in _fe:
                if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                    total += 1
                    if total > _k - 1:
                        return False
            return total == _k - 1

        members = tuple(
            m for m in spanning_cut_masks(g.n) if membership(m)
        )
        fam = CutFamily(
            graph=g,
            members=members,
            membership=membership,
            ground=g.all_edge_ids() - F,
            label=f"ecss level {k}",
        )
        F = F | primal_dual_cover(fam).edges
    return F


def solve_fgc(g: FaultGraph, p: int, q: int) -> frozenset:
    """Spanning (p, q) solver within the supported parameter set.

    Exact base at (p, 0) when the edge count is within the search budget,
    then one augmentation round per level 1..q following the per-level plan.
    The result is oracle-verified before returning.
    """
    if not fgc_supported(p, q):
        raise UnsupportedParameters(f"(p, q)=({p}, {q}) is outside the supported set")
    if g.n < 2:
        return frozenset()
    probe = StagePlan(p=p, q=q, scope="spanning")
    if not _feasible_for(g, g.all_edge_ids(), probe, q):
        raise InfeasibleInstance(f"graph is not ({p}, {q})-feasible")
    if g.m <= exact_budget():
        F, _cost = exact_solve(
            g, Problem("flex", flex=fgc_requirements(g.n, p, 0))
        )
    else:
        F = _ecss_base(g, p)
    for level in range(1, q + 1):
        plan = make_fgc_plan(p, level)
        F = augment_stages(g, F, p, level, plan)
    return F


def fgc_guarantee(p: int, q: int) -> float:
    """Published worst-case ratio for the supported spanning parameters."""
    if q == 0:
        return 2.0
    best = float("inf")
    if p <= 2:
        best = 2 * q + 2
    if q == 1:
        best = min(best, 4)
    elif q == 2:
        best = min(best, 2 * p + 4)
    elif q == 3:
        best = min(best, 4 * p + 4)
    elif q == 4 and p % 2 == 0:
        best = min(best, 6 * p + 4)
    return best


# -- single-pair solvers ---------------------------------------------------------

def solve_flex_st(g: FaultGraph, s: int, t: int, p: int, q: int) -> frozenset:
    """Single-pair (p, q) solver for p+q > pq/2.

    Exact min-cost p-flow for the (p, 0) base, then per level j: capacitated
    seeding (support of a min-cost flow of p(p+j) units under caps p+j safe
    / p unsafe) followed by the staged ring-family covers.
    """
    make_flex_st_plan(p, q, s, t)  # parameter hypothesis check
    ok, _ = is_flex_feasible(g, [FlexRequirement(s, t, p, q)], g.all_edge_ids())
    if not ok:
        raise InfeasibleInstance(f"graph is not ({p}, {q})-flex-connected for the pair")
    F = min_cost_flow(g, 1, s, t, p).support()
    for level in range(1, q + 1):
        caps = [p + level if e.safe else p for e in g.edges]
        seed = min_cost_flow(g, caps, s, t, p * (p + level)).support()
        plan = make_flex_st_plan(p, level, s, t)
        F = augment_stages(g, F | seed, p, level, plan)
    return F


def flex_st_guarantee(p: int, q: int) -> float:
    """Construction ceiling: base + per level the cap seeding factor plus
    one exact cover per path subset per stage."""
    total = 1.0
    for j in range(1, q + 1):
        total += (p + j) + sum(comb(p * (p + j), i) for i in range(p))
    return total


def solve_flex_st_22(g: FaultGraph, s: int, t: int) -> frozenset:
    """The specialized (2, 2) single-pair algorithm with ratio 5.

    Seeds with the support of a min-cost 4-flow under caps 2 safe / 1
    unsafe, decomposes the (then maximum) flow into 4 unit paths, and covers
    the three ring families keyed by the first three paths exactly.
    """
    ok, _ = is_flex_feasible(g, [FlexRequirement(s, t, 2, 2)], g.all_edge_ids())
    if not ok:
        raise InfeasibleInstance("graph is not (2, 2)-flex-connected for the pair")
    caps = [2 if e.safe else 1 for e in g.edges]
    seed = min_cost_flow(g, caps, s, t, 4).support()
    plan = StagePlan(p=2, q=2, scope="st", s=s, t=t)
    membership = _violated_membership(g, seed, plan)
    violated = [m for m in st_cut_masks(g.n, s, t) if membership(m)]
    if not violated:
        return seed
    seed_caps = [caps[eid] if eid in seed else 0 for eid in range(g.m)]
    flow = min_cost_flow(g, seed_caps, s, t, 4)
    bundle = PathBundle(tuple(flow_decompose(g, flow)))
    ground = g.all_edge_ids() - seed
    covered: set[int] = set()
    result = set(seed)
    for idx in range(3):
        Q = (bundle.paths[idx],)
        members = tuple(
            m for m in violated if membership_ciq(g, m, Q, seed, 2, 2, s, t)
        )
        covered.update(members)
        fam = CutFamily(
            graph=g,
            members=members,
            membership=(
                lambda mask, Q=Q: membership_ciq(g, mask, Q, seed, 2, 2, s, t)
            ),
            ground=ground,
            label=f"C_1^P{idx + 1}",
        )
        result |= ring_cover_exact(fam)
    if covered != set(violated):
        raise StageCoverFailed(
            "some violated cut escaped the three path-indexed ring families"
        )
    ok, _ = is_flex_feasible(g, [FlexRequirement(s, t, 2, 2)], result)
    if not ok:
        raise StageCoverFailed("cover union is not (2, 2)-feasible")
    return frozenset(result)
