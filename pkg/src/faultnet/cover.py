"""Covering engines for cut families.

Two engines back every augmentation step in the package:

* :func:`primal_dual_cover` - the classic synchronized-dual-growth
  2-approximation for covering an uncrossable family, with reverse delete
  and an explicit dual lower bound certificate.
* :func:`ring_cover_exact` - exact minimum-cost cover for ring families
  (closure-verified), via branch and bound with an LP bound at the root.

Plus :func:`check_uncrossable`, the enumerating property checker used by the
structure tests, and :func:`exact_cover`, the shared exact set-cover search.

Dual growth runs in exact rational arithmetic (floats convert exactly to
Fraction), so tight-edge detection never drifts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .errors import NotRingFamily, Uncoverable
from .graph import FaultGraph, VertexCut


@dataclass(frozen=True, eq=False)
class CutFamily:
    """Intensional family of vertex cuts over a fixed partial solution.

    ``members`` holds every member once, in canonical orientation (s-side
    for single-pair problems, anchor-free side for spanning ones) as sorted
    bit masks.  ``membership`` is the raw symmetric predicate, callable on
    any mask including non-canonical orientations; the uncrossability
    checker uses it directly.  ``ground`` is the candidate edge set a cover
    may buy from.
    """

    graph: FaultGraph
    members: tuple[int, ...]
    membership: Callable[[int], bool]
    ground: frozenset
    label: str = ""

    def boundary_in(self, mask: int, edge_ids: Iterable[int]) -> list[int]:
        edges = self.graph.edges
        return [
            eid
            for eid in edge_ids
            if ((mask >> edges[eid].u) ^ (mask >> edges[eid].v)) & 1
        ]

    def is_covered_by(self, A: Iterable[int]) -> bool:
        return not self.violated_members(A)

    def violated_members(self, A: Iterable[int]) -> list[int]:
        """Members whose boundary misses A entirely."""
        edges = self.graph.edges
        arcs = [(edges[eid].u, edges[eid].v) for eid in sorted(A)]
        out = []
        for mask in self.members:
            if not any(((mask >> u) ^ (mask >> v)) & 1 for u, v in arcs):
                out.append(mask)
        return out

    def minimal_violated(self, A: Iterable[int]) -> list[int]:
        """Inclusion-minimal members not yet crossed by A (pairwise
        non-nested by construction)."""
        viol = self.violated_members(A)
        viol.sort(key=lambda m: (bin(m).count("1"), m))
        minimal = []
        for mask in viol:
            if not any((prev & ~mask) == 0 for prev in minimal):
                minimal.append(mask)
        return minimal


@dataclass(frozen=True)
class CoverResult:
    """Cover plus its primal-dual certificate and the add/drop trace."""

    edges: frozenset
    dual_lower_bound: float
    trace: tuple[tuple[str, int], ...]


def _costs_for(fam: CutFamily, costs) -> dict[int, Fraction]:
    if costs is None:
        return {eid: Fraction(fam.graph.cost_of(eid)) for eid in fam.ground}
    return {eid: Fraction(costs[eid]) for eid in fam.ground}


def primal_dual_cover(fam: CutFamily, costs: Mapping[int, float] | None = None) -> CoverResult:
    """Cover the family by synchronized dual growth plus reverse delete.

    Duals grow uniformly on all currently minimal violated sets; the edge
    whose cost is exhausted first goes into the solution (ties to the
    smallest id).  When the family is uncrossable the result costs at most
    twice the returned dual lower bound, which itself never exceeds the
    optimum cover cost.
    """
    cost = _costs_for(fam, costs)
    edges = fam.graph.edges
    residual = dict(cost)
    duals: dict[int, Fraction] = {}
    chosen: list[int] = []
    trace: list[tuple[str, int]] = []
    while True:
        active = fam.minimal_violated(chosen)
        if not active:
            break
        candidates = sorted(fam.ground - set(chosen))
        # load = number of active sets an edge would cross
        loads = {}
        covered_some = {mask: False for mask in active}
        for eid in candidates:
            e = edges[eid]
            load = 0
            for mask in active:
                if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                    load += 1
                    covered_some[mask] = True
            if load:
                loads[eid] = load
        for mask, ok in covered_some.items():
            if not ok:
                raise Uncoverable(
                    f"violated cut {VertexCut(fam.graph.n, mask).vertices()} has no "
                    f"candidate edge ({fam.label})"
                )
        delta = min(residual[eid] / load for eid, load in loads.items())
        for mask in active:
            duals[mask] = duals.get(mask, Fraction(0)) + delta
        tight = None
        for eid in sorted(loads):
            residual[eid] -= delta * loads[eid]
            if residual[eid] <= 0 and tight is None:
                tight = eid
        chosen.append(tight)
        trace.append(("add", tight))
    # Reverse delete: drop in reverse addition order when still covering.
    kept = list(chosen)
    for eid in reversed(chosen):
        trial = [x for x in kept if x != eid]
        if fam.is_covered_by(trial):
            kept = trial
            trace.append(("drop", eid))
    dual_bound = sum(duals.values(), Fraction(0))
    return CoverResult(frozenset(kept), float(dual_bound), tuple(trace))


# -- exact covering -----------------------------------------------------------

def exact_cover(
    rows: Sequence[frozenset], costs: Mapping[int, float]
) -> tuple[frozenset, float]:
    """Exact minimum-cost hitting of every row (a row is a candidate set).

    Branch and bound: branch over the candidates of an uncovered row with
    the fewest options, with a greedy upper bound and an admissible
    max-over-rows cheapest-candidate lower bound.  Deterministic.
    """
    rows = [frozenset(r) for r in rows]
    for r in rows:
        if not r:
            raise Uncoverable("row with no candidates")
    # Dominated rows (supersets of another row) are implied.
    rows.sort(key=len)
    reduced: list[frozenset] = []
    for r in rows:
        if not any(prev <= r for prev in reduced):
            reduced.append(r)
    rows = reduced
    if not rows:
        return frozenset(), 0.0

    universe = sorted(set().union(*rows))

    # Greedy upper bound: best newly-hit count per cost.
    uncovered = set(range(len(rows)))
    greedy: set[int] = set()
    while uncovered:
        best_e, best_key = None, None
        for eid in universe:
            newly = sum(1 for i in uncovered if eid in rows[i])
            if newly == 0:
                continue
            c = costs[eid]
            key = (c / newly, eid)
            if best_key is None or key < best_key:
                best_e, best_key = eid, key
        greedy.add(best_e)
        uncovered = {i for i in uncovered if best_e not in rows[i]}
    best_cost = sum(costs[e] for e in greedy)
    best_set = frozenset(greedy)

    order_cache: dict[frozenset, list[int]] = {}

    def candidates_sorted(row: frozenset) -> list[int]:
        if row not in order_cache:
            order_cache[row] = sorted(row, key=lambda e: (costs[e], e))
        return order_cache[row]

    def search(chosen: set, chosen_cost: float, banned: frozenset) -> None:
        nonlocal best_cost, best_set
        open_rows = [r for r in rows if not (r & chosen)]
        if not open_rows:
            if chosen_cost < best_cost - 1e-12:
                best_cost = chosen_cost
                best_set = frozenset(chosen)
            return
        lb = 0.0
        pick_row = None
        for r in open_rows:
            allowed = [e for e in candidates_sorted(r) if e not in banned]
            if not allowed:
                return  # this branch cannot cover r
            lb = max(lb, costs[allowed[0]])
            if pick_row is None or len(allowed) < len(pick_row):
                pick_row = allowed
        if chosen_cost + lb >= best_cost - 1e-12:
            return
        newly_banned = set()
        for e in pick_row:
            chosen.add(e)
            search(chosen, chosen_cost + costs[e], banned | frozenset(newly_banned))
            chosen.remove(e)
            newly_banned.add(e)

    search(set(), 0.0, frozenset())
    return best_set, best_cost


def _ring_verify(fam: CutFamily) -> None:
    """Closure under intersection/union for properly intersecting members,
    plus a unique minimal member."""
    members = fam.members
    minimal = [
        m
        for m in members
        if not any(o != m and (o & ~m) == 0 for o in members)
    ]
    if len(minimal) != 1:
        raise NotRingFamily(
            f"{fam.label}: {len(minimal)} minimal members, expected 1",
            witness=tuple(minimal[:2]),
        )
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            inter = a & b
            if inter == 0 or (a & ~b) == 0 or (b & ~a) == 0:
                continue  # not properly intersecting
            if not (fam.membership(inter) and fam.membership(a | b)):
                raise NotRingFamily(
                    f"{fam.label}: closure fails for a properly intersecting pair",
                    witness=(a, b),
                )


def ring_cover_exact(fam: CutFamily, costs: Mapping[int, float] | None = None) -> frozenset:
    """Exact min-cost cover of a ring family.

    Verifies the ring property by enumeration, solves the covering problem
    exactly by branch and bound, and cross-checks that the covering LP at
    the root is integral (it must be for a ring family; a gap raises
    :class:`NotRingFamily`).
    """
    if not fam.members:
        return frozenset()
    _ring_verify(fam)
    cost = (
        {eid: fam.graph.cost_of(eid) for eid in fam.ground}
        if costs is None
        else {eid: float(costs[eid]) for eid in fam.ground}
    )
    ground = sorted(fam.ground)
    rows = []
    for mask in fam.members:
        row = frozenset(fam.boundary_in(mask, ground))
        if not row:
            raise Uncoverable(
                f"{fam.label}: member {VertexCut(fam.graph.n, mask).vertices()} "
                "has empty candidate boundary"
            )
        rows.append(row)
    picked, ilp = exact_cover(rows, cost)
    lp = _covering_lp_bound(rows, cost)
    if ilp > lp + 1e-6 * max(1.0, abs(ilp)):
        raise NotRingFamily(
            f"{fam.label}: covering LP optimum {lp} is fractional below ILP {ilp}"
        )
    return picked


def _covering_lp_bound(rows: Sequence[frozenset], costs: Mapping[int, float]) -> float:
    from .simplex import SimplexStatus, solve_dense_lp

    universe = sorted(set().union(*rows))
    col = {e: j for j, e in enumerate(universe)}
    obj = [costs[e] for e in universe]
    lp_rows = [([(col[e], 1.0) for e in sorted(r)], 1.0) for r in rows]
    status, x, objective = solve_dense_lp(obj, lp_rows, upper_bounds=1.0)
    if status is not SimplexStatus.OPTIMAL:
        raise Uncoverable("covering LP infeasible")
    return objective


# -- uncrossability -----------------------------------------------------------

def uncross_pair_ok(membership: Callable[[int], bool], a: int, b: int) -> bool:
    """The defining disjunction for one member pair: both corner sets stay
    in the family under (intersection, union) or under both differences."""
    return (membership(a & b) and membership(a | b)) or (
        membership(a & ~b) and membership(b & ~a)
    )


def check_uncrossable(
    fam: CutFamily, domain: Iterable[int] | None = None
) -> tuple[bool, tuple[VertexCut, VertexCut] | None]:
    """Enumerate member pairs over the full cut domain and test uncrossing.

    ``domain`` defaults to every nonempty proper subset of the vertices, so
    both orientations of each member are examined, exactly as the raw
    definition reads.  Returns the first violating (A, B) if any.
    """
    n = fam.graph.n
    if domain is None:
        domain = range(1, (1 << n) - 1)
    members = [m for m in domain if fam.membership(m)]
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if not uncross_pair_ok(fam.membership, a, b):
                return False, (VertexCut(n, a), VertexCut(n, b))
    return True, None
