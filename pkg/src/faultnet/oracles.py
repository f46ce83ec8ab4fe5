"""Ground-truth feasibility oracles and violated-structure enumerators.

Three fault models share the same verification style: exhaustively sweep the
relevant failure/cut space and either certify feasibility or return a
constructive witness.  Oracles here are deliberately the slow, definitional
kind; every algorithm in the package is validated against them.

Key equivalence used throughout (Menger): a pair (s, t) is (p, q)-flex-
connected in H iff every s-t cut has at least p safe edges or at least p+q
total edges of H on its boundary.  The sweeps below test that cut form and
construct the failing edge set B from a violating cut when asked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .cover import CutFamily
from .errors import (
    BaseNotFeasible,
    EnumerationTooLarge,
    PriorLevelNotSatisfied,
    WidthBudgetExceeded,
)
from .graph import (
    FaultGraph,
    VertexCut,
    boundary,
    connected_components,
    enumeration_budget,
    same_component,
    spanning_cut_masks,
    st_cut_masks,
)


# -- requirement types -----------------------------------------------------

@dataclass(frozen=True)
class FlexRequirement:
    """Pair (s, t) must stay p-edge-connected after any <= q unsafe failures."""

    s: int
    t: int
    p: int
    q: int

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError("s == t in flex requirement")
        if self.p < 1 or self.q < 0:
            raise ValueError("need p >= 1 and q >= 0")


@dataclass(frozen=True)
class BulkScenario:
    """Failure set F_j with the terminal pairs that must survive it."""

    fail: frozenset
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("scenario with no pairs")


@dataclass(frozen=True)
class RelativeRequirement:
    """Pair (s, t) must match G's connectivity under every |F| < r."""

    s: int
    t: int
    r: int

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError("s == t in relative requirement")
        if self.r < 1:
            raise ValueError("need r >= 1")


def fgc_requirements(n: int, p: int, q: int) -> tuple[FlexRequirement, ...]:
    """All-pairs uniform (p, q) requirements: the spanning/global problem."""
    return tuple(
        FlexRequirement(u, v, p, q) for u in range(n) for v in range(u + 1, n)
    )


@dataclass(frozen=True)
class Problem:
    """One instance's requirement block: exactly one fault model."""

    kind: str  # "flex" | "bulk" | "rsndp"
    flex: tuple[FlexRequirement, ...] = ()
    scenarios: tuple[BulkScenario, ...] = ()
    relative: tuple[RelativeRequirement, ...] = ()

    def __post_init__(self):
        if self.kind not in ("flex", "bulk", "rsndp"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        payloads = {
            "flex": self.flex,
            "bulk": self.scenarios,
            "rsndp": self.relative,
        }
        if not payloads[self.kind]:
            raise ValueError(f"{self.kind} problem with empty requirements")

    def is_uniform_flex(self) -> bool:
        return self.kind == "flex" and len({(r.p, r.q) for r in self.flex}) == 1

    def is_fgc(self, n: int) -> bool:
        """All-pairs uniform flex requirements: the spanning problem."""
        if not self.is_uniform_flex():
            return False
        pairs = {(min(r.s, r.t), max(r.s, r.t)) for r in self.flex}
        return pairs == {(u, v) for u in range(n) for v in range(u + 1, n)}


def check_problem_feasible(g: FaultGraph, problem: Problem, H: Iterable[int]):
    """(ok, witness) for H under whichever fault model the problem uses."""
    if problem.kind == "flex":
        return is_flex_feasible(g, problem.flex, H)
    if problem.kind == "bulk":
        return is_bulk_feasible(g, problem.scenarios, H)
    return is_rsndp_feasible(g, problem.relative, H)


# -- witnesses ---------------------------------------------------------------

@dataclass(frozen=True)
class FlexWitness:
    requirement: FlexRequirement
    removed: frozenset  # the unsafe failure set B
    cut: VertexCut


@dataclass(frozen=True)
class BulkWitness:
    scenario_index: int
    pair: tuple[int, int]


@dataclass(frozen=True)
class RsndpWitness:
    requirement: RelativeRequirement
    fail: frozenset


# -- flex feasibility --------------------------------------------------------

def _guard_sweep(n: int):
    if (1 << n) > enumeration_budget():
        raise EnumerationTooLarge(f"2^{n} cuts exceed the enumeration budget")


def is_flex_feasible(
    g: FaultGraph, reqs: Sequence[FlexRequirement], H: Iterable[int]
) -> tuple[bool, FlexWitness | None]:
    """Check every requirement against every <= q_i unsafe failure set.

    Uses the cut form of the definition (sweep all s-t cuts; a cut is bad for
    requirement i when it has fewer than p_i safe edges and fewer than
    p_i + q_i total edges).  On failure returns the witness (B, cut) with B
    the worst unsafe edges on the violating boundary.
    """
    _guard_sweep(g.n)
    H = frozenset(H)
    edges = [g.edges[eid] for eid in sorted(H)]
    for req in reqs:
        for mask in st_cut_masks(g.n, req.s, req.t):
            safe = 0
            total = 0
            for e in edges:
                if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                    total += 1
                    if e.safe:
                        safe += 1
            unsafe = total - safe
            if total - min(req.q, unsafe) < req.p:
                bad_unsafe = sorted(
                    e.id
                    for e in edges
                    if not e.safe and ((mask >> e.u) ^ (mask >> e.v)) & 1
                )
                B = frozenset(bad_unsafe[: req.q])
                return False, FlexWitness(req, B, VertexCut(g.n, mask))
    return True, None


def is_bulk_feasible(
    g: FaultGraph, scenarios: Sequence[BulkScenario], H: Iterable[int]
) -> tuple[bool, BulkWitness | None]:
    """Every scenario's pairs must be connected in H minus its failure set."""
    H = frozenset(H)
    for j, sc in enumerate(scenarios):
        alive = H - sc.fail
        comps = connected_components(g, alive)
        comp_of = {}
        for ci, comp in enumerate(comps):
            for v in comp:
                comp_of[v] = ci
        for u, v in sc.pairs:
            if comp_of[u] != comp_of[v]:
                return False, BulkWitness(j, (u, v))
    return True, None


def is_rsndp_feasible(
    g: FaultGraph, reqs: Sequence[RelativeRequirement], H: Iterable[int]
) -> tuple[bool, RsndpWitness | None]:
    """Definition-level check: enumerate all F with |F| < max r_i."""
    H = frozenset(H)
    max_r = max((req.r for req in reqs), default=1)
    total = sum(comb(g.m, k) for k in range(max_r))
    if total > enumeration_budget():
        raise EnumerationTooLarge(
            f"{total} failure sets exceed the enumeration budget"
        )
    all_ids = sorted(g.all_edge_ids())
    for size in range(max_r):
        for combo in itertools.combinations(all_ids, size):
            F = frozenset(combo)
            g_alive = g.all_edge_ids() - F
            h_alive = H - F
            for req in reqs:
                if req.r <= size:
                    continue
                if same_component(g, g_alive, req.s, req.t) and not same_component(
                    g, h_alive, req.s, req.t
                ):
                    return False, RsndpWitness(req, F)
    return True, None


# -- violated cut family for flex augmentation -------------------------------

def violated_cuts_flex_aug(
    g: FaultGraph, reqs: Sequence[FlexRequirement], F1: Iterable[int]
) -> CutFamily:
    """Family of violated cuts when augmenting F1 from (p, q-1) to (p, q).

    A cut S is violated iff it separates some pair i, its F1-boundary has
    exactly p_i + q_i - 1 edges, and fewer than p_i of them are safe.
    Requires F1 feasible at (p_i, q_i - 1) for every pair; the returned
    family's canonical member orientation is the s-side for a single pair
    and the anchor-free side otherwise.
    """
    _guard_sweep(g.n)
    reqs = tuple(reqs)
    if not reqs:
        raise ValueError("no requirements")
    F1 = frozenset(F1)
    prior = [
        FlexRequirement(r.s, r.t, r.p, r.q - 1) for r in reqs if r.q >= 1
    ]
    ok, witness = is_flex_feasible(g, prior, F1)
    if not ok:
        raise BaseNotFeasible(f"F1 is not (p, q-1)-feasible: {witness}")
    f1_edges = [g.edges[eid] for eid in sorted(F1)]

    def membership(mask: int) -> bool:
        safe = 0
        total = 0
        for e in f1_edges:
            if ((mask >> e.u) ^ (mask >> e.v)) & 1:
                total += 1
                if e.safe:
                    safe += 1
        for r in reqs:
            if r.q < 1:
                continue
            if ((mask >> r.s) ^ (mask >> r.t)) & 1:
                if total == r.p + r.q - 1 and safe < r.p:
                    return True
        return False

    if len(reqs) == 1:
        masks = st_cut_masks(g.n, reqs[0].s, reqs[0].t)
    else:
        masks = spanning_cut_masks(g.n)
    members = tuple(sorted(m for m in masks if membership(m)))
    ground = g.all_edge_ids() - F1
    return CutFamily(
        graph=g,
        members=members,
        membership=membership,
        ground=ground,
        label=f"flex-aug({len(reqs)} reqs)",
    )


# -- bulk violated edge sets --------------------------------------------------

def _connected_pairs_ok(g, alive, pairs):
    comps = connected_components(g, alive)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    return [(u, v) for u, v in pairs if comp_of[u] != comp_of[v]]


def violating_edge_sets_bulk(
    g: FaultGraph,
    scenarios: Sequence[BulkScenario],
    H: Iterable[int],
    level: int,
) -> list[tuple[frozenset, tuple[int, int]]]:
    """All (F, pair) with F inside some scenario, |F| = level, pair cut off.

    Requires H to satisfy every sub-scenario of size < level; that makes
    each returned F minimal (no proper subset disconnects the pair).
    Results are deduplicated and sorted for reproducibility.
    """
    H = frozenset(H)
    # Precondition: all strictly smaller sub-failures already survived.
    for j, sc in enumerate(scenarios):
        fail = sorted(sc.fail)
        for size in range(min(level, len(fail) + 1)):
            for combo in itertools.combinations(fail, size):
                broken = _connected_pairs_ok(g, H - frozenset(combo), sc.pairs)
                if broken:
                    raise PriorLevelNotSatisfied(
                        f"scenario {j}: pair {broken[0]} cut by sub-failure {combo}"
                    )
    out = set()
    for sc in scenarios:
        fail = sorted(sc.fail)
        if len(fail) < level:
            continue
        for combo in itertools.combinations(fail, level):
            F = frozenset(combo)
            for pair in _connected_pairs_ok(g, H - F, sc.pairs):
                out.add((F, pair))
    return sorted(out, key=lambda fp: (sorted(fp[0]), fp[1]))


# -- expansions into the bulk model -------------------------------------------

def expand_flex_to_bulk(
    g: FaultGraph, reqs: Sequence[FlexRequirement]
) -> tuple[BulkScenario, ...]:
    """Explicit scenario list equivalent to the flex requirements.

    A failure set F threatens pair i iff |F| <= p_i + q_i - 1 and F contains
    at most p_i - 1 safe edges (split F into B = up to q_i unsafe edges and
    A = the at most p_i - 1 others).  Width is max(p_i + q_i - 1).
    """
    reqs = tuple(reqs)
    width = max(r.p + r.q - 1 for r in reqs)
    total = sum(comb(g.m, k) for k in range(width + 1))
    if total > enumeration_budget():
        raise WidthBudgetExceeded(f"{total} scenarios exceed the budget")
    all_ids = sorted(g.all_edge_ids())
    grouped: dict[frozenset, list[tuple[int, int]]] = {}
    for size in range(width + 1):
        for combo in itertools.combinations(all_ids, size):
            F = frozenset(combo)
            n_safe = len(F & g.safe_ids)
            pairs = [
                (r.s, r.t)
                for r in reqs
                if size <= r.p + r.q - 1 and n_safe <= r.p - 1
            ]
            if pairs:
                grouped[F] = pairs
    return tuple(
        BulkScenario(F, tuple(sorted(set(pairs))))
        for F, pairs in sorted(grouped.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
    )


def expand_rsndp_to_bulk(
    g: FaultGraph, reqs: Sequence[RelativeRequirement]
) -> tuple[BulkScenario, ...]:
    """Scenario list equivalent to the relative requirements.

    For each F with |F| <= max r_i - 1 keep the pairs with r_i > |F| that G
    itself still connects after removing F; empty scenarios are dropped.
    """
    reqs = tuple(reqs)
    width = max(r.r for r in reqs) - 1
    total = sum(comb(g.m, k) for k in range(width + 1))
    if total > enumeration_budget():
        raise WidthBudgetExceeded(f"{total} scenarios exceed the budget")
    all_ids = sorted(g.all_edge_ids())
    out = []
    for size in range(width + 1):
        for combo in itertools.combinations(all_ids, size):
            F = frozenset(combo)
            alive = g.all_edge_ids() - F
            pairs = [
                (r.s, r.t)
                for r in reqs
                if r.r > size and same_component(g, alive, r.s, r.t)
            ]
            if pairs:
                out.append(BulkScenario(F, tuple(sorted(set(pairs)))))
    return tuple(out)
