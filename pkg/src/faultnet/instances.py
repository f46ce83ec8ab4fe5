"""Instance files: a diff-friendly text format plus the built-in generators.

Format (UTF-8, line-oriented, canonical field order)::

    faultnet-instance 1
    vertices 5
    edges 9
    e 0 0 2 0.5 unsafe          # id u v cost safety
    ...
    problem flex
    flexpair 0 1 1 2            # s t p q
    end

Problem blocks: ``flex`` (flexpair lines), ``bulk`` (scenario lines of the
form ``scenario 0,1 | 2-3 4-5`` with ``-`` for an empty failure set), and
``rsndp`` (relpair s t r lines).  parse(serialize(x)) == x.

Generators are pure functions of (kind, parameters, seed); random kinds
certify the produced graph feasible for their target problem via the
oracles before returning, retrying with derived seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from .errors import CannotSatisfyFeasibility, ParseError
from .graph import SAFE, UNSAFE, FaultGraph
from .oracles import (
    BulkScenario,
    FlexRequirement,
    Problem,
    RelativeRequirement,
    check_problem_feasible,
    fgc_requirements,
    is_bulk_feasible,
)

FORMAT_NAME = "faultnet-instance"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class InstanceFile:
    """Parsed instance: graph payload plus exactly one problem block."""

    n: int
    edge_specs: tuple[tuple[int, int, float, str], ...]
    problem: Problem
    version: int = FORMAT_VERSION

    def to_graph(self) -> FaultGraph:
        return FaultGraph(self.n, self.edge_specs)


def serialize(inst: InstanceFile) -> str:
    lines = [f"{FORMAT_NAME} {inst.version}"]
    lines.append(f"vertices {inst.n}")
    lines.append(f"edges {len(inst.edge_specs)}")
    for eid, (u, v, cost, safety) in enumerate(inst.edge_specs):
        lines.append(f"e {eid} {u} {v} {cost!r} {safety}")
    prob = inst.problem
    lines.append(f"problem {prob.kind}")
    if prob.kind == "flex":
        for r in prob.flex:
            lines.append(f"flexpair {r.s} {r.t} {r.p} {r.q}")
    elif prob.kind == "bulk":
        for sc in prob.scenarios:
            fail = ",".join(str(e) for e in sorted(sc.fail)) or "-"
            pairs = " ".join(f"{u}-{v}" for u, v in sc.pairs)
            lines.append(f"scenario {fail} | {pairs}")
    else:
        for r in prob.relative:
            lines.append(f"relpair {r.s} {r.t} {r.r}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse(text: str) -> InstanceFile:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty instance file")
    it = iter(lines)

    def expect(prefix: str) -> list[str]:
        try:
            ln = next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, wanted {prefix!r}")
        parts = ln.split()
        if parts[0] != prefix:
            raise ParseError(f"expected {prefix!r}, got {ln!r}")
        return parts

    head = expect(FORMAT_NAME)
    if len(head) != 2 or head[1] != str(FORMAT_VERSION):
        raise ParseError(f"unsupported format header {head!r}")
    n = int(expect("vertices")[1])
    m = int(expect("edges")[1])
    specs = []
    for i in range(m):
        parts = expect("e")
        if len(parts) != 6:
            raise ParseError(f"bad edge line {parts!r}")
        eid, u, v = int(parts[1]), int(parts[2]), int(parts[3])
        if eid != i:
            raise ParseError(f"edge ids must be dense; got {eid}, wanted {i}")
        cost = float(parts[4])
        safety = parts[5]
        if safety not in (SAFE, UNSAFE):
            raise ParseError(f"bad safety label {safety!r}")
        specs.append((u, v, cost, safety))
    kind = expect("problem")[1]
    flex: list[FlexRequirement] = []
    scenarios: list[BulkScenario] = []
    relative: list[RelativeRequirement] = []
    while True:
        try:
            ln = next(it)
        except StopIteration:
            raise ParseError("missing 'end' line")
        if ln == "end":
            break
        parts = ln.split()
        try:
            if kind == "flex" and parts[0] == "flexpair":
                flex.append(
                    FlexRequirement(
                        int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4])
                    )
                )
            elif kind == "bulk" and parts[0] == "scenario":
                rest = ln[len("scenario") :].strip()
                fail_part, _, pair_part = rest.partition("|")
                fail_part = fail_part.strip()
                fail = (
                    frozenset()
                    if fail_part == "-"
                    else frozenset(int(x) for x in fail_part.split(","))
                )
                pairs = []
                for token in pair_part.split():
                    a, _, b = token.partition("-")
                    pairs.append((int(a), int(b)))
                scenarios.append(BulkScenario(fail, tuple(pairs)))
            elif kind == "rsndp" and parts[0] == "relpair":
                relative.append(
                    RelativeRequirement(int(parts[1]), int(parts[2]), int(parts[3]))
                )
            else:
                raise ParseError(f"unexpected line in {kind} block: {ln!r}")
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad line {ln!r}: {exc}") from exc
    problem = Problem(kind, flex=tuple(flex), scenarios=tuple(scenarios), relative=tuple(relative))
    inst = InstanceFile(n=n, edge_specs=tuple(specs), problem=problem)
    inst.to_graph()  # validates endpoints, costs, self-loops
    return inst


# -- fixed constructions -------------------------------------------------------

def appendix_a_instance(k: int) -> InstanceFile:
    """The (1, k) single-pair integrality-gap construction.

    Vertices s=0, t=1 and v_1..v_{k+1}; per middle vertex two parallel
    unsafe s-v edges of cost 1/2 and one safe v-t edge of cost k+1.  Edge
    ids per block i: 3i, 3i+1 unsafe, 3i+2 safe.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    specs = []
    for i in range(k + 1):
        v = 2 + i
        specs.append((0, v, 0.5, UNSAFE))
        specs.append((0, v, 0.5, UNSAFE))
        specs.append((v, 1, float(k + 1), SAFE))
    problem = Problem("flex", flex=(FlexRequirement(0, 1, 1, k),))
    return InstanceFile(n=k + 3, edge_specs=tuple(specs), problem=problem)


def _figure_instance(safe_counts, unsafe_counts, p, q) -> InstanceFile:
    """Counterexample graphs on vertices x1=0, x2=1, x3=2, y=3, given
    parallel-edge multiplicities per vertex pair."""
    specs = []
    for (u, v), count in sorted(safe_counts.items()):
        specs.extend([(u, v, 1.0, SAFE)] * count)
    for (u, v), count in sorted(unsafe_counts.items()):
        specs.extend([(u, v, 1.0, UNSAFE)] * count)
    problem = Problem("flex", flex=fgc_requirements(4, p, q))
    return InstanceFile(n=4, edge_specs=tuple(specs), problem=problem)


def figure_1_instance() -> InstanceFile:
    """Spanning counterexample: lifting (3, 1) to (3, 2) is not uncrossable.

    A = {x1, x2} and B = {x2, x3} are each crossed by two safe and two
    unsafe edges; their union and B - A are each crossed by three safe
    edges, so neither is violated."""
    return _figure_instance(
        safe_counts={(0, 3): 1, (2, 3): 2, (1, 2): 1},
        unsafe_counts={(0, 1): 2, (0, 3): 1, (1, 2): 1},
        p=3,
        q=2,
    )


def figure_3_instance() -> InstanceFile:
    """Spanning counterexample: lifting (3, 3) to (3, 4) fails for odd p.

    A and B are crossed by p-1 = 2 safe and 4 unsafe edges; the union and
    B - A carry p safe edges while the intersection and A - B carry p+4
    total edges."""
    return _figure_instance(
        safe_counts={(0, 3): 1, (2, 3): 2, (1, 2): 1},
        unsafe_counts={(0, 1): 4, (0, 3): 2, (1, 2): 2},
        p=3,
        q=4,
    )


def figure_4_instance() -> InstanceFile:
    """Spanning counterexample: lifting (4, 4) to (4, 5), stage family C_3.

    A and B are each crossed by 3 safe and 5 unsafe edges; the union and
    B - A have at least 4 safe edges, the intersection and A - B have 9
    total edges."""
    return _figure_instance(
        safe_counts={(0, 3): 1, (2, 3): 3, (1, 2): 2},
        unsafe_counts={(0, 1): 5, (0, 3): 3, (1, 2): 2},
        p=4,
        q=5,
    )


# -- random generators -----------------------------------------------------------

def _random_connected_specs(rng: Random, n: int, m: int, kind: str, params: dict):
    """Edge specs with a feasibility skeleton plus random extras.

    Skeleton: enough random Hamiltonian cycles to certify the target flex
    level by construction ("safe": ceil(p/2) all-safe cycles; "mixed":
    ceil((p+q)/2) cycles with only the first ceil(p/2) safe).  Extras get
    random endpoints, costs and labels.
    """
    p = params.get("p", 1)
    q = params.get("q", 0)
    skeleton = params.get("skeleton", "safe")
    geometric = kind == "random-geometric"
    points = [(rng.random(), rng.random()) for _ in range(n)] if geometric else None

    def cost_of(u, v):
        if geometric:
            dx = points[u][0] - points[v][0]
            dy = points[u][1] - points[v][1]
            return round((dx * dx + dy * dy) ** 0.5, 6)
        return round(rng.uniform(0.2, 2.0), 3)

    specs = []
    safe_cycles = (p + 1) // 2
    cycles = safe_cycles if skeleton == "safe" else max(safe_cycles, (p + q + 1) // 2)
    if cycles * n > m:
        raise ValueError(
            f"m={m} too small for the feasibility skeleton ({cycles} cycles on {n} vertices)"
        )
    for c in range(cycles):
        perm = list(range(n))
        rng.shuffle(perm)
        label = SAFE if c < safe_cycles else UNSAFE
        for i in range(n):
            specs.append((perm[i], perm[(i + 1) % n], cost_of(perm[i], perm[(i + 1) % n]), label))
    safe_prob = params.get("safe_prob", 0.5)
    while len(specs) < m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        label = SAFE if rng.random() < safe_prob else UNSAFE
        specs.append((u, v, cost_of(u, v), label))
    return specs


def _random_problem(rng: Random, g: FaultGraph, params: dict) -> Problem:
    target = params.get("problem", "fgc")
    n = g.n
    if target == "fgc":
        return Problem("flex", flex=fgc_requirements(n, params.get("p", 1), params.get("q", 0)))
    if target == "flex-st":
        return Problem(
            "flex",
            flex=(FlexRequirement(0, n - 1, params.get("p", 1), params.get("q", 0)),),
        )
    if target == "flex-sndp":
        reqs = []
        for s, t, p, q in params["pairs"]:
            reqs.append(FlexRequirement(s, t, p, q))
        return Problem("flex", flex=tuple(reqs))
    if target == "bulk":
        width = params.get("width", 1)
        count = params.get("scenarios", 4)
        scens = []
        attempts = 0
        while len(scens) < count and attempts < 50 * count:
            attempts += 1
            w = rng.randint(0, width)
            fail = frozenset(rng.sample(range(g.m), w)) if w else frozenset()
            pairs = set()
            for _ in range(rng.randint(1, params.get("pairs", 2))):
                u = rng.randrange(n)
                v = rng.randrange(n)
                if u != v:
                    pairs.add((min(u, v), max(u, v)))
            if not pairs:
                continue
            sc = BulkScenario(fail, tuple(sorted(pairs)))
            ok, _ = is_bulk_feasible(g, [sc], g.all_edge_ids())
            if ok:
                scens.append(sc)
        if not scens:
            raise CannotSatisfyFeasibility("no satisfiable scenario found")
        return Problem("bulk", scenarios=tuple(scens))
    if target == "rsndp":
        reqs = []
        count = params.get("pairs", 2)
        r = params.get("r", 2)
        seen = set()
        while len(reqs) < count:
            u = rng.randrange(n)
            v = rng.randrange(n)
            if u == v or (min(u, v), max(u, v)) in seen:
                continue
            seen.add((min(u, v), max(u, v)))
            reqs.append(RelativeRequirement(min(u, v), max(u, v), rng.randint(1, r)))
        return Problem("rsndp", relative=tuple(reqs))
    raise ValueError(f"unknown target problem {target!r}")


MAX_GENERATE_ATTEMPTS = 200


def generate(
    kind: str,
    n: int | None = None,
    m: int | None = None,
    seed: int = 0,
    params: dict | None = None,
) -> InstanceFile:
    """Build an instance of the given kind, certified feasible by the oracle.

    Kinds: random-multigraph, random-geometric (both honoring
    params["problem"]), appendix-a (params["k"]), figure-1, figure-3,
    figure-4.
    """
    params = dict(params or {})
    if kind == "appendix-a":
        return appendix_a_instance(int(params.get("k", 2)))
    if kind == "figure-1":
        return figure_1_instance()
    if kind == "figure-3":
        return figure_3_instance()
    if kind == "figure-4":
        return figure_4_instance()
    if kind not in ("random-multigraph", "random-geometric"):
        raise ValueError(f"unknown instance kind {kind!r}")
    if n is None or m is None:
        raise ValueError("random kinds need n and m")
    for attempt in range(MAX_GENERATE_ATTEMPTS):
        rng = Random((seed, kind, attempt).__repr__())
        specs = _random_connected_specs(rng, n, m, kind, params)
        if len(specs) < m:
            continue
        g = FaultGraph(n, specs)
        try:
            problem = _random_problem(rng, g, params)
        except CannotSatisfyFeasibility:
            continue
        ok, _ = check_problem_feasible(g, problem, g.all_edge_ids())
        if ok:
            return InstanceFile(n=n, edge_specs=tuple(specs), problem=problem)
    raise CannotSatisfyFeasibility(
        f"no feasible {kind} instance after {MAX_GENERATE_ATTEMPTS} attempts"
    )
