import itertools
from random import Random

import pytest

from faultnet.cover import (
    CutFamily,
    check_uncrossable,
    exact_cover,
    primal_dual_cover,
    ring_cover_exact,
    uncross_pair_ok,
)
from faultnet.errors import NotRingFamily, Uncoverable
from faultnet.exact import exact_solve
from faultnet.flexalg import make_fgc_plan, _stage_families
from faultnet.graph import FaultGraph, boundary_counts
from faultnet.instances import (
    figure_1_instance,
    figure_3_instance,
    figure_4_instance,
    generate,
)
from faultnet.oracles import (
    FlexRequirement,
    Problem,
    fgc_requirements,
    violated_cuts_flex_aug,
)
from oracle_utils import brute_set_cover


def family_from_members(g, members, ground=None):
    mem = frozenset(members)
    return CutFamily(
        graph=g,
        members=tuple(sorted(mem)),
        membership=lambda mask: mask in mem,
        ground=frozenset(ground if ground is not None else g.all_edge_ids()),
        label="test",
    )


def family_rows(fam):
    return [frozenset(fam.boundary_in(m, fam.ground)) for m in fam.members]


def fgc_instance(seed, n=6, m=14, p=2, q=2, skeleton="mixed"):
    cycles = (p + 1) // 2
    if skeleton == "mixed":
        cycles = max(cycles, (p + q + 1) // 2)
    m = max(m, cycles * n + 4)
    inst = generate(
        "random-multigraph",
        n=n,
        m=m,
        seed=seed,
        params={"problem": "fgc", "p": p, "q": q, "skeleton": skeleton},
    )
    return inst.to_graph()


class TestPrimalDual:
    def test_single_member_picks_cheapest_crossing_edge(self):
        g = FaultGraph(
            3, [(0, 1, 5.0, "safe"), (0, 1, 2.0, "safe"), (1, 2, 1.0, "safe")]
        )
        fam = family_from_members(g, {0b001})
        result = primal_dual_cover(fam)
        assert result.edges == {1}
        assert result.dual_lower_bound == 2.0

    @pytest.mark.parametrize("seed", range(6))
    def test_21_fgc_family_within_twice_exact(self, seed):
        g = fgc_instance(seed, p=2, q=1)
        base, _ = exact_solve(g, Problem("flex", flex=fgc_requirements(6, 2, 0)))
        fam = violated_cuts_flex_aug(g, fgc_requirements(6, 2, 1), base)
        if not fam.members:
            pytest.skip("no violated cuts")
        result = primal_dual_cover(fam)
        _best, opt = exact_cover(
            family_rows(fam), {eid: g.cost_of(eid) for eid in fam.ground}
        )
        assert g.total_cost(result.edges) <= 2 * opt + 1e-9
        assert result.dual_lower_bound <= opt + 1e-9

    @pytest.mark.parametrize("seed", range(4))
    def test_staged_2q_within_2q_plus_2(self, seed):
        # End-to-end (2, q) runs match the staged analysis bound.
        q = 2
        g = fgc_instance(seed + 20, p=2, q=q)
        prob = Problem("flex", flex=fgc_requirements(6, 2, q))
        _sol, opt = exact_solve(g, prob)
        from faultnet.flexalg import solve_fgc

        sol = solve_fgc(g, 2, q)
        assert g.total_cost(sol) <= (2 * q + 2) * opt + 1e-9

    def test_certificate_and_minimality(self):
        for seed in range(5):
            g = fgc_instance(seed + 40, p=2, q=2)
            base, _ = exact_solve(g, Problem("flex", flex=fgc_requirements(6, 2, 1)))
            fam = violated_cuts_flex_aug(g, fgc_requirements(6, 2, 2), base)
            if not fam.members:
                continue
            result = primal_dual_cover(fam)
            assert fam.minimal_violated(result.edges) == []
            assert g.total_cost(result.edges) <= 2 * result.dual_lower_bound + 1e-9
            for eid in result.edges:
                assert fam.minimal_violated(result.edges - {eid}) != []

    def test_uncoverable(self):
        g = FaultGraph(3, [(0, 1, 1.0, "safe"), (1, 2, 1.0, "safe")])
        fam = family_from_members(g, {0b001}, ground={1})  # edge 1 misses the cut
        with pytest.raises(Uncoverable):
            primal_dual_cover(fam)


class TestRingCoverExact:
    def test_nested_chain_shared_edge(self):
        # chain 0-1-2-3 plus a long chord 0-3; nested cuts {0},{0,1},{0,1,2}
        g = FaultGraph(
            4,
            [
                (0, 1, 3.0, "safe"),
                (1, 2, 4.0, "safe"),
                (2, 3, 5.0, "safe"),
                (0, 3, 2.0, "safe"),
            ],
        )
        fam = family_from_members(g, {0b0001, 0b0011, 0b0111}, ground={3})
        assert ring_cover_exact(fam) == {3}

    def test_path_families_match_brute_force_ilp(self):
        # Ring subfamilies harvested from real (2, 2) single-pair seeds:
        # the exact cover must equal the subset-enumeration ILP optimum.
        from faultnet.flexalg import StagePlan, _violated_membership, membership_ciq
        from faultnet.flow import flow_decompose, min_cost_flow

        checked = 0
        for seed in range(20):
            inst = generate(
                "random-multigraph",
                n=6,
                m=16,
                seed=seed,
                params={
                    "problem": "flex-st",
                    "p": 2,
                    "q": 2,
                    "skeleton": "mixed",
                    "safe_prob": 0.3,
                },
            )
            g = inst.to_graph()
            caps = [2 if e.safe else 1 for e in g.edges]
            seed_set = min_cost_flow(g, caps, 0, 5, 4).support()
            plan = StagePlan(p=2, q=2, scope="st", s=0, t=5)
            membership = _violated_membership(g, seed_set, plan)
            from faultnet.graph import st_cut_masks

            violated = [m for m in st_cut_masks(g.n, 0, 5) if membership(m)]
            if not violated:
                continue
            seed_caps = [caps[eid] if eid in seed_set else 0 for eid in range(g.m)]
            paths = flow_decompose(g, min_cost_flow(g, seed_caps, 0, 5, 4))
            ground = g.all_edge_ids() - seed_set
            for idx in range(3):
                Q = (paths[idx],)
                members = [
                    m
                    for m in violated
                    if membership_ciq(g, m, Q, seed_set, 2, 2, 0, 5)
                ]
                if not members:
                    continue
                fam = family_from_members(g, members, ground=ground)
                got = ring_cover_exact(fam)
                rows = family_rows(fam)
                best = brute_set_cover(
                    rows, {eid: g.cost_of(eid) for eid in g.all_edge_ids()}
                )
                assert abs(g.total_cost(got) - best[0]) < 1e-9
                checked += 1
            if checked >= 6:
                break
        assert checked >= 3

    def test_not_ring_family_two_minimal(self):
        g = FaultGraph(4, [(0, 1, 1, "safe"), (1, 2, 1, "safe"), (2, 3, 1, "safe")])
        fam = family_from_members(g, {0b0001, 0b0100})
        with pytest.raises(NotRingFamily):
            ring_cover_exact(fam)

    def test_not_ring_family_closure(self):
        # properly intersecting members whose intersection is missing
        g = FaultGraph(4, [(0, 1, 1, "safe"), (1, 2, 1, "safe"), (2, 3, 1, "safe"), (0, 3, 1, "safe")])
        fam = family_from_members(g, {0b0001, 0b0011, 0b1001})
        with pytest.raises(NotRingFamily):
            ring_cover_exact(fam)

    def test_uncoverable_member(self):
        g = FaultGraph(3, [(0, 1, 1.0, "safe"), (1, 2, 1.0, "safe")])
        fam = family_from_members(g, {0b001}, ground={1})
        with pytest.raises(Uncoverable):
            ring_cover_exact(fam)


class TestExactCover:
    @pytest.mark.parametrize("seed", range(6))
    def test_matches_subset_enumeration(self, seed):
        rng = Random(seed)
        universe = list(range(8))
        rows = []
        for _ in range(rng.randint(2, 5)):
            size = rng.randint(1, 4)
            rows.append(frozenset(rng.sample(universe, size)))
        costs = {e: round(rng.uniform(0.5, 3.0), 3) for e in universe}
        got_set, got_cost = exact_cover(rows, costs)
        best_cost, _best_set = brute_set_cover(rows, costs)
        assert abs(got_cost - best_cost) < 1e-9
        assert all(got_set & set(r) for r in rows)


class TestUncrossable:
    @pytest.mark.parametrize("q", [1, 2, 3, 4])
    def test_2q_families_uncrossable(self, q):
        # Lifting (2, q-1) to (2, q): the whole violated family uncrosses.
        for seed in range(4):
            g = fgc_instance(seed + q * 10, p=2, q=q)
            base, _ = exact_solve(
                g, Problem("flex", flex=fgc_requirements(6, 2, q - 1))
            )
            fam = violated_cuts_flex_aug(g, fgc_requirements(6, 2, q), base)
            ok, _pair = check_uncrossable(fam)
            assert ok

    def test_figure_1_counterexample(self):
        inst = figure_1_instance()
        g = inst.to_graph()
        fam = violated_cuts_flex_aug(g, fgc_requirements(4, 3, 2), g.all_edge_ids())
        ok, pair = check_uncrossable(fam)
        assert not ok
        assert {pair[0].mask, pair[1].mask} == {0b0011, 0b0110}
        assert not uncross_pair_ok(fam.membership, 0b0011, 0b0110)

    def test_figure_3_counterexample(self):
        inst = figure_3_instance()
        g = inst.to_graph()
        fam = violated_cuts_flex_aug(g, fgc_requirements(4, 3, 4), g.all_edge_ids())
        ok, pair = check_uncrossable(fam)
        assert not ok
        assert not uncross_pair_ok(fam.membership, 0b0011, 0b0110)

    def test_figure_4_counterexample_in_stage_c3(self):
        inst = figure_4_instance()
        g = inst.to_graph()
        F = g.all_edge_ids()
        fam = violated_cuts_flex_aug(g, fgc_requirements(4, 4, 5), F)
        # Both named cuts carry exactly 3 safe edges (stage family C_3).
        for mask in (0b0011, 0b0110):
            assert fam.membership(mask)
            assert boundary_counts(g, F, mask)[0] == 3
        ok, _pair = check_uncrossable(fam)
        assert not ok
        assert not uncross_pair_ok(fam.membership, 0b0011, 0b0110)

    def test_lemma_structure_corner_boundaries(self):
        # Member pairs whose intersection/union (or both differences) carry
        # exactly p+q-1 edges must uncross.
        p, q = 2, 2
        for seed in range(4):
            g = fgc_instance(seed + 60, p=p, q=q)
            base, _ = exact_solve(
                g, Problem("flex", flex=fgc_requirements(6, p, q - 1))
            )
            fam = violated_cuts_flex_aug(g, fgc_requirements(6, p, q), base)
            members = [m for m in range(1, (1 << g.n) - 1) if fam.membership(m)]
            for a, b in itertools.combinations(members, 2):
                du = boundary_counts(g, base, a | b)[1]
                di = boundary_counts(g, base, a & b)[1]
                dab = boundary_counts(g, base, a & ~b)[1]
                dba = boundary_counts(g, base, b & ~a)[1]
                if (du == di == p + q - 1) or (dab == dba == p + q - 1):
                    assert uncross_pair_ok(fam.membership, a, b)

    @pytest.mark.parametrize("p,q", [(3, 2), (3, 3), (4, 2), (4, 3)])
    def test_stage_families_uncrossable_q_le_3(self, p, q):
        # Each stage family constructed during a real staged run uncrosses.
        g = fgc_instance(p * 17 + q, n=6, m=max(14, ((p + 1) // 2) * 6 + 6), p=p, q=q)
        base, _ = exact_solve(g, Problem("flex", flex=fgc_requirements(6, p, q - 1)))
        plan = make_fgc_plan(p, q)
        F = frozenset(base)
        for spec in plan.stages:
            for fam in _stage_families(g, F, plan, spec):
                ok, _ = check_uncrossable(fam)
                assert ok
                F = F | primal_dual_cover(fam).edges

    def test_stage_families_uncrossable_q4_even_p(self):
        p, q = 4, 4
        g = fgc_instance(91, n=6, m=18, p=p, q=q)
        base, _ = exact_solve(g, Problem("flex", flex=fgc_requirements(6, p, 3)))
        plan = make_fgc_plan(p, q)
        F = frozenset(base)
        for spec in plan.stages:
            for fam in _stage_families(g, F, plan, spec):
                ok, _ = check_uncrossable(fam)
                assert ok
                F = F | primal_dual_cover(fam).edges
