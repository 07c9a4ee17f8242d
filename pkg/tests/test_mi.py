import numpy as np
import pytest

from stepstone import problem as pb
from stepstone.geometry import contains
from stepstone.mi import solve_mi
from stepstone.oracle import enumerate_feasible
from stepstone.sl1m import PlanStatus, solve_sl1m

from _fixtures import random_instance, square, walk_instance


def gap_instance(n_phases=3, **kw):
    s0 = square(0.0, 1.0, -0.6, 0.6, sid=0)
    s1 = square(1.05, 2.0, -0.6, 0.6, sid=1)
    return walk_instance(
        [s0, s1], [(0, 1)] * n_phases,
        goal=pb.GoalSpec(targets=(((1.6, 0.0, 0.0), (0.4, 0.6, 0.2)),)), **kw,
    )


def unique_assignment_instance():
    """Exactly one of the 8 assignments is feasible: the goal pins the last

    two steps to surface 1 and the first step cannot reach past surface 0.
    """
    s0 = square(0.0, 0.7, -0.6, 0.6, sid=0)
    s1 = square(1.1, 2.2, -0.6, 0.6, sid=1)
    return walk_instance(
        [s0, s1], [(0, 1)] * 3, p0=(0.15, -0.15, 0.0),
        goal=pb.GoalSpec(surface=1),
    )


class TestSolveMi:
    def test_singleton_candidates_solved_at_root(self):
        inst = walk_instance([square(0, 2.2, -0.7, 0.7)], [(0,)] * 3)
        plan = solve_mi(inst)
        assert plan.status is PlanStatus.BRANCH_AND_BOUND
        assert plan.assignment == (0, 0, 0)
        assert plan.stats.nodes == 1

    def test_unique_assignment_matches_oracle(self):
        inst = unique_assignment_instance()
        oracle = enumerate_feasible(inst)
        assert len(oracle.assignments) == 1 and oracle.tested == 8
        plan = solve_mi(inst)
        assert plan.feasible
        assert plan.assignment == oracle.assignments[0] == (0, 1, 1)
        for k, sid in enumerate(plan.assignment):
            assert contains(inst.surfaces[sid], plan.positions[k], 1e-6)

    def test_infeasible_fathoms_whole_tree(self):
        inst = walk_instance(
            [square(0, 1, -0.6, 0.6), square(1.05, 2, -0.6, 0.6)],
            [(0, 1)] * 2,
            goal=pb.GoalSpec(targets=(((9.0, 0.0, 0.0), (0.1, 0.1, 0.1)),)),
        )
        assert not enumerate_feasible(inst).feasible
        plan = solve_mi(inst)
        assert plan.status is PlanStatus.INFEASIBLE
        assert plan.limit is None
        assert plan.stats.nodes <= 2 ** sum(len(p.candidates) for p in inst.phases)

    def test_node_limit_flags_incomplete(self):
        inst = gap_instance()
        plan = solve_mi(inst, node_limit=1)
        # root is fractional here, so one node cannot finish the search
        assert plan.status is PlanStatus.COMBINATORIAL_EXHAUSTED
        assert plan.limit == "nodes"

    def test_small_m_infeasible_where_relaxation_succeeds(self):
        s0 = square(0.0, 1.2, -0.6, 0.6, sid=0)
        s1 = square(10.0, 11.0, -0.6, 0.6, sid=1)
        inst = walk_instance(
            [s0, s1], [(0, 1)] * 2, p0=(0.4, -0.15, 0.0),
            goal=pb.GoalSpec(targets=(((0.7, 0.0, 0.0), (0.5, 0.7, 0.2)),)),
        )
        assert solve_sl1m(inst).feasible
        assert solve_mi(inst).feasible
        assert solve_mi(inst, big_m=0.5).status is PlanStatus.INFEASIBLE

    def test_agreement_with_oracle_randomized(self):
        rng = np.random.default_rng(314)
        for _ in range(15):
            inst = random_instance(rng)
            oracle = enumerate_feasible(inst)
            plan = solve_mi(inst)
            assert plan.limit is None
            assert plan.feasible == oracle.feasible
            if plan.feasible:
                assert plan.assignment in oracle.assignments


class TestSearchShape:
    def test_bound_monotone_down_every_path(self):
        inst = gap_instance(4, objective="goal_l1", gamma=0.01)
        log = []
        plan = solve_mi(inst, node_log=log)
        assert plan.feasible
        checked = 0
        for rec in log[1:]:
            if np.isnan(rec.bound) or np.isinf(rec.bound):
                continue
            assert rec.bound >= rec.parent_bound - 1e-9
            checked += 1
        assert checked > 0

    def test_deterministic_node_sequence(self):
        inst = gap_instance(4, objective="goal_l1", gamma=0.01)
        log_a, log_b = [], []
        a = solve_mi(inst, node_log=log_a)
        b = solve_mi(inst, node_log=log_b)
        assert log_a == log_b
        assert a.assignment == b.assignment
        assert a.positions.tobytes() == b.positions.tobytes()
        assert a.com.tobytes() == b.com.tobytes()
        assert a.stats.nodes == b.stats.nodes

    def test_objective_search_proves_optimum(self):
        # with a goal objective the search must keep going past the first
        # integral node and return the best one
        inst = gap_instance(3, objective="goal_l1", gamma=0.01)
        plan = solve_mi(inst)
        assert plan.feasible and plan.limit is None
        oracle = enumerate_feasible(inst)
        from stepstone import lp

        best = None
        for assignment in oracle.assignments:
            res = pb.build_fixed(inst, assignment, objective="goal_l1")
            sol = lp.solve(res.problem)
            assert sol.optimal
            if best is None or sol.objective < best[0] - 1e-9:
                best = (sol.objective, assignment)
        assert plan.assignment == best[1]
