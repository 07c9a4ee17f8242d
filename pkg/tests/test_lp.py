import numpy as np
import pytest

from stepstone.lp import (
    LpProblem,
    LpStatus,
    MalformedProblem,
    SolveOptions,
    check_feasible,
    dump_problem,
    solve,
)

from _oracles import lp_vertex_oracle, random_box_lp


def test_one_variable_bound():
    s = solve(LpProblem(c=[1.0], lb=[1.0], ub=[np.inf]))
    assert s.status is LpStatus.OPTIMAL
    assert s.x[0] == pytest.approx(1.0, abs=1e-9)
    assert s.objective == pytest.approx(1.0, abs=1e-9)


def test_contradictory_bounds_rows():
    p = LpProblem(c=[0.0], G=[[1.0], [-1.0]], h=[-1.0, -1.0])
    s = solve(p)
    assert s.status is LpStatus.INFEASIBLE


def test_simplex_face_tiebreak():
    p = LpProblem(c=[-1.0, -1.0], G=[[1.0, 1.0]], h=[1.0], lb=[0.0, 0.0])
    s = solve(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.objective == pytest.approx(-1.0, abs=1e-9)
    # lowest-index entering rule puts x first
    assert s.x == pytest.approx([1.0, 0.0], abs=1e-9)


def test_check_feasible_empty_constraints():
    ok, w = check_feasible(LpProblem(c=[0.0, 0.0]))
    assert ok
    assert w == pytest.approx([0.0, 0.0])


def test_check_feasible_crossed_rows():
    # x >= 1 and x <= 0
    p = LpProblem(c=[0.0], G=[[1.0], [-1.0]], h=[0.0, -1.0])
    ok, w = check_feasible(p)
    assert not ok and w is None


def test_check_feasible_box_overlap():
    # [1,2]^2 intersected with [1.5, 3]^2: witness must land in the overlap
    G = np.vstack([np.eye(2), -np.eye(2), np.eye(2), -np.eye(2)])
    h = np.array([2.0, 2.0, -1.0, -1.0, 3.0, 3.0, -1.5, -1.5])
    ok, w = check_feasible(LpProblem(c=[0.0, 0.0], G=G, h=h))
    assert ok
    assert (w >= 1.5 - 1e-9).all() and (w <= 2.0 + 1e-9).all()


def test_unbounded():
    s = solve(LpProblem(c=[-1.0], lb=[0.0]))
    assert s.status is LpStatus.UNBOUNDED


def test_iteration_limit_flagged():
    rng = np.random.default_rng(5)
    G = rng.normal(size=(40, 10))
    h = G @ rng.normal(size=10) + 1.0
    p = LpProblem(c=rng.normal(size=10), G=G, h=h, lb=np.full(10, -9.0), ub=np.full(10, 9.0))
    s = solve(p, SolveOptions(max_iters=2))
    assert s.status is LpStatus.ITERATION_LIMIT


@pytest.mark.parametrize(
    "bad",
    [
        dict(c=[np.nan]),
        dict(c=[1.0], G=[[1.0, 2.0]], h=[0.0]),
        dict(c=[1.0], lb=[2.0], ub=[1.0]),
        dict(c=[1.0], G=[[np.inf]], h=[0.0]),
    ],
)
def test_malformed(bad):
    with pytest.raises(MalformedProblem):
        solve(LpProblem(**bad))


def test_vertex_oracle_agreement():
    rng = np.random.default_rng(101)
    optima = 0
    for _ in range(80):
        c, G, h, A, b, lb, ub = random_box_lp(rng)
        want_status, want_obj = lp_vertex_oracle(c, G, h, A, b, lb, ub)
        s = solve(LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub))
        assert s.status.value == want_status
        if want_status == "optimal":
            assert s.objective == pytest.approx(want_obj, abs=1e-7)
            optima += 1
    assert optima >= 20  # the mix must exercise the optimal path


def test_determinism_bitwise():
    rng = np.random.default_rng(9)
    c, G, h, A, b, lb, ub = random_box_lp(rng)
    runs = [solve(LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub)) for _ in range(2)]
    assert runs[0].status == runs[1].status
    assert runs[0].iterations == runs[1].iterations
    assert np.array_equal(runs[0].x, runs[1].x)


def test_row_scaling_invariance():
    rng = np.random.default_rng(23)
    for _ in range(20):
        c, G, h, A, b, lb, ub = random_box_lp(rng)
        if G.shape[0] == 0:
            continue
        s1 = solve(LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub))
        lam = 137.0
        G2 = G.copy()
        h2 = h.copy()
        G2[0] *= lam
        h2[0] *= lam
        s2 = solve(LpProblem(c=c, G=G2, h=h2, A=A, b=b, lb=lb, ub=ub))
        assert s1.status == s2.status
        if s1.status is LpStatus.OPTIMAL:
            assert np.abs(s1.x - s2.x).max() <= 1e-7


def test_reduced_cost_signs_at_optimum():
    rng = np.random.default_rng(77)
    checked = 0
    for _ in range(40):
        c, G, h, A, b, lb, ub = random_box_lp(rng)
        s = solve(LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub))
        if s.status is not LpStatus.OPTIMAL or s.reduced_costs is None:
            continue
        z = s.reduced_costs
        at_lo = np.abs(s.x - lb) <= 1e-9
        at_up = np.abs(s.x - ub) <= 1e-9
        # minimization: at a lower bound the reduced cost cannot be negative
        assert (z[at_lo & ~at_up] >= -1e-6).all()
        assert (z[at_up & ~at_lo] <= 1e-6).all()
        checked += 1
    assert checked >= 10


def test_duplicate_equality_rows_ignored():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, -1.0]])
    b = np.array([1.0, 1.0, 0.0])
    s = solve(LpProblem(c=[1.0, 0.0], A=A, b=b, lb=[-5.0, -5.0], ub=[5.0, 5.0]))
    assert s.status is LpStatus.OPTIMAL
    assert s.x == pytest.approx([0.5, 0.5], abs=1e-9)


def test_residual_contract():
    rng = np.random.default_rng(301)
    for _ in range(30):
        c, G, h, A, b, lb, ub = random_box_lp(rng)
        s = solve(LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub))
        if s.status is not LpStatus.OPTIMAL:
            continue
        if G.shape[0]:
            assert (G @ s.x - h).max() <= 1e-7
        if A.shape[0]:
            assert np.abs(A @ s.x - b).max() <= 1e-7
        assert (lb - s.x).max() <= 1e-9
        assert (s.x - ub).max() <= 1e-9


def test_fixed_variable():
    p = LpProblem(c=[1.0, 1.0], G=[[-1.0, -1.0]], h=[-1.0], lb=[0.25, 0.0], ub=[0.25, np.inf])
    s = solve(p)
    assert s.status is LpStatus.OPTIMAL
    assert s.x[0] == pytest.approx(0.25)
    assert s.x[1] == pytest.approx(0.75, abs=1e-9)


def test_dump_problem(tmp_path):
    p = LpProblem(
        c=[1.0, -2.5],
        G=[[1.0, 0.0]],
        h=[3.0],
        A=[[0.0, 1.0]],
        b=[0.5],
        lb=[0.0, -np.inf],
        ub=[np.inf, 7.0],
    )
    out = tmp_path / "dump.lp.txt"
    dump_problem(p, out)
    text = out.read_text().splitlines()
    assert text[0] == "lp 1 vars 2 ineq 1 eq 1"
    assert text[1] == "obj 1 -2.5"
    assert text[2] == "ineq 1 0 <= 3"
    assert text[3] == "eq 0 1 == 0.5"
    assert text[4] == "bounds"
    assert text[5] == "0 inf"
    assert text[6] == "-inf 7"
