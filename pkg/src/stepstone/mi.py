"""Branch-and-bound baseline over the big-M formulation.

Plain depth-first tree search: relax the selectors to [0,1], solve the LP,
branch on the most fractional one, fathom on infeasibility, bound, or
integrality.  No cuts, no presolve, no warm starts; the point is a simple
reproducible reference that the relaxation pipeline is measured against,
not a competitive integer solver.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import lp
from .problem import ProblemInstance, build_fixed, build_mi
from .sl1m import Plan, PlanStatus, SolveStats

INT_TOL = 1e-6
BOUND_SLACK = 1e-9

DEFAULT_NODE_LIMIT = 50_000


@dataclass(frozen=True)
class NodeRecord:
    """One evaluated node, for determinism checks and debugging."""

    depth: int
    var: int                 # branched variable (-1 at the root)
    value: float
    parent_bound: float
    bound: float
    fate: str                # expanded | integral | infeasible | dominated | limit


@dataclass
class _Node:
    fixings: tuple           # ((var index, 0.0 or 1.0), ...)
    depth: int
    bound: float
    x: np.ndarray


def _selector_columns(layout) -> np.ndarray:
    return np.flatnonzero(layout.binary)


def _assignment_from(x: np.ndarray, layout, inst: ProblemInstance) -> tuple:
    out = []
    for k, spec in enumerate(inst.phases):
        y = x[layout.alpha(k)]
        out.append(spec.candidates[int(np.argmax(y))])
    return tuple(out)


def solve_mi(
    inst: ProblemInstance,
    big_m: Optional[float] = None,
    *,
    node_limit: int = DEFAULT_NODE_LIMIT,
    time_limit: Optional[float] = None,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
    node_log: Optional[list] = None,
) -> Plan:
    """Solve the surface assignment exactly (up to the node and time limits).

    Feasibility instances (no objective) stop at the first integral node;
    with an objective the search proves optimality or runs out of budget.
    Pass a list as ``node_log`` to capture one NodeRecord per evaluated node.
    The winning assignment gets a final fixed-surface re-solve, which strips
    the big-M slop from the returned positions.
    """
    t0 = time.perf_counter()
    inst.validate()
    res = build_mi(inst, big_m, share_orientation=share_orientation,
                   relative_foot_prev_anchor=relative_foot_prev_anchor)
    base = res.problem
    sel_cols = _selector_columns(res.layout)
    pure_feasibility = inst.effective_gamma == 0.0

    lp_solves = 0
    iterations = 0
    nodes = 0
    hit: Optional[str] = None
    root_bound: Optional[float] = None
    incumbent: Optional[tuple] = None   # (objective, assignment)

    def out_of_budget() -> Optional[str]:
        if nodes >= node_limit:
            return "nodes"
        if time_limit is not None and time.perf_counter() - t0 > time_limit:
            return "time"
        return None

    def evaluate(fixings: tuple) -> lp.LpSolution:
        nonlocal lp_solves, iterations
        lb, ub = base.lb.copy(), base.ub.copy()
        for var, val in fixings:
            lb[var] = val
            ub[var] = val
        prob = lp.LpProblem(c=base.c, G=base.G, h=base.h, A=base.A, b=base.b,
                            lb=lb, ub=ub)
        sol = lp.solve(prob)
        lp_solves += 1
        iterations += sol.iterations
        return sol

    def record(depth, var, val, parent_bound, bound, fate):
        if node_log is not None:
            node_log.append(NodeRecord(depth, var, val, parent_bound, bound, fate))

    def handle(fixings, depth, var, val, parent_bound):
        """Evaluate one node; returns a _Node to expand or None if fathomed."""
        nonlocal nodes, hit, incumbent, root_bound
        nodes += 1
        sol = evaluate(fixings)
        if sol.status is lp.LpStatus.INFEASIBLE:
            record(depth, var, val, parent_bound, np.inf, "infeasible")
            return None
        if not sol.optimal:
            # iteration limit: the node is unresolved, so any later
            # infeasibility claim would be unsound
            hit = hit or "iterations"
            record(depth, var, val, parent_bound, np.nan, "limit")
            return None
        bound = sol.objective
        if depth == 0:
            root_bound = bound
        if incumbent is not None and bound >= incumbent[0] - BOUND_SLACK:
            record(depth, var, val, parent_bound, bound, "dominated")
            return None
        y = sol.x[sel_cols]
        if np.abs(y - np.round(y)).max() <= INT_TOL:
            assignment = _assignment_from(sol.x, res.layout, inst)
            if incumbent is None or bound < incumbent[0]:
                incumbent = (bound, assignment)
            record(depth, var, val, parent_bound, bound, "integral")
            return None
        record(depth, var, val, parent_bound, bound, "expanded")
        return _Node(fixings=fixings, depth=depth, bound=bound, x=sol.x)

    root = handle((), 0, -1, 0.0, -np.inf)
    stack = [root] if root is not None else []
    while stack and not (pure_feasibility and incumbent is not None):
        hit = hit or out_of_budget()
        if hit in ("nodes", "time"):
            break
        node = stack.pop()
        if incumbent is not None and node.bound >= incumbent[0] - BOUND_SLACK:
            continue
        y = node.x[sel_cols]
        frac = np.abs(y - 0.5)
        free = [i for i in range(len(sel_cols))
                if not any(v == sel_cols[i] for v, _ in node.fixings)]
        branch_i = min(free, key=lambda i: (frac[i], i))
        var = int(sel_cols[branch_i])
        children = []
        for val in (0.0, 1.0):
            child = handle(node.fixings + ((var, val),), node.depth + 1,
                           var, val, node.bound)
            if pure_feasibility and incumbent is not None:
                break
            if child is not None:
                children.append(child)
        # worse bound first so the better child pops next (ties keep val=1 up)
        children.sort(key=lambda nd: -nd.bound)
        stack.extend(children)

    stats = SolveStats(lp_solves=lp_solves, simplex_iterations=iterations,
                       nodes=nodes, relaxation_objective=root_bound)
    elapsed = time.perf_counter() - t0

    if incumbent is None:
        if hit is None:
            status = PlanStatus.INFEASIBLE
        else:
            status = PlanStatus.COMBINATORIAL_EXHAUSTED
        return Plan(status=status, assignment=None, positions=None, com=None,
                    solve_time=elapsed, stats=stats, limit=hit)

    _, assignment = incumbent
    objective = "goal_l1" if inst.objective == "goal_l1" else "center"
    fres = build_fixed(inst, assignment, objective=objective,
                       relative_foot_prev_anchor=relative_foot_prev_anchor)
    fsol = lp.solve(fres.problem)
    stats = replace(stats, lp_solves=stats.lp_solves + 1,
                    simplex_iterations=stats.simplex_iterations + fsol.iterations)
    if not fsol.optimal:
        raise lp.LpNumericalError(
            "integral node was feasible but the fixed re-solve was not; "
            "big-M witness should always embed"
        )
    return Plan(
        status=PlanStatus.BRANCH_AND_BOUND,
        assignment=assignment,
        positions=fres.layout.positions(fsol.x),
        com=fres.layout.com_points(fsol.x),
        solve_time=time.perf_counter() - t0,
        stats=stats,
        limit=hit if hit in ("nodes", "time", "iterations") else None,
    )
