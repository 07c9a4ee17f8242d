"""Relaxation-first planning pipeline.

``solve_sl1m`` runs the slacked LP once, reads the per-candidate slack values
to decide which phases resolved to a single surface, and falls back to an
ordered enumeration of fixed-surface LPs for the phases that did not.  The
enumeration visits assignments in ascending order of their summed slack, so
the combinations the relaxation liked best are tried first and the search
usually ends after a handful of LPs.

Escalation is three-tiered: the direct pick, then enumeration over the
unresolved and ambiguous phases with the rest pinned, then enumeration over
every phase.  The last tier makes the pipeline complete up to the
combination cap: if it finishes without a feasible assignment, none exists.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import lp
from .problem import BuildResult, ProblemInstance, build_fixed, build_sl1m

DEFAULT_TOL_ZERO = 1e-6
DEFAULT_MAX_COMBINATIONS = 4000


class InfeasibleAssignment(ValueError):
    """A fixed-surface solve was asked for an assignment that does not work."""


class PlanStatus(Enum):
    SPARSE_DIRECT = "sparse_direct"
    FIXED_AFTER_FALLBACK = "fixed_after_fallback"
    BRANCH_AND_BOUND = "branch_and_bound"
    INFEASIBLE = "infeasible"
    COMBINATORIAL_EXHAUSTED = "combinatorial_exhausted"


FEASIBLE_STATUSES = frozenset(
    {PlanStatus.SPARSE_DIRECT, PlanStatus.FIXED_AFTER_FALLBACK,
     PlanStatus.BRANCH_AND_BOUND}
)


@dataclass(frozen=True)
class SolveStats:
    """LP work done while producing a plan."""

    lp_solves: int = 0
    simplex_iterations: int = 0
    nodes: int = 0
    relaxation_objective: Optional[float] = None


@dataclass(frozen=True)
class Plan:
    """A contact sequence: one surface and position per phase, plus the COM

    checkpoints bracketing each swing.  ``solve_time`` and ``stats`` describe
    how the plan was found and are excluded from equality/serialization
    comparisons by the scenario module.
    """

    status: PlanStatus
    assignment: Optional[tuple]            # per-phase surface id
    positions: Optional[np.ndarray]        # (K, 3) foot landings
    com: Optional[np.ndarray]              # (K, 2, 3) checkpoint pairs
    combinations_tried: int = 0
    solve_time: float = 0.0
    stats: SolveStats = field(default_factory=SolveStats)
    limit: Optional[str] = None            # "iterations" | "nodes" | "time"

    @property
    def feasible(self) -> bool:
        return self.status in FEASIBLE_STATUSES


@dataclass(frozen=True)
class PhaseSparsity:
    phase: int
    entries: tuple              # (surface id, slack) sorted by slack then id
    resolved: bool
    selected: Optional[int]
    ambiguous: bool             # more than one slack under the tolerance

    def order_for_enumeration(self) -> tuple:
        return tuple(sid for sid, _ in self.entries)


@dataclass(frozen=True)
class SparsityReport:
    phases: tuple
    tol_zero: float

    @property
    def all_resolved(self) -> bool:
        return all(p.resolved for p in self.phases)

    @property
    def selection(self) -> tuple:
        if not self.all_resolved:
            raise ValueError("selection undefined while phases are unresolved")
        return tuple(p.selected for p in self.phases)

    def unresolved_phases(self) -> tuple:
        return tuple(p.phase for p in self.phases if not p.resolved)


def classify_sparsity(
    solution,
    inst: ProblemInstance,
    build: BuildResult,
    tol_zero: float = DEFAULT_TOL_ZERO,
) -> SparsityReport:
    """Read the slack block of an optimal relaxation solution phase by phase.

    A phase is resolved when at least one slack is under ``tol_zero``; ties go
    to the smallest slack, then the lowest surface id.  Treating ties as
    resolved avoids blowing up the fallback on terrains with overlapping
    surfaces; a wrong pick is caught by the fixed solve and re-enters the
    enumeration with that phase freed.
    """
    x = solution.x if isinstance(solution, lp.LpSolution) else np.asarray(solution)
    phases = []
    for k, alpha in enumerate(build.layout.alpha_values(x)):
        ids = inst.phases[k].candidates
        order = sorted(range(len(ids)), key=lambda i: (alpha[i], ids[i]))
        entries = tuple((ids[i], float(max(alpha[i], 0.0))) for i in order)
        n_zero = sum(1 for _, a in entries if a <= tol_zero)
        resolved = n_zero >= 1
        phases.append(PhaseSparsity(
            phase=k,
            entries=entries,
            resolved=resolved,
            selected=entries[0][0] if resolved else None,
            ambiguous=n_zero >= 2,
        ))
    return SparsityReport(phases=tuple(phases), tol_zero=tol_zero)


def _ordered_assignments(per_phase: Sequence[Sequence[tuple]]):
    """Yield full assignments in ascending order of summed slack.

    ``per_phase[j]`` lists (surface id, slack) pairs, cheapest first.  Lazy
    best-first walk over the index lattice; a node may bump index j only when
    every later index is still zero, which visits each combination once.
    Heap ties fall through to the index tuple, keeping the order total.
    """
    base = sum(entries[0][1] for entries in per_phase)
    start = (0,) * len(per_phase)
    heap = [(base, start)]
    while heap:
        cost, idxs = heapq.heappop(heap)
        yield tuple(per_phase[j][i][0] for j, i in enumerate(idxs))
        for j in range(len(idxs)):
            if any(idxs[j2] for j2 in range(j + 1, len(idxs))):
                continue
            if idxs[j] + 1 < len(per_phase[j]):
                delta = per_phase[j][idxs[j] + 1][1] - per_phase[j][idxs[j]][1]
                bumped = idxs[:j] + (idxs[j] + 1,) + idxs[j + 1:]
                heapq.heappush(heap, (cost + delta, bumped))


class _Budget:
    """Mutable counters threaded through the pipeline."""

    def __init__(self, max_combinations: int):
        self.max_combinations = max_combinations
        self.combinations = 0
        self.lp_solves = 0
        self.iterations = 0
        self.hit_lp_limit = False

    def note(self, sol: lp.LpSolution) -> None:
        self.lp_solves += 1
        self.iterations += sol.iterations
        if sol.status is lp.LpStatus.ITERATION_LIMIT:
            self.hit_lp_limit = True

    @property
    def exhausted(self) -> bool:
        return self.combinations >= self.max_combinations


def _finish(inst, assignment, build, sol, status, budget, rel_obj, t0, limit=None):
    stats = SolveStats(
        lp_solves=budget.lp_solves,
        simplex_iterations=budget.iterations,
        relaxation_objective=rel_obj,
    )
    if not sol.optimal:
        return Plan(status=PlanStatus.INFEASIBLE, assignment=None, positions=None,
                    com=None, combinations_tried=budget.combinations,
                    solve_time=time.perf_counter() - t0, stats=stats, limit=limit)
    return Plan(
        status=status,
        assignment=tuple(assignment),
        positions=build.layout.positions(sol.x),
        com=build.layout.com_points(sol.x),
        combinations_tried=budget.combinations,
        solve_time=time.perf_counter() - t0,
        stats=stats,
        limit=limit,
    )


def _give_up(status, budget, rel_obj, t0, limit=None):
    stats = SolveStats(
        lp_solves=budget.lp_solves,
        simplex_iterations=budget.iterations,
        relaxation_objective=rel_obj,
    )
    return Plan(status=status, assignment=None, positions=None, com=None,
                combinations_tried=budget.combinations,
                solve_time=time.perf_counter() - t0, stats=stats, limit=limit)


def _centered_solve(inst, assignment, budget, relative_foot_prev_anchor):
    build = build_fixed(inst, assignment, objective="center",
                        relative_foot_prev_anchor=relative_foot_prev_anchor)
    sol = lp.solve(build.problem)
    budget.note(sol)
    return build, sol


def solve_sl1m(
    inst: ProblemInstance,
    *,
    tol_zero: float = DEFAULT_TOL_ZERO,
    max_combinations: int = DEFAULT_MAX_COMBINATIONS,
    stop_at_first_feasible: bool = True,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
) -> Plan:
    """Plan a contact sequence through the slack relaxation.

    Returns a Plan whose status records how the answer was reached: the
    relaxation alone (SPARSE_DIRECT), the ordered enumeration
    (FIXED_AFTER_FALLBACK), a proof that no assignment works (INFEASIBLE), or
    a cap hit (COMBINATORIAL_EXHAUSTED).  With ``stop_at_first_feasible``
    off, the enumeration keeps going and returns the feasible assignment with
    the best centering objective instead of the first hit.
    """
    t0 = time.perf_counter()
    inst.validate()
    budget = _Budget(max_combinations)

    relax = build_sl1m(inst, share_orientation=share_orientation,
                       relative_foot_prev_anchor=relative_foot_prev_anchor)
    rsol = lp.solve(relax.problem)
    budget.note(rsol)
    if rsol.status is lp.LpStatus.INFEASIBLE:
        return _give_up(PlanStatus.INFEASIBLE, budget, None, t0)
    if rsol.status is lp.LpStatus.ITERATION_LIMIT:
        return _give_up(PlanStatus.COMBINATORIAL_EXHAUSTED, budget, None, t0,
                        limit="iterations")
    if not rsol.optimal:
        raise lp.LpNumericalError(
            f"relaxation ended {rsol.status.name}; the objective is bounded, "
            "so this is a solver defect"
        )
    rel_obj = rsol.objective
    report = classify_sparsity(rsol, inst, relax, tol_zero)

    tried: set = set()

    # tier 0: the relaxation picked every phase
    if report.all_resolved:
        selection = report.selection
        tried.add(selection)
        build, sol = _centered_solve(inst, selection, budget, relative_foot_prev_anchor)
        if sol.optimal:
            return _finish(inst, selection, build, sol,
                           PlanStatus.SPARSE_DIRECT, budget, rel_obj, t0)

    # tiers 1 and 2: enumerate, cheapest summed slack first
    slack_of = {p.phase: dict(p.entries) for p in report.phases}
    free_t1 = [p.phase for p in report.phases if not p.resolved or p.ambiguous]
    tiers = [free_t1, list(range(inst.n_phases))] if free_t1 else \
        [list(range(inst.n_phases))]

    best: Optional[tuple] = None  # (objective, rank, assignment, build, sol)
    rank = 0
    for free in tiers:
        free_set = set(free)
        per_phase = []
        for p in report.phases:
            if p.phase in free_set:
                entries = tuple((sid, slack_of[p.phase][sid])
                                for sid in p.order_for_enumeration())
            else:
                entries = ((p.selected, 0.0),)
            per_phase.append(entries)
        for assignment in _ordered_assignments(per_phase):
            if assignment in tried:
                continue
            if budget.exhausted:
                return _give_up(PlanStatus.COMBINATORIAL_EXHAUSTED, budget,
                                rel_obj, t0,
                                limit="iterations" if budget.hit_lp_limit else None)
            tried.add(assignment)
            budget.combinations += 1
            build, sol = _centered_solve(inst, assignment, budget,
                                         relative_foot_prev_anchor)
            rank += 1
            if sol.optimal:
                if stop_at_first_feasible:
                    return _finish(inst, assignment, build, sol,
                                   PlanStatus.FIXED_AFTER_FALLBACK, budget,
                                   rel_obj, t0)
                key = (sol.objective, rank)
                if best is None or key < best[:2]:
                    best = (sol.objective, rank, assignment, build, sol)

    if best is not None:
        _, _, assignment, build, sol = best
        return _finish(inst, assignment, build, sol,
                       PlanStatus.FIXED_AFTER_FALLBACK, budget, rel_obj, t0)
    if budget.hit_lp_limit:
        # some assignments were never settled, so infeasibility is unproven
        return _give_up(PlanStatus.COMBINATORIAL_EXHAUSTED, budget, rel_obj, t0,
                        limit="iterations")
    return _give_up(PlanStatus.INFEASIBLE, budget, rel_obj, t0)


def refine(inst: ProblemInstance, assignment, *,
           relative_foot_prev_anchor: bool = False) -> Plan:
    """Re-solve a known-good assignment with the centering objective.

    Accepts a Plan (keeps its status and counters) or a raw per-phase surface
    sequence (tagged FIXED_AFTER_FALLBACK, since the choice was made outside
    the relaxation).  Raises InfeasibleAssignment when the assignment does
    not admit any contact positions; feeding one in means the caller skipped
    validation.
    """
    t0 = time.perf_counter()
    if isinstance(assignment, Plan):
        plan = assignment
        if not plan.feasible:
            raise InfeasibleAssignment(f"cannot refine a {plan.status.value} plan")
        ids, status, combos = plan.assignment, plan.status, plan.combinations_tried
    else:
        ids = tuple(int(a) for a in assignment)
        status, combos = PlanStatus.FIXED_AFTER_FALLBACK, 0
    budget = _Budget(0)
    build, sol = _centered_solve(inst, ids, budget, relative_foot_prev_anchor)
    if not sol.optimal:
        raise InfeasibleAssignment(f"assignment {ids} has no feasible positions")
    plan = _finish(inst, ids, build, sol, status, budget, None, t0)
    return replace(plan, combinations_tried=combos)
