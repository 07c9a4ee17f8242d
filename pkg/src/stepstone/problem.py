"""Assemble footstep-selection LPs from a problem instance.

Three builds share one assembler:

* ``build_sl1m``   - every candidate surface of every phase gets a slack pair
  (alpha, beta); minimizing the alpha sum drives all but one candidate's
  slack away from zero, which is what makes the selection readable off the
  relaxation.
* ``build_fixed``  - one surface per phase is committed, slacks removed, the
  plane constraint turns into a hard equality.
* ``build_mi``     - slack pairs replaced by binary selectors with big-M
  deactivation, one selector per candidate, exactly one active per phase.

Variables per phase k (0-based): the contact position p_k, the per-candidate
slack/selector column, the per-candidate plane slack (relaxation only), and
the two COM checkpoints c_k0 (start of the double-support interval) and c_k1
(end).  The initial contact p_-1 is a constant from the instance and is
folded into right-hand sides.

Support-region rows act on xy only: the foot outline is rotated by the phase
yaw but never tilted, so COM-over-foot stays a planar test.  COM-workspace
and step-displacement polytopes are rotated by yaw and then aligned to the
candidate surface plane.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import (
    Polytope,
    Surface,
    contains,
    is_quasi_flat,
    orient_polytope,
    polytope_bounded,
    polytope_nonempty,
    rotate_polytope,
)
from .lp import LpProblem, check_feasible

P0_TOL = 1e-6
SHARED_NORMAL_TOL = 1e-9


class InvalidInstance(ValueError):
    """The instance breaks a structural invariant (gait, models, ranges)."""


class EmptyCandidates(InvalidInstance):
    pass


class NonQuasiFlatCandidate(InvalidInstance):
    pass


class InfeasibleBoundary(InvalidInstance):
    """Initial or goal set is internally contradictory."""


@dataclass(frozen=True)
class EffectorModel:
    """One foot: its sole outline and the two workspace approximations.

    ``foot`` must carry zero z-coefficients (xy-only rows) and contain the
    origin; it is expressed in the foot frame.  ``com`` bounds the COM
    position relative to the planted foot.  ``rel`` bounds where this foot
    may land relative to the previously planted one.
    """

    name: str
    foot: Polytope
    com: Polytope
    rel: Polytope


@dataclass(frozen=True)
class PhaseSpec:
    """One step: which foot moves, its yaw, and the allowed surfaces."""

    moving: str
    candidates: tuple
    yaw: float = 0.0

    def __post_init__(self) -> None:
        # sorted unique ids so candidate index order is surface id order
        object.__setattr__(
            self, "candidates", tuple(sorted({int(i) for i in self.candidates}))
        )


@dataclass(frozen=True)
class InitialSpec:
    """Fixed starting contact and (optionally) a box for the first COM point."""

    p0: np.ndarray
    support: str
    yaw: float = 0.0
    com_box: Optional[tuple] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "p0", np.asarray(self.p0, dtype=np.float64).reshape(3))
        if self.com_box is not None:
            lo, hi = self.com_box
            box = (np.asarray(lo, dtype=np.float64).reshape(3),
                   np.asarray(hi, dtype=np.float64).reshape(3))
            object.__setattr__(self, "com_box", box)


@dataclass(frozen=True)
class GoalSpec:
    """Either a surface the final two contacts must lie on, or explicit
    target points with per-axis tolerances, plus an optional final COM box.

    ``targets`` holds one or two (point, tolerance) pairs; with two, the
    first applies to the next-to-last contact.
    """

    surface: Optional[int] = None
    targets: Optional[tuple] = None
    com_box: Optional[tuple] = None

    def __post_init__(self) -> None:
        if self.targets is not None:
            norm = tuple(
                (np.asarray(p, dtype=np.float64).reshape(3),
                 np.asarray(t, dtype=np.float64).reshape(3))
                for p, t in self.targets
            )
            object.__setattr__(self, "targets", norm)
        if self.com_box is not None:
            lo, hi = self.com_box
            box = (np.asarray(lo, dtype=np.float64).reshape(3),
                   np.asarray(hi, dtype=np.float64).reshape(3))
            object.__setattr__(self, "com_box", box)


@dataclass(frozen=True)
class ProblemInstance:
    surfaces: tuple
    effectors: tuple
    gait: tuple
    phases: tuple
    init: InitialSpec
    goal: GoalSpec
    mu: float
    gamma: Optional[float] = None
    objective: Optional[str] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        object.__setattr__(self, "effectors", tuple(self.effectors))
        object.__setattr__(self, "gait", tuple(self.gait))
        object.__setattr__(self, "phases", tuple(self.phases))

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    @property
    def effective_gamma(self) -> float:
        """Objective weight: explicit value wins, else a small default when
        a secondary objective was requested, else zero."""
        if self.gamma is not None:
            return float(self.gamma)
        return 1e-3 if self.objective is not None else 0.0

    def effector(self, name: str) -> EffectorModel:
        for e in self.effectors:
            if e.name == name:
                return e
        raise KeyError(name)

    def initial_surface_id(self) -> int:
        """Lowest-id quasi-flat surface the initial contact lies on."""
        for i, s in enumerate(self.surfaces):
            if is_quasi_flat(s, self.mu) and contains(s, self.init.p0, P0_TOL):
                return i
        raise InfeasibleBoundary("initial contact does not lie on any quasi-flat surface")

    def goal_point(self) -> np.ndarray:
        """Point the optional distance objective pulls contacts toward."""
        if self.goal.targets is not None:
            return self.goal.targets[-1][0]
        return self.surfaces[self.goal.surface].centroid()

    # Contact anchors: l in [-1, n_phases); -1 is the initial support contact.

    def anchor_effector(self, l: int) -> EffectorModel:
        return self.effector(self.init.support if l < 0 else self.phases[l].moving)

    def anchor_yaw(self, l: int) -> float:
        return self.init.yaw if l < 0 else self.phases[l].yaw

    def anchor_candidates(self, l: int) -> tuple:
        if l < 0:
            return (self.initial_surface_id(),)
        return self.phases[l].candidates

    def shares_orientation(self, l: int) -> bool:
        """True when every candidate of anchor l has the same unit normal."""
        ids = self.anchor_candidates(l)
        d0 = self.surfaces[ids[0]].normal
        return all(
            np.abs(self.surfaces[i].normal - d0).max() <= SHARED_NORMAL_TOL
            for i in ids[1:]
        )

    def validate(self) -> None:
        """Raise an InvalidInstance subclass on the first broken invariant.

        Cheap structural checks run first; the initial/goal sets are then
        probed with small feasibility LPs.  The result is cached, so repeated
        builds on one instance pay the LP cost once.
        """
        if getattr(self, "_validated", False):
            return

        names = [e.name for e in self.effectors]
        if len(self.effectors) != 2 or len(set(names)) != 2:
            raise InvalidInstance("exactly two distinct effectors are required")
        if sorted(self.gait) != sorted(names) or len(self.gait) != 2:
            raise InvalidInstance("gait must cycle through both effectors")
        if self.init.support not in names:
            raise InvalidInstance(f"unknown support effector {self.init.support!r}")
        if not self.phases:
            raise InvalidInstance("at least one phase is required")
        if not np.isfinite(self.mu) or self.mu <= 0.0:
            raise InvalidInstance("mu must be positive")
        if self.gamma is not None and (not np.isfinite(self.gamma) or self.gamma < 0):
            raise InvalidInstance("gamma must be nonnegative")
        if self.objective not in (None, "goal_l1"):
            raise InvalidInstance(f"unknown objective selector {self.objective!r}")

        if self.phases[0].moving == self.init.support:
            raise InvalidInstance("phase 0 must move the non-support effector")
        g0 = self.gait.index(self.phases[0].moving)
        for k, spec in enumerate(self.phases):
            if spec.moving not in names:
                raise InvalidInstance(f"phase {k}: unknown effector {spec.moving!r}")
            if spec.moving != self.gait[(g0 + k) % 2]:
                raise InvalidInstance(f"phase {k} breaks the gait order")
            if not spec.candidates:
                raise EmptyCandidates(f"phase {k} has no candidate surfaces")
            for i in spec.candidates:
                if not 0 <= i < len(self.surfaces):
                    raise InvalidInstance(f"phase {k}: surface id {i} out of range")
                if not is_quasi_flat(self.surfaces[i], self.mu):
                    raise NonQuasiFlatCandidate(
                        f"phase {k}: surface {i} is too steep for mu={self.mu}"
                    )

        for e in self.effectors:
            if e.foot.A.shape[1] != 3 or np.abs(e.foot.A[:, 2]).max() > 0.0:
                raise InvalidInstance(f"effector {e.name!r}: foot rows must be xy-only")
            if not e.foot.member(np.zeros(3), 1e-9):
                raise InvalidInstance(f"effector {e.name!r}: foot must contain the origin")
            if not (polytope_nonempty(e.com) and polytope_bounded(e.com)):
                raise InvalidInstance(f"effector {e.name!r}: COM workspace must be non-empty and bounded")
            if not (polytope_nonempty(e.rel) and polytope_bounded(e.rel)):
                raise InvalidInstance(f"effector {e.name!r}: step workspace must be non-empty and bounded")
            if not polytope_bounded(e.foot, axes=(0, 1)):
                raise InvalidInstance(f"effector {e.name!r}: foot outline must be bounded in xy")

        self.initial_surface_id()  # raises InfeasibleBoundary when p0 is off-surface

        ngoal = (self.goal.surface is not None) + (self.goal.targets is not None)
        if ngoal != 1:
            raise InvalidInstance("goal must set exactly one of surface or targets")
        if self.goal.surface is not None:
            if not 0 <= self.goal.surface < len(self.surfaces):
                raise InvalidInstance(f"goal surface id {self.goal.surface} out of range")
            if not is_quasi_flat(self.surfaces[self.goal.surface], self.mu):
                raise NonQuasiFlatCandidate("goal surface is too steep")
        else:
            if len(self.goal.targets) not in (1, 2):
                raise InvalidInstance("goal targets must hold one or two points")
            for point, tol in self.goal.targets:
                if (tol < 0).any():
                    raise InvalidInstance("goal target tolerances must be nonnegative")
            if len(self.goal.targets) == 2 and self.n_phases == 1:
                point, tol = self.goal.targets[0]
                # with a single phase the next-to-last contact is the constant p0
                if (np.abs(self.init.p0 - point) > tol + 1e-9).any():
                    raise InfeasibleBoundary("first goal target excludes the fixed initial contact")

        self._check_boundary_sets()
        object.__setattr__(self, "_validated", True)

    def _check_boundary_sets(self) -> None:
        # crossed boxes would be rejected as malformed by the LP layer, so
        # they are turned into boundary errors before the probes run
        for box, label in ((self.init.com_box, "initial COM box"),
                           (self.goal.com_box, "final COM box")):
            if box is not None and (box[0] > box[1]).any():
                raise InfeasibleBoundary(f"{label} is empty")

        if self.init.com_box is not None:
            lo, hi = self.init.com_box
            ok, _ = check_feasible(LpProblem(c=np.zeros(3), lb=lo, ub=hi))
            if not ok:
                raise InfeasibleBoundary("initial COM box is empty")

        # goal probe over (next-to-last contact, last contact, final COM)
        lb = np.full(9, -np.inf)
        ub = np.full(9, np.inf)
        rows = []
        rhs = []
        eq_rows = []
        eq_rhs = []
        if self.goal.surface is not None:
            g = self.surfaces[self.goal.surface]
            for off in (0, 3):
                block = np.zeros((g.n_rows, 9))
                block[:, off:off + 3] = g.S
                rows.append(block)
                rhs.append(g.s)
                erow = np.zeros((1, 9))
                erow[0, off:off + 3] = g.normal
                eq_rows.append(erow)
                eq_rhs.append([g.offset])
        else:
            slots = [3] if len(self.goal.targets) == 1 else [0, 3]
            for off, (point, tol) in zip(slots, self.goal.targets):
                lb[off:off + 3] = point - tol
                ub[off:off + 3] = point + tol
        if self.goal.com_box is not None:
            lo, hi = self.goal.com_box
            lb[6:9] = lo
            ub[6:9] = hi
        probe = LpProblem(
            c=np.zeros(9),
            G=np.vstack(rows) if rows else None,
            h=np.concatenate(rhs) if rhs else None,
            A=np.vstack(eq_rows) if eq_rows else None,
            b=np.concatenate(eq_rhs) if eq_rhs else None,
            lb=lb,
            ub=ub,
        )
        ok, _ = check_feasible(probe)
        if not ok:
            raise InfeasibleBoundary("goal set is empty")


class RowTag(NamedTuple):
    """Provenance of one LP row, for residual reports and debugging.

    ``phase`` is the 0-based phase the row belongs to, ``surface`` the
    candidate surface id (-1 when the row is orientation-shared), ``anchor``
    the contact the row is expressed against (-1 for the initial contact).
    """

    kind: str
    phase: int = -1
    surface: int = -1
    anchor: int = -1


@dataclass(frozen=True)
class PhaseVars:
    p: slice
    alpha: slice
    beta: slice
    c0: slice
    c1: slice


@dataclass(frozen=True)
class VariableLayout:
    """Where each block of a build's flat variable vector lives.

    ``alpha`` holds the per-candidate slack column in the relaxation and the
    binary selector column in the big-M build; it is empty for fixed builds,
    as is ``beta`` outside the relaxation.  ``aux`` is the trailing block of
    per-phase L1-distance bound variables when a distance objective is on.
    """

    mode: str
    phases: tuple
    n_vars: int
    aux: slice
    binary: Optional[np.ndarray] = None

    @property
    def n_phases(self) -> int:
        return len(self.phases)

    def p(self, k: int) -> slice:
        return self.phases[k].p

    def alpha(self, k: int) -> slice:
        return self.phases[k].alpha

    def beta(self, k: int) -> slice:
        return self.phases[k].beta

    def c0(self, k: int) -> slice:
        return self.phases[k].c0

    def c1(self, k: int) -> slice:
        return self.phases[k].c1

    def positions(self, x: np.ndarray) -> np.ndarray:
        return np.stack([x[pv.p] for pv in self.phases])

    def com_points(self, x: np.ndarray) -> np.ndarray:
        """(n_phases, 2, 3) array of the COM checkpoints."""
        return np.stack([np.stack([x[pv.c0], x[pv.c1]]) for pv in self.phases])

    def alpha_values(self, x: np.ndarray) -> list:
        return [x[pv.alpha].copy() for pv in self.phases]

    def blocks(self) -> list:
        """All variable slices in layout order (for coverage checks)."""
        out = []
        for pv in self.phases:
            out.extend([pv.p, pv.alpha, pv.beta, pv.c0, pv.c1])
        out.append(self.aux)
        return out


@dataclass(frozen=True)
class BuildResult:
    problem: LpProblem
    layout: VariableLayout
    row_tags: tuple
    eq_tags: tuple
    big_m: Optional[float] = None


class _Rows:
    """Accumulates full-width constraint blocks plus one tag per row."""

    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.blocks = []
        self.rhs = []
        self.tags = []

    def add(self, terms, rhs, tag: RowTag) -> None:
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
        block = np.zeros((rhs.size, self.n_vars))
        for sl, mat in terms:
            block[:, sl] += mat
        self.blocks.append(block)
        self.rhs.append(rhs)
        self.tags.extend([tag] * rhs.size)

    def matrix(self):
        if not self.blocks:
            return None, None
        return np.vstack(self.blocks), np.concatenate(self.rhs)


def _col(block: slice, i: int) -> slice:
    return slice(block.start + i, block.start + i + 1)


def _make_layout(inst: ProblemInstance, mode: str, aux_objective: Optional[str]) -> VariableLayout:
    phase_vars = []
    off = 0
    for spec in inst.phases:
        n = len(spec.candidates)
        na = n if mode in ("sl1m", "mi") else 0
        nb = n if mode == "sl1m" else 0
        p = slice(off, off + 3)
        alpha = slice(off + 3, off + 3 + na)
        beta = slice(alpha.stop, alpha.stop + nb)
        c0 = slice(beta.stop, beta.stop + 3)
        c1 = slice(c0.stop, c0.stop + 3)
        phase_vars.append(PhaseVars(p=p, alpha=alpha, beta=beta, c0=c0, c1=c1))
        off = c1.stop
    n_aux = 3 * len(inst.phases) if aux_objective is not None else 0
    aux = slice(off, off + n_aux)
    off = aux.stop
    binary = None
    if mode == "mi":
        binary = np.zeros(off, dtype=bool)
        for pv in phase_vars:
            binary[pv.alpha] = True
    return VariableLayout(mode=mode, phases=tuple(phase_vars), n_vars=off,
                          aux=aux, binary=binary)


def _resolve_sharing(inst: ProblemInstance, share_orientation: str) -> list:
    """Per-phase flag: may this phase's workspace rows collapse to one copy?"""
    if share_orientation not in ("auto", "on", "off"):
        raise ValueError(f"share_orientation must be auto|on|off, got {share_orientation!r}")
    shared = [inst.shares_orientation(l) for l in range(inst.n_phases)]
    if share_orientation == "on":
        for l, ok in enumerate(shared):
            if not ok:
                raise ValueError(
                    f"share_orientation='on' but phase {l} candidates mix orientations"
                )
    if share_orientation == "off":
        return [False] * inst.n_phases
    return shared


def default_big_m(inst: ProblemInstance) -> float:
    """Twice the bounding-box diameter of the scene (surface vertices and
    the initial contact), valid for any witness that stays in-scene."""
    pts = np.vstack([s.vertices for s in inst.surfaces] + [inst.init.p0[None, :]])
    diam = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    return 2.0 * diam


def _assemble(
    inst: ProblemInstance,
    mode: str,
    *,
    assignment: Optional[Sequence[int]] = None,
    objective: Optional[str] = None,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
    big_m: Optional[float] = None,
) -> BuildResult:
    inst.validate()
    K = inst.n_phases

    if mode == "fixed":
        if assignment is None or len(assignment) != K:
            raise ValueError("assignment must name one surface per phase")
        assignment = [int(a) for a in assignment]
        for k, a in enumerate(assignment):
            if a not in inst.phases[k].candidates:
                raise ValueError(f"assignment[{k}]={a} is not a candidate of phase {k}")
        aux_objective = objective if objective in ("center", "goal_l1") else None
        if objective not in (None, "none", "center", "goal_l1"):
            raise ValueError(f"unknown objective {objective!r}")
    else:
        aux_objective = "goal_l1" if inst.objective == "goal_l1" else None

    layout = _make_layout(inst, mode, aux_objective)
    ineq = _Rows(layout.n_vars)
    eq = _Rows(layout.n_vars)
    p0 = inst.init.p0
    init_sid = inst.initial_surface_id()
    shared = _resolve_sharing(inst, share_orientation)

    def anchor_copies(l: int) -> list:
        """(slack column index or None, surface id) per emitted copy."""
        if l < 0:
            return [(None, init_sid)]
        if mode == "fixed":
            return [(None, assignment[l])]
        if shared[l]:
            ids = inst.phases[l].candidates
            sid = ids[0] if len(ids) == 1 else -1
            return [(None, sid)]
        return list(enumerate(inst.phases[l].candidates))

    def emit(l: int, ci, terms, rhs, tag: RowTag) -> None:
        rhs = np.atleast_1d(np.asarray(rhs, dtype=np.float64))
        if ci is None:
            ineq.add(terms, rhs, tag)
        elif mode == "sl1m":
            acol = _col(layout.alpha(l), ci)
            ineq.add(terms + [(acol, -np.ones((rhs.size, 1)))], rhs, tag)
        else:
            ycol = _col(layout.alpha(l), ci)
            ineq.add(terms + [(ycol, big_m * np.ones((rhs.size, 1)))], rhs + big_m, tag)

    # selection block: boundary rows, plane row, slack coupling
    for k in range(K):
        pv = layout.phases[k]
        sel = [(None, assignment[k])] if mode == "fixed" else \
            list(enumerate(inst.phases[k].candidates))
        for ci, sid in sel:
            s = inst.surfaces[sid]
            d = s.normal.reshape(1, 3)
            if mode == "sl1m":
                acol = _col(pv.alpha, ci)
                bcol = _col(pv.beta, ci)
                ineq.add([(pv.p, s.S), (acol, -np.ones((s.n_rows, 1)))], s.s,
                         RowTag("surface", k, sid, k))
                eq.add([(pv.p, d), (bcol, [[-1.0]])], [s.offset],
                       RowTag("plane", k, sid, k))
                ineq.add([(acol, [[-1.0], [-1.0]]), (bcol, [[1.0], [-1.0]])],
                         [0.0, 0.0], RowTag("slack-abs", k, sid, k))
            elif mode == "mi":
                ycol = _col(pv.alpha, ci)
                ineq.add([(pv.p, s.S), (ycol, big_m * np.ones((s.n_rows, 1)))],
                         s.s + big_m, RowTag("surface", k, sid, k))
                ineq.add([(pv.p, d), (ycol, [[big_m]])], [s.offset + big_m],
                         RowTag("plane", k, sid, k))
                ineq.add([(pv.p, -d), (ycol, [[big_m]])], [-s.offset + big_m],
                         RowTag("plane", k, sid, k))
            else:
                ineq.add([(pv.p, s.S)], s.s, RowTag("surface", k, sid, k))
                eq.add([(pv.p, d)], [s.offset], RowTag("plane", k, sid, k))
        if mode == "mi":
            n = len(inst.phases[k].candidates)
            eq.add([(pv.alpha, np.ones((1, n)))], [1.0], RowTag("select", k, -1, k))

    # support, COM-workspace and step-displacement rows per phase
    for k in range(K):
        pv = layout.phases[k]

        for cvar, l in ((pv.c0, k - 1), (pv.c1, k)):
            eff = inst.anchor_effector(l)
            foot = rotate_polytope(eff.foot, inst.anchor_yaw(l))
            for ci, sid in anchor_copies(l):
                # identical rows per candidate; the slack coupling is the point
                terms = [(cvar, foot.A)]
                if l < 0:
                    rhs = foot.b + foot.A @ p0
                else:
                    terms.append((layout.p(l), -foot.A))
                    rhs = foot.b
                emit(l, ci, terms, rhs, RowTag("support", k, sid, l))

        for l in (k - 1, k):
            eff = inst.anchor_effector(l)
            yaw = inst.anchor_yaw(l)
            for ci, sid in anchor_copies(l):
                ref = sid if sid >= 0 else inst.anchor_candidates(l)[0]
                ws = orient_polytope(eff.com, yaw, inst.surfaces[ref].normal)
                for cvar in (pv.c0, pv.c1):
                    terms = [(cvar, ws.A)]
                    if l < 0:
                        rhs = ws.b + ws.A @ p0
                    else:
                        terms.append((layout.p(l), -ws.A))
                        rhs = ws.b
                    emit(l, ci, terms, rhs, RowTag("com-reach", k, sid, l))

        # step rows anchor at the landing contact; the flag moves them to
        # the stance foot instead
        lq = k - 1 if relative_foot_prev_anchor else k
        eff = inst.anchor_effector(lq)
        yaw = inst.anchor_yaw(lq)
        for ci, sid in anchor_copies(lq):
            ref = sid if sid >= 0 else inst.anchor_candidates(lq)[0]
            step = orient_polytope(eff.rel, yaw, inst.surfaces[ref].normal)
            terms = [(pv.p, step.A)]
            if k == 0:
                rhs = step.b + step.A @ p0
            else:
                terms.append((layout.p(k - 1), -step.A))
                rhs = step.b
            emit(lq, ci, terms, rhs, RowTag("foot-rel", k, sid, lq))

    # goal rows are hard in every mode
    if inst.goal.surface is not None:
        g = inst.surfaces[inst.goal.surface]
        for k in range(max(K - 2, 0), K):
            pv = layout.phases[k]
            ineq.add([(pv.p, g.S)], g.s, RowTag("goal-surface", k, inst.goal.surface, k))
            eq.add([(pv.p, g.normal.reshape(1, 3))], [g.offset],
                   RowTag("goal-plane", k, inst.goal.surface, k))

    # |p_k - target| <= t_k rows backing the distance objectives
    if aux_objective is not None:
        eye = np.eye(3)
        for k in range(K):
            pv = layout.phases[k]
            t = slice(layout.aux.start + 3 * k, layout.aux.start + 3 * k + 3)
            if aux_objective == "center":
                target = inst.surfaces[assignment[k]].centroid()
            else:
                target = inst.goal_point()
            ineq.add([(pv.p, eye), (t, -eye)], target, RowTag("objective", k, -1, k))
            ineq.add([(pv.p, -eye), (t, -eye)], -target, RowTag("objective", k, -1, k))

    lb = np.full(layout.n_vars, -np.inf)
    ub = np.full(layout.n_vars, np.inf)
    for pv in layout.phases:
        lb[pv.alpha] = 0.0
        if mode == "mi":
            ub[pv.alpha] = 1.0
    lb[layout.aux] = 0.0
    if inst.init.com_box is not None:
        lo, hi = inst.init.com_box
        c0 = layout.c0(0)
        lb[c0] = np.maximum(lb[c0], lo)
        ub[c0] = np.minimum(ub[c0], hi)
    if inst.goal.com_box is not None:
        lo, hi = inst.goal.com_box
        c1 = layout.c1(K - 1)
        lb[c1] = np.maximum(lb[c1], lo)
        ub[c1] = np.minimum(ub[c1], hi)
    if inst.goal.targets is not None:
        slots = [K - 1] if len(inst.goal.targets) == 1 else [K - 2, K - 1]
        for k, (point, tol) in zip(slots, inst.goal.targets):
            if k < 0:
                continue  # next-to-last contact is the constant p0, checked in validate
            p = layout.p(k)
            lb[p] = np.maximum(lb[p], point - tol)
            ub[p] = np.minimum(ub[p], point + tol)

    c = np.zeros(layout.n_vars)
    if mode == "sl1m":
        for pv in layout.phases:
            c[pv.alpha] = 1.0
    if aux_objective == "center":
        c[layout.aux] = 1.0
    elif aux_objective == "goal_l1":
        weight = inst.effective_gamma if mode != "fixed" else \
            (inst.gamma if inst.gamma is not None else 1e-3)
        c[layout.aux] = weight

    G, h = ineq.matrix()
    A, b = eq.matrix()
    problem = LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub)
    return BuildResult(
        problem=problem,
        layout=layout,
        row_tags=tuple(ineq.tags),
        eq_tags=tuple(eq.tags),
        big_m=big_m,
    )


def build_sl1m(
    inst: ProblemInstance,
    *,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
) -> BuildResult:
    """The slack relaxation: minimize the alpha sum over all candidates."""
    return _assemble(inst, "sl1m", share_orientation=share_orientation,
                     relative_foot_prev_anchor=relative_foot_prev_anchor)


def build_fixed(
    inst: ProblemInstance,
    assignment: Sequence[int],
    *,
    objective: Optional[str] = "none",
    relative_foot_prev_anchor: bool = False,
) -> BuildResult:
    """One committed surface per phase, no slacks, plane equality hard.

    ``objective`` is "none" (pure feasibility), "center" (L1 distance of
    each contact to its surface centroid) or "goal_l1" (L1 distance to the
    goal point, weighted by the instance gamma).
    """
    return _assemble(inst, "fixed", assignment=assignment, objective=objective,
                     relative_foot_prev_anchor=relative_foot_prev_anchor)


def build_mi(
    inst: ProblemInstance,
    big_m: Optional[float] = None,
    *,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
) -> BuildResult:
    """Big-M selection variant: binary column per candidate, one per phase.

    The binaries are relaxed to [0,1] here; ``layout.binary`` marks them for
    the branch-and-bound.  Rows of a deselected candidate are released by M,
    so an M smaller than the scene scale cuts off valid plans.
    """
    if big_m is None:
        big_m = default_big_m(inst)
    if not np.isfinite(big_m) or big_m <= 0:
        raise ValueError("big_m must be positive")
    return _assemble(inst, "mi", share_orientation=share_orientation,
                     relative_foot_prev_anchor=relative_foot_prev_anchor, big_m=float(big_m))


def expected_dimensions(
    inst: ProblemInstance,
    mode: str = "sl1m",
    *,
    assignment: Optional[Sequence[int]] = None,
    objective: Optional[str] = None,
    share_orientation: str = "auto",
    relative_foot_prev_anchor: bool = False,
) -> dict:
    """Closed-form variable/row counts the assembler must hit exactly.

    Kept as independent arithmetic (no row assembly) so dimension drift in
    the builder shows up as a mismatch.
    """
    inst.validate()
    K = inst.n_phases
    nc = [len(p.candidates) for p in inst.phases]
    m = [s.n_rows for s in inst.surfaces]
    shared = _resolve_sharing(inst, share_orientation)

    if mode == "fixed":
        if assignment is None:
            raise ValueError("fixed mode needs the assignment")
        aux_on = objective in ("center", "goal_l1")
    else:
        aux_on = inst.objective == "goal_l1"

    def copies(l: int) -> int:
        if l < 0 or mode == "fixed":
            return 1
        return 1 if shared[l] else nc[l]

    def fr(l):  # foot outline rows of the contact at anchor l
        return inst.anchor_effector(l).foot.n_rows

    def rr(l):
        return inst.anchor_effector(l).com.n_rows

    def qr(l):
        return inst.anchor_effector(l).rel.n_rows

    if mode == "sl1m":
        n_vars = sum(9 + 2 * n for n in nc)
        sel_ineq = sum(sum(m[i] + 2 for i in p.candidates) for p in inst.phases)
        sel_eq = sum(nc)
    elif mode == "mi":
        n_vars = sum(9 + n for n in nc)
        sel_ineq = sum(sum(m[i] + 2 for i in p.candidates) for p in inst.phases)
        sel_eq = K
    elif mode == "fixed":
        n_vars = 9 * K
        sel_ineq = sum(m[a] for a in assignment)
        sel_eq = K
    else:
        raise ValueError(f"unknown mode {mode!r}")

    n_ineq = sel_ineq
    for k in range(K):
        n_ineq += copies(k - 1) * fr(k - 1) + copies(k) * fr(k)
        n_ineq += 2 * (copies(k - 1) * rr(k - 1) + copies(k) * rr(k))
        lq = k - 1 if relative_foot_prev_anchor else k
        n_ineq += copies(lq) * qr(lq)

    n_eq = sel_eq
    if inst.goal.surface is not None:
        tail = min(K, 2)
        n_ineq += tail * inst.surfaces[inst.goal.surface].n_rows
        n_eq += tail
    if aux_on:
        n_vars += 3 * K
        n_ineq += 6 * K

    return {"n_vars": n_vars, "n_ineq": n_ineq, "n_eq": n_eq}
