"""Scenario files, terrain generators, plan validation, and SVG export.

A scenario file is the JSON description of one planning problem: surfaces,
effector models, gait, phases, start and goal.  The canonical in-memory form
uses plain lists and dicts so that parse(serialize(s)) round-trips to an
equal object and golden files diff cleanly.

Two generator families cover the benchmarks: ``gen_toy`` splits one flat
rectangle into co-planar strips to scale the candidate count without
changing the terrain, and ``gen_corridor`` walks a canned staircase of 30
small tilted surfaces with a sliding candidate window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import lp
from .geometry import (
    Polytope,
    foot_polytope_from_polygon,
    orient_polytope,
    polytope_from_box,
    polytope_xy_vertices,
    rot_z,
    rotate_polytope,
    surface_from_vertices,
)
from .problem import (
    EffectorModel,
    GoalSpec,
    InitialSpec,
    PhaseSpec,
    ProblemInstance,
    build_fixed,
)
from .sl1m import Plan, PlanStatus, SolveStats

SCENARIO_VERSION = 1
PLAN_VERSION = 1


class ScenarioError(ValueError):
    """Malformed or unsupported scenario document."""


def default_effectors(reach=0.55, lateral=(0.12, 0.45), foot=(0.11, 0.05),
                      dz=0.4) -> tuple:
    """The stock biped: mirror-symmetric left/right feet.

    ``reach`` bounds the step length, ``lateral`` the stance width range,
    ``foot`` the half-extents of the sole, ``dz`` the allowed step height
    difference.  COM workspaces are deliberately roomy; the interesting
    constraints in the benchmarks are the steps themselves.
    """
    fx, fy = foot
    sole = foot_polytope_from_polygon(
        [(-fx, -fy), (fx, -fy), (fx, fy), (-fx, fy)]
    )
    lo, hi = lateral
    left = EffectorModel(
        name="L",
        foot=sole,
        com=polytope_from_box([-0.6, -0.7, 0.3], [0.6, 0.25, 1.3]),
        rel=polytope_from_box([-reach, lo, -dz], [reach, hi, dz]),
    )
    right = EffectorModel(
        name="R",
        foot=sole,
        com=polytope_from_box([-0.6, -0.25, 0.3], [0.6, 0.7, 1.3]),
        rel=polytope_from_box([-reach, -hi, -dz], [reach, -lo, dz]),
    )
    return (left, right)


# ---------------------------------------------------------------------------
# scenario documents


@dataclass(frozen=True, eq=True)
class ScenarioFile:
    """Canonical plain-data form of one scenario (lists and dicts only)."""

    version: int
    mu: float
    gamma: Optional[float]
    objective: Optional[str]
    surfaces: list          # one [[x, y, z], ...] vertex loop per surface
    effectors: list         # {"name", "foot" xy loop, "com"/"rel" {"A","b"}}
    gait: list
    phases: list            # {"moving", "yaw", "candidates": ids | "all"}
    init: dict              # {"p0", "support", "yaw", "com_box"}
    goal: dict              # {"surface": id} or {"targets": [...]} (+com_box)
    solver: Optional[dict] = None


def _floats(seq) -> list:
    return [float(v) for v in seq]


def _matrix(rows) -> list:
    return [_floats(r) for r in rows]


def _poly_doc(p: Polytope) -> dict:
    return {"A": _matrix(p.A), "b": _floats(p.b)}


def _poly_from_doc(doc) -> Polytope:
    return Polytope(A=doc["A"], b=doc["b"])


def _box_doc(box) -> Optional[list]:
    if box is None:
        return None
    return [_floats(box[0]), _floats(box[1])]


def from_instance(inst: ProblemInstance, solver: Optional[dict] = None) -> ScenarioFile:
    """Capture an instance as a scenario document."""
    goal: dict = {"com_box": _box_doc(inst.goal.com_box)}
    if inst.goal.surface is not None:
        goal["surface"] = int(inst.goal.surface)
    else:
        goal["targets"] = [
            {"point": _floats(pt), "tol": _floats(tol)}
            for pt, tol in inst.goal.targets
        ]
    return ScenarioFile(
        version=SCENARIO_VERSION,
        mu=float(inst.mu),
        gamma=None if inst.gamma is None else float(inst.gamma),
        objective=inst.objective,
        surfaces=[_matrix(s.vertices) for s in inst.surfaces],
        effectors=[
            {
                "name": e.name,
                "foot": _matrix(polytope_xy_vertices(e.foot)),
                "com": _poly_doc(e.com),
                "rel": _poly_doc(e.rel),
            }
            for e in inst.effectors
        ],
        gait=list(inst.gait),
        phases=[
            {
                "moving": p.moving,
                "yaw": float(p.yaw),
                "candidates": list(p.candidates),
            }
            for p in inst.phases
        ],
        init={
            "p0": _floats(inst.init.p0),
            "support": inst.init.support,
            "yaw": float(inst.init.yaw),
            "com_box": _box_doc(inst.init.com_box),
        },
        goal=goal,
        solver=solver,
    )


def to_instance(sf: ScenarioFile) -> ProblemInstance:
    """Build the solvable instance a scenario describes."""
    surfaces = tuple(
        surface_from_vertices(v, surface_id=i) for i, v in enumerate(sf.surfaces)
    )
    effectors = tuple(
        EffectorModel(
            name=e["name"],
            foot=foot_polytope_from_polygon(e["foot"]),
            com=_poly_from_doc(e["com"]),
            rel=_poly_from_doc(e["rel"]),
        )
        for e in sf.effectors
    )
    phases = []
    for p in sf.phases:
        cands = p["candidates"]
        if cands == "all":
            cands = range(len(surfaces))
        phases.append(PhaseSpec(moving=p["moving"], candidates=tuple(cands),
                                yaw=float(p.get("yaw", 0.0))))
    init_box = sf.init.get("com_box")
    init = InitialSpec(
        p0=sf.init["p0"],
        support=sf.init["support"],
        yaw=float(sf.init.get("yaw", 0.0)),
        com_box=None if init_box is None else (init_box[0], init_box[1]),
    )
    goal_box = sf.goal.get("com_box")
    goal = GoalSpec(
        surface=sf.goal.get("surface"),
        targets=tuple(
            (t["point"], t["tol"]) for t in sf.goal["targets"]
        ) if "targets" in sf.goal else None,
        com_box=None if goal_box is None else (goal_box[0], goal_box[1]),
    )
    return ProblemInstance(
        surfaces=surfaces,
        effectors=effectors,
        gait=tuple(sf.gait),
        phases=tuple(phases),
        init=init,
        goal=goal,
        mu=sf.mu,
        gamma=sf.gamma,
        objective=sf.objective,
    )


def serialize_scenario(sf: ScenarioFile) -> str:
    doc = {
        "version": sf.version,
        "mu": sf.mu,
        "gamma": sf.gamma,
        "objective": sf.objective,
        "surfaces": sf.surfaces,
        "effectors": sf.effectors,
        "gait": sf.gait,
        "phases": sf.phases,
        "init": sf.init,
        "goal": sf.goal,
        "solver": sf.solver,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_scenario(text: str) -> ScenarioFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("version") != SCENARIO_VERSION:
        raise ScenarioError(
            f"unsupported scenario version {doc.get('version')!r}; "
            f"this build reads version {SCENARIO_VERSION}"
        )
    required = ("mu", "surfaces", "effectors", "gait", "phases", "init", "goal")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ScenarioError(f"scenario is missing fields: {', '.join(missing)}")
    n = len(doc["surfaces"])
    for k, p in enumerate(doc["phases"]):
        cands = p.get("candidates", "all")
        if cands == "all":
            continue
        bad = [c for c in cands if not (0 <= int(c) < n)]
        if bad:
            raise ScenarioError(f"phase {k} references unknown surfaces {bad}")
    gs = doc["goal"].get("surface")
    if gs is not None and not (0 <= int(gs) < n):
        raise ScenarioError(f"goal references unknown surface {gs}")
    return ScenarioFile(
        version=doc["version"],
        mu=doc["mu"],
        gamma=doc.get("gamma"),
        objective=doc.get("objective"),
        surfaces=doc["surfaces"],
        effectors=doc["effectors"],
        gait=doc["gait"],
        phases=doc["phases"],
        init=doc["init"],
        goal=doc["goal"],
        solver=doc.get("solver"),
    )


def save_scenario(sf: ScenarioFile, path) -> None:
    Path(path).write_text(serialize_scenario(sf))


def load_scenario(path) -> ScenarioFile:
    return parse_scenario(Path(path).read_text())


# ---------------------------------------------------------------------------
# generators


def _rect(x0, x1, y0, y1, z=0.0) -> list:
    return [[x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z]]


def _effector_docs() -> list:
    return [
        {
            "name": e.name,
            "foot": _matrix(polytope_xy_vertices(e.foot)),
            "com": _poly_doc(e.com),
            "rel": _poly_doc(e.rel),
        }
        for e in default_effectors()
    ]


def gen_toy(steps: int, splits: int) -> ScenarioFile:
    """Flat rectangle cut into ``2**splits`` co-planar strips, 1 mm apart.

    Every strip is a candidate for every phase; the goal surface is the last
    strip, so the walk has to make progress while the strip count scales the
    assignment space.  The rectangle grows with ``steps`` so the stride stays
    comfortable at every grid point.

    The goal-progress objective matters here: under the pure slack objective
    the relaxation is indifferent near strip boundaries (crossing a 1 mm gap
    trades one strip's slack against its neighbour's one for one) and the
    simplex parks feet mid-gap, leaving those phases unresolved.
    """
    if not 2 <= steps <= 38:
        raise ValueError("steps must be in [2, 38]")
    if splits < 0:
        raise ValueError("splits must be >= 0")
    n = 2 ** splits
    length = 0.35 + 0.3 * (steps - 1)
    half_gap = 0.0005
    edges = [length * i / n for i in range(n + 1)]
    surfaces = []
    for i in range(n):
        x0 = edges[i] + (half_gap if i > 0 else 0.0)
        x1 = edges[i + 1] - (half_gap if i < n - 1 else 0.0)
        surfaces.append(_rect(x0, x1, -0.75, 0.75))
    movers = ["L", "R"]
    phases = [
        {"moving": movers[k % 2], "yaw": 0.0, "candidates": "all"}
        for k in range(steps)
    ]
    return ScenarioFile(
        version=SCENARIO_VERSION,
        mu=0.8,
        gamma=None,
        objective="goal_l1",
        surfaces=surfaces,
        effectors=_effector_docs(),
        gait=["L", "R"],
        phases=phases,
        init={"p0": [0.05, -0.15, 0.0], "support": "R", "yaw": 0.0,
              "com_box": None},
        goal={"surface": n - 1, "com_box": None},
        solver=None,
    )


CORRIDOR_PHASES = 30


def _corridor_surfaces() -> list:
    """The canned corridor: a start platform plus 30 small stepping surfaces.

    A gently curving path that climbs and descends in stages, the surfaces
    alternating left/right of the path line and turning with the heading.
    Every surface is horizontal: with the whole candidate window sharing one
    orientation the relaxation stays compact even at wide windows, which is
    what makes the large benchmark cells tractable.  All constants are fixed;
    the output is part of the file-format surface and must not drift.
    """
    quads = [_rect(-0.3, 0.3, -0.45, 0.2)]
    base = np.array([0.45, 0.0])
    heading = 0.0
    hx, hy = 0.19, 0.15
    local = np.array([[-hx, -hy, 0.0], [hx, -hy, 0.0],
                      [hx, hy, 0.0], [-hx, hy, 0.0]])
    for k in range(CORRIDOR_PHASES):
        side = 1.0 if k % 2 == 0 else -1.0
        perp = np.array([-math.sin(heading), math.cos(heading)])
        z = 0.1 * ((k // 3) % 4)
        center = np.array([*(base + 0.16 * side * perp), z])
        verts = (rot_z(heading) @ local.T).T + center
        quads.append(_matrix(verts))
        heading += 0.035
        base = base + 0.34 * np.array([math.cos(heading), math.sin(heading)])
    return quads


_CORRIDOR_QUADS = _corridor_surfaces()


def gen_corridor(phases: int = CORRIDOR_PHASES, window: int = 0) -> ScenarioFile:
    """Staircase corridor with a sliding candidate window.

    Phase k's own surface is always feasible, so the instance is solvable by
    construction at any window; widening the window adds the neighbors'
    surfaces as decoys and grows the assignment space.  Truncation keeps the
    first ``phases`` steps and their surfaces.
    """
    if not 1 <= phases <= CORRIDOR_PHASES:
        raise ValueError(f"phases must be in [1, {CORRIDOR_PHASES}]")
    if window < 0:
        raise ValueError("window must be >= 0")
    surfaces = [list(q) for q in _CORRIDOR_QUADS[: phases + 1]]
    movers = ["L", "R"]
    phase_docs = []
    yaw = 0.0
    for k in range(phases):
        lo = max(1, k + 1 - window)
        hi = min(phases, k + 1 + window)
        phase_docs.append({
            "moving": movers[k % 2],
            "yaw": round(0.035 * k, 6),
            "candidates": list(range(lo, hi + 1)),
        })
    last = np.asarray(surfaces[phases])
    center = _floats(last.mean(axis=0))
    return ScenarioFile(
        version=SCENARIO_VERSION,
        mu=0.8,
        gamma=None,
        objective=None,
        surfaces=surfaces,
        effectors=_effector_docs(),
        gait=["L", "R"],
        phases=phase_docs,
        init={"p0": [0.0, -0.16, 0.0], "support": "R", "yaw": 0.0,
              "com_box": None},
        goal={"targets": [{"point": center, "tol": [0.2, 0.2, 0.1]}],
              "com_box": None},
        solver=None,
    )


# ---------------------------------------------------------------------------
# plan validation


@dataclass(frozen=True)
class Violation:
    kind: str
    phase: int
    residual: float


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple

    def worst(self) -> Optional[Violation]:
        return max(self.violations, key=lambda v: v.residual, default=None)


def _hull_residual(foot_a: Polytope, pa, foot_b: Polytope, pb, point) -> float:
    """How far ``point`` is from conv(foot_a@pa, foot_b@pb), as an elastic LP.

    Splits the point as u + v with u in lam * (first foot) and v in
    (1 - lam) * (second foot); t is the shared row violation being minimized,
    so t = 0 exactly on membership.
    """
    A1, b1 = foot_a.A, foot_a.b + foot_a.A @ pa
    A2, b2 = foot_b.A, foot_b.b + foot_b.A @ pb
    m1, m2 = A1.shape[0], A2.shape[0]
    n = 8  # u, v, lam, t
    G = np.zeros((m1 + m2, n))
    h = np.zeros(m1 + m2)
    G[:m1, 0:3] = A1
    G[:m1, 6] = -b1
    G[:m1, 7] = -1.0
    G[m1:, 3:6] = A2
    G[m1:, 6] = b2
    G[m1:, 7] = -1.0
    h[m1:] = b2
    A = np.zeros((3, n))
    A[:, 0:3] = np.eye(3)
    A[:, 3:6] = np.eye(3)
    b = np.asarray(point, dtype=np.float64)
    c = np.zeros(n)
    c[7] = 1.0
    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    lb[6], ub[6] = 0.0, 1.0
    lb[7] = 0.0
    sol = lp.solve(lp.LpProblem(c=c, G=G, h=h, A=A, b=b, lb=lb, ub=ub))
    if not sol.optimal:
        return np.inf
    return max(sol.objective, 0.0)


def _max_violation(poly: Polytope, x, ref) -> float:
    if poly.n_rows == 0:
        return 0.0
    return float((poly.A @ (np.asarray(x) - ref) - poly.b).max())


def validate(inst: ProblemInstance, plan: Plan, *, tol: float = 1e-6,
             segment_samples: int = 5) -> ValidationReport:
    """Check a plan against everything its fixed build demands, and then some.

    Row residuals come from re-assembling the fixed-surface problem and
    plugging the plan in, so whatever the builder enforces is what gets
    checked.  On top of that, each COM polyline segment is sampled at
    ``segment_samples`` interior points and tested directly against the
    support and reachability sets; by convexity these can only fail if
    something upstream is wrong, which is exactly why they are here.
    """
    if plan.assignment is None or plan.positions is None or plan.com is None:
        raise ValueError(f"cannot validate a {plan.status.value} plan")
    inst.validate()
    res = build_fixed(inst, plan.assignment, objective="none")
    lay = res.layout
    x = np.zeros(lay.n_vars)
    K = inst.n_phases
    for k in range(K):
        x[lay.p(k)] = plan.positions[k]
        x[lay.c0(k)] = plan.com[k, 0]
        x[lay.c1(k)] = plan.com[k, 1]

    violations = []
    prob = res.problem
    if prob.n_ineq:
        resid = prob.G @ x - prob.h
        for i in np.flatnonzero(resid > tol):
            t = res.row_tags[i]
            violations.append(Violation(t.kind, t.phase, float(resid[i])))
    if prob.n_eq:
        resid = np.abs(prob.A @ x - prob.b)
        for i in np.flatnonzero(resid > tol):
            t = res.eq_tags[i]
            violations.append(Violation(t.kind, t.phase, float(resid[i])))
    for k in range(K):
        for sl in (lay.p(k), lay.c0(k), lay.c1(k)):
            over = np.maximum(prob.lb[sl] - x[sl], x[sl] - prob.ub[sl])
            worst = float(over.max())
            if worst > tol:
                violations.append(Violation("bound", k, worst))

    # polyline sampling; anchor -1 is the fixed initial contact
    def anchor_pos(l):
        return inst.init.p0 if l < 0 else plan.positions[l]

    def anchor_sid(l):
        return inst.initial_surface_id() if l < 0 else plan.assignment[l]

    def foot_at(l):
        eff = inst.anchor_effector(l)
        return rotate_polytope(eff.foot, inst.anchor_yaw(l))

    def reach_at(l):
        eff = inst.anchor_effector(l)
        normal = inst.surfaces[anchor_sid(l)].normal
        return orient_polytope(eff.com, inst.anchor_yaw(l), normal)

    ts = [(i + 1) / (segment_samples + 1) for i in range(segment_samples)]

    def check_samples(a, b, anchors, tag_phase):
        feet = [(foot_at(l), anchor_pos(l)) for l in anchors]
        reach = [(reach_at(l), anchor_pos(l)) for l in anchors]
        for t in ts:
            m = (1.0 - t) * a + t * b
            direct = min(_max_violation(f, m, p) for f, p in feet)
            if direct > tol:
                if len(feet) == 2:
                    r = _hull_residual(feet[0][0], feet[0][1],
                                       feet[1][0], feet[1][1], m)
                else:
                    r = direct
                if r > tol:
                    violations.append(Violation("polyline-support",
                                                tag_phase, float(r)))
            for rp, pos in reach:
                r = _max_violation(rp, m, pos)
                if r > tol:
                    violations.append(Violation("polyline-reach",
                                                tag_phase, float(r)))

    for k in range(K):
        check_samples(plan.com[k, 0], plan.com[k, 1], (k - 1, k), k)
        if k + 1 < K:
            check_samples(plan.com[k, 1], plan.com[k + 1, 0], (k,), k)

    return ValidationReport(ok=not violations, violations=tuple(violations))


# ---------------------------------------------------------------------------
# plan documents


def plan_to_document(plan: Plan, *, include_timings: bool = True) -> dict:
    doc = {
        "version": PLAN_VERSION,
        "status": plan.status.value,
        "assignment": None if plan.assignment is None else list(plan.assignment),
        "positions": None if plan.positions is None else _matrix(plan.positions),
        "com": None if plan.com is None else
            [[_floats(c) for c in pair] for pair in plan.com],
        "combinations_tried": plan.combinations_tried,
        "limit": plan.limit,
    }
    if include_timings:
        doc["timings"] = {
            "solve_time": plan.solve_time,
            "lp_solves": plan.stats.lp_solves,
            "simplex_iterations": plan.stats.simplex_iterations,
            "nodes": plan.stats.nodes,
            "relaxation_objective": plan.stats.relaxation_objective,
        }
    return doc


def serialize_plan(plan: Plan, *, include_timings: bool = True) -> str:
    doc = plan_to_document(plan, include_timings=include_timings)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_plan(text: str) -> Plan:
    doc = json.loads(text)
    if doc.get("version") != PLAN_VERSION:
        raise ScenarioError(f"unsupported plan version {doc.get('version')!r}")
    timings = doc.get("timings") or {}
    stats = SolveStats(
        lp_solves=timings.get("lp_solves", 0),
        simplex_iterations=timings.get("simplex_iterations", 0),
        nodes=timings.get("nodes", 0),
        relaxation_objective=timings.get("relaxation_objective"),
    )
    return Plan(
        status=PlanStatus(doc["status"]),
        assignment=None if doc["assignment"] is None else tuple(doc["assignment"]),
        positions=None if doc["positions"] is None else
            np.asarray(doc["positions"], dtype=np.float64),
        com=None if doc["com"] is None else
            np.asarray(doc["com"], dtype=np.float64),
        combinations_tried=doc.get("combinations_tried", 0),
        solve_time=timings.get("solve_time", 0.0),
        stats=stats,
        limit=doc.get("limit"),
    )


def save_plan(plan: Plan, path, *, include_timings: bool = True) -> None:
    Path(path).write_text(serialize_plan(plan, include_timings=include_timings))


def load_plan(path) -> Plan:
    return parse_plan(Path(path).read_text())


# ---------------------------------------------------------------------------
# SVG export


_SURFACE_FILL = "#d3dbe8"
_SURFACE_EDGE = "#54647e"
_GOAL_FILL = "#c4e3c8"
_FOOT_COLORS = ("#2b6cb0", "#d9742b")
_COM_COLOR = "#c0392b"
_START_COLOR = "#718096"


def _fmt(v: float) -> str:
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


class _Canvas:
    """Maps world xy onto a y-flipped pixel viewport."""

    def __init__(self, points, width=900.0, pad=30.0):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        self.minx, self.miny = pts.min(axis=0)
        self.maxx, self.maxy = pts.max(axis=0)
        span_x = max(self.maxx - self.minx, 1e-6)
        span_y = max(self.maxy - self.miny, 1e-6)
        self.scale = (width - 2 * pad) / span_x
        self.pad = pad
        self.width = width
        self.height = span_y * self.scale + 2 * pad

    def map(self, p) -> tuple:
        x = self.pad + (p[0] - self.minx) * self.scale
        y = self.pad + (self.maxy - p[1]) * self.scale
        return x, y

    def path(self, pts) -> str:
        return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(self.map, pts))


def export_svg(inst: ProblemInstance, plan: Optional[Plan], path) -> None:
    """Top-down drawing: surfaces, foot rectangles per phase, COM polyline.

    Deterministic byte-for-byte for equal inputs; timing data never appears.
    A plan without positions (infeasible or exhausted) draws surfaces only.
    """
    corners = [s.vertices[:, :2] for s in inst.surfaces]
    world = np.vstack(corners + [inst.init.p0[:2].reshape(1, 2)])
    cv = _Canvas(world)
    goal_sid = inst.goal.surface

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(cv.width)}" height="{_fmt(cv.height)}" '
        f'viewBox="0 0 {_fmt(cv.width)} {_fmt(cv.height)}">',
        f'<rect width="{_fmt(cv.width)}" height="{_fmt(cv.height)}" fill="#fafbfc"/>',
    ]
    for s in inst.surfaces:
        fill = _GOAL_FILL if s.id == goal_sid else _SURFACE_FILL
        out.append(
            f'<polygon points="{cv.path(s.vertices[:, :2])}" fill="{fill}" '
            f'stroke="{_SURFACE_EDGE}" stroke-width="1"/>'
        )
    if inst.goal.targets is not None:
        for point, tol in inst.goal.targets:
            lo = (point[0] - tol[0], point[1] - tol[1])
            hi = (point[0] + tol[0], point[1] + tol[1])
            box = [lo, (hi[0], lo[1]), hi, (lo[0], hi[1])]
            out.append(
                f'<polygon points="{cv.path(box)}" fill="none" '
                f'stroke="{_COM_COLOR}" stroke-width="1" '
                f'stroke-dasharray="6 3"/>'
            )

    def foot_outline(effector, yaw, at_xy):
        loop = polytope_xy_vertices(effector.foot)
        R = rot_z(yaw)[:2, :2]
        return (loop @ R.T) + np.asarray(at_xy)

    start_eff = inst.effector(inst.init.support)
    out.append(
        f'<polygon points="{cv.path(foot_outline(start_eff, inst.init.yaw, inst.init.p0[:2]))}" '
        f'fill="none" stroke="{_START_COLOR}" stroke-width="1.5" '
        f'stroke-dasharray="4 3"/>'
    )

    if plan is not None and plan.positions is not None:
        names = [e.name for e in inst.effectors]
        for k in range(inst.n_phases):
            eff = inst.anchor_effector(k)
            color = _FOOT_COLORS[names.index(eff.name) % len(_FOOT_COLORS)]
            loop = foot_outline(eff, inst.anchor_yaw(k), plan.positions[k, :2])
            out.append(
                f'<polygon points="{cv.path(loop)}" fill="{color}" '
                f'fill-opacity="0.55" stroke="{color}" stroke-width="1"/>'
            )
        com_xy = plan.com.reshape(-1, 3)[:, :2]
        out.append(
            f'<polyline points="{cv.path(com_xy)}" fill="none" '
            f'stroke="{_COM_COLOR}" stroke-width="2"/>'
        )
        for pt in com_xy:
            x, y = cv.map(pt)
            out.append(
                f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" '
                f'fill="{_COM_COLOR}"/>'
            )
    out.append("</svg>")
    Path(path).write_bytes(("\n".join(out) + "\n").encode("ascii"))
