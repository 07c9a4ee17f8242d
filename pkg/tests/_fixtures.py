"""Shared builders: a generous biped model and small random instances."""

import numpy as np

from stepstone.geometry import Polytope, polytope_from_box, surface_from_vertices
from stepstone.problem import GoalSpec, InitialSpec, PhaseSpec, ProblemInstance
from stepstone.scenario import default_effectors as make_effectors  # noqa: F401


def box(lo, hi) -> Polytope:
    return polytope_from_box(lo, hi)


def square(x0, x1, y0, y1, z=0.0, sid=-1):
    return surface_from_vertices(
        [(x0, y0, z), (x1, y0, z), (x1, y1, z), (x0, y1, z)], surface_id=sid
    )


def walk_instance(surfaces, candidates, *, p0=(0.2, -0.15, 0.0), support="R",
                  goal=None, mu=0.8, gamma=None, objective=None, yaws=None):
    """Alternating L/R walk; ``candidates`` is one id tuple per phase."""
    effs = make_effectors()
    movers = ["L", "R"]
    phases = tuple(
        PhaseSpec(moving=movers[k % 2], candidates=tuple(c),
                  yaw=0.0 if yaws is None else yaws[k])
        for k, c in enumerate(candidates)
    )
    if goal is None:
        goal = GoalSpec(targets=(((0.0, 0.0, 0.0), (50.0, 50.0, 50.0)),))
    return ProblemInstance(
        surfaces=tuple(surfaces),
        effectors=effs,
        gait=("L", "R"),
        phases=phases,
        init=InitialSpec(p0=p0, support=support),
        goal=goal,
        mu=mu,
        gamma=gamma,
        objective=objective,
    )


def stride_instance(n_phases, surfaces, cands_per_phase, **kw):
    """n_phases steps, every phase offered the same candidate tuple."""
    return walk_instance(surfaces, [cands_per_phase] * n_phases, **kw)


def random_instance(rng, max_phases=6, max_cands=4, feasible_bias=0.5):
    """Small randomized instance for agreement and audit suites.

    Surfaces are a row of squares marching +x with jittered gaps, sizes and
    heights (all quasi-flat); some instances get an unreachable goal target
    so infeasible cases show up with frequency ~ (1 - feasible_bias).
    """
    n_phases = int(rng.integers(1, max_phases + 1))
    n_surf = int(rng.integers(1, 5))
    surfaces = []
    x = 0.0
    for i in range(n_surf):
        w = rng.uniform(0.35, 1.1)
        y0 = rng.uniform(-0.75, -0.55)
        y1 = rng.uniform(0.55, 0.75)
        z = rng.uniform(-0.08, 0.08)
        surfaces.append(square(x, x + w, y0, y1, z=z, sid=i))
        x += w + rng.uniform(0.005, 0.25)
    candidates = [
        tuple(sorted(rng.choice(n_surf, size=min(int(rng.integers(1, max_cands + 1)), n_surf),
                                replace=False).tolist()))
        for _ in range(n_phases)
    ]
    if rng.random() < feasible_bias:
        goal = GoalSpec(targets=(((0.0, 0.0, 0.0), (40.0, 40.0, 40.0)),))
    else:
        # reachable only if the walk can cover it; often it cannot
        gx = rng.uniform(0.5, 0.7 * n_phases)
        goal = GoalSpec(targets=(((gx, 0.0, 0.0), (0.35, 1.0, 1.0)),))
    # y extents guarantee this stays inside surface 0
    p0 = surfaces[0].centroid() + np.array([0.0, -0.15, 0.0])
    return walk_instance(surfaces, candidates, p0=tuple(p0), goal=goal,
                         mu=float(rng.choice([0.5, 0.8, 1.2])))
