"""stepstone: contact-sequence planning over candidate surfaces.

Plans footstep contact sequences for a biped by relaxing the combinatorial
surface-selection problem to a single LP whose L1 slack objective drives all
but one candidate's slack to zero per phase (the ``sl1m`` pipeline), with a
big-M branch-and-bound baseline (``mi``), a brute-force oracle (``oracle``),
and an in-repo bounded-variable simplex solver (``lp``).
"""

from .geometry import Polytope, Surface, surface_from_vertices
from .mi import solve_mi
from .oracle import enumerate_feasible
from .problem import (
    EffectorModel,
    GoalSpec,
    InitialSpec,
    PhaseSpec,
    ProblemInstance,
    build_fixed,
    build_mi,
    build_sl1m,
)
from .scenario import (
    ScenarioFile,
    export_svg,
    from_instance,
    gen_corridor,
    gen_toy,
    load_plan,
    load_scenario,
    save_plan,
    save_scenario,
    to_instance,
    validate,
)
from .sl1m import Plan, PlanStatus, SparsityReport, classify_sparsity, refine, solve_sl1m

__version__ = "0.1.0"

__all__ = [
    "Polytope",
    "Surface",
    "surface_from_vertices",
    "EffectorModel",
    "PhaseSpec",
    "InitialSpec",
    "GoalSpec",
    "ProblemInstance",
    "build_sl1m",
    "build_fixed",
    "build_mi",
    "Plan",
    "PlanStatus",
    "SparsityReport",
    "classify_sparsity",
    "solve_sl1m",
    "solve_mi",
    "refine",
    "enumerate_feasible",
    "ScenarioFile",
    "from_instance",
    "to_instance",
    "load_scenario",
    "save_scenario",
    "load_plan",
    "save_plan",
    "gen_toy",
    "gen_corridor",
    "validate",
    "export_svg",
    "__version__",
]
