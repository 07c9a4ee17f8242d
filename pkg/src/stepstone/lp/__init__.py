"""Small deterministic LP toolbox built for the planner.

Standard form: min c.x subject to G x <= h, A x = b, lb <= x <= ub.
The solver is an in-repo two-phase revised simplex over bounded variables;
see ``_driver`` for the algorithmic notes and ``backend`` for the compiled /
interpreted kernel selection.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ._driver import (
    LpNumericalError,
    LpProblem,
    LpSolution,
    LpStatus,
    MalformedProblem,
    SolveOptions,
    check_feasible,
    solve,
)
from .backend import ENV_FLAG, active_backend, load_kernels

__all__ = [
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "SolveOptions",
    "MalformedProblem",
    "LpNumericalError",
    "solve",
    "check_feasible",
    "dump_problem",
    "active_backend",
    "load_kernels",
    "ENV_FLAG",
]


def _fmt(v: float) -> str:
    if v == np.inf:
        return "inf"
    if v == -np.inf:
        return "-inf"
    return format(v, ".17g")


def dump_problem(problem: LpProblem, path: str | Path) -> None:
    """Write a plain-text fixed-format dump, handy for diffing against other solvers.

    Layout: header, objective row, inequality rows (coeffs then rhs),
    equality rows, then one lb/ub pair per variable.
    """
    lines = [
        f"lp 1 vars {problem.n_vars} ineq {problem.n_ineq} eq {problem.n_eq}",
        "obj " + " ".join(_fmt(v) for v in problem.c),
    ]
    for i in range(problem.n_ineq):
        row = " ".join(_fmt(v) for v in problem.G[i])
        lines.append(f"ineq {row} <= {_fmt(problem.h[i])}")
    for i in range(problem.n_eq):
        row = " ".join(_fmt(v) for v in problem.A[i])
        lines.append(f"eq {row} == {_fmt(problem.b[i])}")
    lines.append("bounds")
    for i in range(problem.n_vars):
        lines.append(f"{_fmt(problem.lb[i])} {_fmt(problem.ub[i])}")
    Path(path).write_text("\n".join(lines) + "\n")
