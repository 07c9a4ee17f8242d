"""Brute-force ground truth for surface assignment.

Enumerates every per-phase surface assignment in lexicographic order and
keeps the ones whose fixed-surface LP is feasible.  Exponential on purpose;
the cap keeps it honest.  Used by the tests and benchmarks to certify the
relaxation pipeline and the branch-and-bound baseline against something
that cannot be subtly wrong.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from . import lp
from .problem import ProblemInstance, build_fixed

DEFAULT_CAP = 4096


class CapExceeded(RuntimeError):
    """The assignment space is larger than the caller allowed."""


@dataclass(frozen=True)
class OracleResult:
    assignments: tuple        # feasible assignments, lexicographic
    exhausted: bool           # true when the cap cut enumeration short
    tested: int

    @property
    def feasible(self) -> bool:
        return len(self.assignments) > 0


def assignment_count(inst: ProblemInstance) -> int:
    return math.prod(len(p.candidates) for p in inst.phases)


def iter_assignments(inst: ProblemInstance) -> Iterator[tuple]:
    """All assignments, lexicographic by surface id (candidates are sorted)."""
    return itertools.product(*(p.candidates for p in inst.phases))


def _is_feasible(inst: ProblemInstance, assignment: tuple) -> bool:
    res = build_fixed(inst, assignment, objective="none")
    ok, _ = lp.check_feasible(res.problem)
    return ok


def enumerate_feasible(
    inst: ProblemInstance, cap: int = DEFAULT_CAP, *, strict: bool = False
) -> OracleResult:
    """Test every assignment up to ``cap``.

    With ``strict`` the cap is a hard error instead of a truncation flag, for
    callers that need the answer to be exact.
    """
    inst.validate()
    total = assignment_count(inst)
    if strict and total > cap:
        raise CapExceeded(f"{total} assignments exceed the cap of {cap}")
    feasible = []
    tested = 0
    for assignment in iter_assignments(inst):
        if tested >= cap:
            return OracleResult(tuple(feasible), True, tested)
        tested += 1
        if _is_feasible(inst, assignment):
            feasible.append(assignment)
    return OracleResult(tuple(feasible), False, tested)


def dump_csv(inst: ProblemInstance, path: str | Path, cap: int = DEFAULT_CAP) -> None:
    """Write the full feasibility table, one row per tested assignment."""
    inst.validate()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"phase_{k}" for k in range(inst.n_phases)] + ["feasible"])
        for tested, assignment in enumerate(iter_assignments(inst)):
            if tested >= cap:
                break
            row = list(assignment) + [int(_is_feasible(inst, assignment))]
            writer.writerow(row)
