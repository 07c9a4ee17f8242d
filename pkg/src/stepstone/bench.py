"""Timing grids: the relaxation pipeline vs branch-and-bound, plus kernel
micro-benchmarks for the two LP backends.

A grid cell is one (steps, surfaces) scenario solved ``repeats`` times per
solver; cells never abort the grid — failures are recorded in the cell and
the sweep moves on.  Scenario generation and instance construction happen
once per cell outside the timed region; the timed call covers constraint
assembly, the solve, and any sparsity-fixing fallback.
"""

from __future__ import annotations

import csv
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .lp import load_kernels
from .mi import solve_mi
from .scenario import gen_corridor, gen_toy, to_instance
from .sl1m import solve_sl1m

FAMILIES = ("toy", "corridor")


@dataclass(frozen=True)
class SolverTiming:
    """Wall times (seconds) and statuses for one solver in one cell."""

    times: tuple
    statuses: tuple

    @property
    def median(self) -> float:
        return statistics.median(self.times)

    @property
    def mean(self) -> float:
        return statistics.fmean(self.times)

    @property
    def status(self) -> str:
        # solves are deterministic, so repeats agree; keep the first
        return self.statuses[0]


@dataclass(frozen=True)
class BenchCell:
    family: str
    steps: int
    surfaces: int
    repeats: int
    sl1m: Optional[SolverTiming] = None
    mi: Optional[SolverTiming] = None
    error: Optional[str] = None

    @property
    def ratio(self) -> Optional[float]:
        """sl1m median / mi median; None when either side is missing."""
        if self.sl1m is None or self.mi is None or self.mi.median == 0.0:
            return None
        return self.sl1m.median / self.mi.median


@dataclass(frozen=True)
class BenchReport:
    family: str
    steps_axis: tuple
    surfaces_axis: tuple
    repeats: int
    cells: tuple

    def cell(self, steps: int, surfaces: int) -> BenchCell:
        for c in self.cells:
            if c.steps == steps and c.surfaces == surfaces:
                return c
        raise KeyError((steps, surfaces))

    def csv_rows(self) -> list:
        rows = [CSV_HEADER]
        for c in self.cells:
            rows.append([
                c.family, c.steps, c.surfaces, c.repeats,
                _s(c.sl1m and c.sl1m.median), _s(c.sl1m and c.sl1m.mean),
                c.sl1m.status if c.sl1m else "",
                _s(c.mi and c.mi.median), _s(c.mi and c.mi.mean),
                c.mi.status if c.mi else "",
                _s(c.ratio), c.error or "",
            ])
        return rows

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.csv_rows())

    def heatmap_svg(self, path) -> None:
        _heatmap(self, path)


CSV_HEADER = [
    "family", "steps", "surfaces", "repeats",
    "sl1m_median_s", "sl1m_mean_s", "sl1m_status",
    "mi_median_s", "mi_mean_s", "mi_status",
    "ratio", "error",
]


def _s(v) -> str:
    return "" if v is None else f"{v:.6f}"


def scenario_for(family: str, steps: int, surfaces: int):
    """Map a grid coordinate to a generated scenario.

    toy: ``surfaces`` must be a power of two (the generator splits a strip in
    halves), so the surfaces axis is typically 1, 2, 4, 8...  corridor:
    ``surfaces`` is the candidate window half-width; the candidate count per
    phase is at most 2*surfaces + 1.
    """
    if family == "toy":
        splits = int(round(math.log2(surfaces))) if surfaces >= 1 else -1
        if splits < 0 or 2 ** splits != surfaces:
            raise ValueError(
                f"toy surfaces axis needs a power of two, got {surfaces}"
            )
        return gen_toy(steps, splits)
    if family == "corridor":
        return gen_corridor(steps, window=surfaces)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _time_solver(fn: Callable, inst, repeats: int) -> SolverTiming:
    times, statuses = [], []
    for _ in range(repeats):
        t0 = time.perf_counter()
        plan = fn(inst)
        times.append(time.perf_counter() - t0)
        status = plan.status.value
        if plan.limit is not None:
            status += f"[{plan.limit}]"
        statuses.append(status)
    return SolverTiming(times=tuple(times), statuses=tuple(statuses))


def measure_cell(family: str, steps: int, surfaces: int, repeats: int,
                 *, solver_kwargs: Optional[dict] = None) -> BenchCell:
    kw = solver_kwargs or {}
    try:
        inst = to_instance(scenario_for(family, steps, surfaces))
        inst.validate()
        sl1m = _time_solver(lambda i: solve_sl1m(i, **kw), inst, repeats)
        mi = _time_solver(solve_mi, inst, repeats)
        return BenchCell(family, steps, surfaces, repeats, sl1m=sl1m, mi=mi)
    except Exception as exc:  # record, never abort the sweep
        return BenchCell(family, steps, surfaces, repeats,
                         error=f"{type(exc).__name__}: {exc}")


def run_grid(family: str, steps_axis, surfaces_axis, repeats: int = 10, *,
             parallel: bool = True, max_workers: Optional[int] = None,
             solver_kwargs: Optional[dict] = None) -> BenchReport:
    """Sweep the grid; one BenchCell per (steps, surfaces) pair."""
    coords = [(st, su) for st in steps_axis for su in surfaces_axis]

    def work(coord):
        st, su = coord
        return measure_cell(family, st, su, repeats,
                            solver_kwargs=solver_kwargs)

    if parallel and len(coords) > 1:
        with ThreadPoolExecutor(max_workers=max_workers or 4) as pool:
            cells = list(pool.map(work, coords))
    else:
        cells = [work(c) for c in coords]
    return BenchReport(
        family=family,
        steps_axis=tuple(steps_axis),
        surfaces_axis=tuple(surfaces_axis),
        repeats=repeats,
        cells=tuple(cells),
    )


# ---------------------------------------------------------------------------
# ratio heatmap


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ratio_color(ratio: Optional[float]) -> str:
    """log10 ratio on a blue-white-red ramp; gray when unavailable."""
    if ratio is None or ratio <= 0.0:
        return "#bbbbbb"
    t = max(-1.0, min(1.0, math.log10(ratio)))
    if t <= 0.0:  # sl1m faster: toward blue
        u = -t
        r, g, b = int(255 - 155 * u), int(255 - 115 * u), 255
    else:
        u = t
        r, g, b = 255, int(255 - 140 * u), int(255 - 165 * u)
    return f"#{r:02x}{g:02x}{b:02x}"


def _heatmap(report: BenchReport, path) -> None:
    cw, ch, pad, left, top = 86, 48, 12, 96, 56
    ncol, nrow = len(report.steps_axis), len(report.surfaces_axis)
    width = left + ncol * cw + pad
    height = top + nrow * ch + pad + 18
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{left}" y="22" font-size="14">'
        f'{report.family}: median time ratio sl1m / mi '
        f'(blue = relaxation faster)</text>',
    ]
    for j, su in enumerate(report.surfaces_axis):
        y = top + j * ch
        out.append(
            f'<text x="{left - 8}" y="{y + ch / 2 + 4:.0f}" '
            f'text-anchor="end">{su}</text>'
        )
    for i, st in enumerate(report.steps_axis):
        x = left + i * cw
        out.append(
            f'<text x="{x + cw / 2:.0f}" y="{top - 10}" '
            f'text-anchor="middle">{st}</text>'
        )
        for j, su in enumerate(report.surfaces_axis):
            y = top + j * ch
            c = report.cell(st, su)
            color = _ratio_color(c.ratio) if c.error is None else "#e3b5b5"
            label = "err" if c.error else (
                "n/a" if c.ratio is None else _fmt(c.ratio))
            out.append(
                f'<rect x="{x}" y="{y}" width="{cw - 2}" height="{ch - 2}" '
                f'fill="{color}" stroke="#666666"/>'
            )
            out.append(
                f'<text x="{x + cw / 2 - 1:.0f}" y="{y + ch / 2 + 4:.0f}" '
                f'text-anchor="middle">{label}</text>'
            )
    out.append(
        f'<text x="{left}" y="{height - 8}">columns: steps, rows: surfaces '
        f'axis (toy: strip count, corridor: window)</text>'
    )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# kernel micro-benchmark


def run_kernel_benchmark(sizes=(40, 120, 240), repeats: int = 7) -> list:
    """Time representative simplex kernels under both backends.

    Returns one row per (kernel, size): dict with numpy/numba seconds per
    call (numba None when unavailable) and the speedup factor.  The numba
    path is warmed once per size so JIT compilation stays out of the timing.
    """
    numpy_k = load_kernels(force="numpy")
    try:
        numba_k = load_kernels(force="numba")
    except Exception:
        numba_k = None

    def cases(m):
        rng = np.random.default_rng(m)
        binv = rng.standard_normal((m, m))
        col = rng.standard_normal(m)
        idx = np.arange(m, dtype=np.int64)
        coef = rng.standard_normal(m)
        d = rng.standard_normal(m)
        z = rng.standard_normal(2 * m)
        vstat = np.zeros(2 * m, dtype=np.int64)
        allow = np.ones(2 * m, dtype=np.bool_)
        return {
            "ftran": lambda K: K.ftran(binv, col),
            "btran": lambda K: K.btran(binv, idx, coef),
            "update_binv": lambda K: K.update_binv(binv.copy(), d, m // 2),
            "pick_dantzig": lambda K: K.pick_dantzig(z, vstat, allow, 1e-9),
        }

    rows = []
    for m in sizes:
        for name, call in cases(m).items():
            def best(K):
                call(K)  # warm-up (JIT + caches)
                t = math.inf
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    call(K)
                    t = min(t, time.perf_counter() - t0)
                return t
            t_np = best(numpy_k)
            t_nb = best(numba_k) if numba_k is not None else None
            rows.append({
                "kernel": name,
                "size": m,
                "numpy_s": t_np,
                "numba_s": t_nb,
                "speedup": (t_np / t_nb) if t_nb else None,
            })
    return rows
