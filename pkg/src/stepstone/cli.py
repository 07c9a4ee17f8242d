"""Command line front end.

Subcommands: ``plan`` solves one scenario file, ``bench`` sweeps a timing
grid, ``validate`` re-checks a saved plan, ``gen`` writes a generated
scenario, ``bench-kernels`` compares the two LP kernel backends.

Exit codes: 0 solved/ok, 2 infeasible or validation failure, 3 a limit was
hit (combinatorial cap, node or time budget) before an answer, 64 usage or
unreadable input.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import __version__, oracle
from .lp import active_backend
from .mi import solve_mi
from .problem import InvalidInstance
from .scenario import (
    ScenarioError,
    export_svg,
    gen_corridor,
    gen_toy,
    load_plan,
    load_scenario,
    save_plan,
    save_scenario,
    to_instance,
    validate,
)
from .sl1m import FEASIBLE_STATUSES, PlanStatus, refine, solve_sl1m

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_LIMIT = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _axis(text: str) -> list:
    """Parse a grid axis: 'A..B' inclusive range or comma-separated ints."""
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
        if b < a:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(a, b + 1))
    return [int(v) for v in text.split(",")]


def _load_instance(path: str):
    try:
        inst = to_instance(load_scenario(path))
        inst.validate()
        return inst
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=sys.stderr)
        sys.exit(EXIT_USAGE)
    except (ScenarioError, InvalidInstance) as exc:
        print(f"error: bad scenario {path}: {exc}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _plan_exit(status: PlanStatus, limit: Optional[str]) -> int:
    if status in FEASIBLE_STATUSES:
        return EXIT_OK
    if status is PlanStatus.COMBINATORIAL_EXHAUSTED:
        return EXIT_LIMIT
    return EXIT_INFEASIBLE


def _cmd_plan(args) -> int:
    inst = _load_instance(args.scenario)
    if args.solver == "sl1m":
        plan = solve_sl1m(inst, tol_zero=args.tol_zero,
                          max_combinations=args.max_combinations)
    elif args.solver == "mi":
        plan = solve_mi(inst)
    else:
        res = oracle.enumerate_feasible(inst, cap=args.max_combinations)
        if not res.feasible:
            print(f"oracle: no feasible assignment in {res.tested} tested"
                  f"{' (cap hit)' if res.exhausted else ''}")
            return EXIT_LIMIT if res.exhausted else EXIT_INFEASIBLE
        plan = refine(inst, res.assignments[0])

    print(f"status: {plan.status.value}")
    if plan.limit:
        print(f"limit: {plan.limit}")
    if plan.assignment is not None:
        print(f"assignment: {' '.join(str(s) for s in plan.assignment)}")
    print(f"lp solves: {plan.stats.lp_solves}   "
          f"combinations: {plan.combinations_tried}   "
          f"time: {plan.solve_time:.3f}s")
    if args.out:
        save_plan(plan, args.out)
        print(f"plan written to {args.out}")
    if args.svg:
        export_svg(inst, plan if plan.feasible else None, args.svg)
        print(f"svg written to {args.svg}")
    return _plan_exit(plan.status, plan.limit)


def _cmd_bench(args) -> int:
    from .bench import run_grid

    report = run_grid(args.family, args.steps, args.surfaces,
                      repeats=args.repeats, parallel=not args.serial)
    report.to_csv(args.csv)
    print(f"csv written to {args.csv}")
    if args.heatmap:
        report.heatmap_svg(args.heatmap)
        print(f"heatmap written to {args.heatmap}")
    worst = EXIT_OK
    for c in report.cells:
        label = f"{args.family}({c.steps},{c.surfaces})"
        if c.error:
            print(f"{label}: error: {c.error}")
            worst = max(worst, EXIT_LIMIT)
            continue
        print(f"{label}: sl1m {c.sl1m.median:.4f}s [{c.sl1m.status}]  "
              f"mi {c.mi.median:.4f}s [{c.mi.status}]  ratio {c.ratio:.3f}")
        statuses = (c.sl1m.status, c.mi.status)
        if any("exhausted" in s or "[" in s for s in statuses):
            worst = max(worst, EXIT_LIMIT)
    return worst


def _cmd_validate(args) -> int:
    inst = _load_instance(args.scenario)
    try:
        plan = load_plan(args.plan)
    except FileNotFoundError:
        print(f"error: no such file: {args.plan}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioError, KeyError, ValueError) as exc:
        print(f"error: bad plan {args.plan}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if plan.assignment is None:
        print(f"plan has status {plan.status.value}; nothing to validate")
        return EXIT_INFEASIBLE
    report = validate(inst, plan)
    if report.ok:
        print("ok: all rows within 1e-6, polyline samples clean")
        return EXIT_OK
    print(f"FAIL: {len(report.violations)} violations")
    for v in report.violations[:20]:
        print(f"  {v.kind} phase {v.phase}: residual {v.residual:.3e}")
    if len(report.violations) > 20:
        print(f"  ... and {len(report.violations) - 20} more")
    return EXIT_INFEASIBLE


def _cmd_gen(args) -> int:
    if args.family == "toy":
        sf = gen_toy(args.steps, args.splits)
    else:
        sf = gen_corridor(args.phases, window=args.window)
    save_scenario(sf, args.out)
    print(f"{args.family} scenario written to {args.out} "
          f"({len(sf.surfaces)} surfaces, {len(sf.phases)} phases)")
    return EXIT_OK


def _cmd_bench_kernels(args) -> int:
    from .bench import run_kernel_benchmark

    rows = run_kernel_benchmark(sizes=tuple(args.sizes), repeats=args.repeats)
    print(f"active backend: {active_backend()}")
    print(f"{'kernel':<14} {'size':>5} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for r in rows:
        nb = f"{r['numba_s'] * 1e6:.1f}us" if r["numba_s"] else "n/a"
        sp = f"{r['speedup']:.1f}x" if r["speedup"] else "-"
        print(f"{r['kernel']:<14} {r['size']:>5} "
              f"{r['numpy_s'] * 1e6:>10.1f}us {nb:>12} {sp:>8}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="stepstone", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version",
                        version=f"stepstone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve a scenario file",
                       description="Solve one scenario and report the plan.")
    p.add_argument("scenario")
    p.add_argument("--solver", choices=("sl1m", "mi", "oracle"),
                   default="sl1m")
    p.add_argument("--tol-zero", type=float, default=1e-6,
                   help="slack magnitude treated as zero (default 1e-6)")
    p.add_argument("--max-combinations", type=int, default=4000,
                   help="fallback enumeration cap (oracle: probe cap)")
    p.add_argument("--out", help="write the plan as JSON")
    p.add_argument("--svg", help="write a top-down drawing")
    p.set_defaults(fn=_cmd_plan)

    b = sub.add_parser("bench", help="sweep a timing grid",
                       description="Time solve_sl1m against solve_mi per cell.")
    b.add_argument("--family", choices=("toy", "corridor"), required=True)
    b.add_argument("--steps", type=_axis, required=True,
                   help="axis as A..B or comma list")
    b.add_argument("--surfaces", type=_axis, required=True,
                   help="toy: strip counts (powers of two); corridor: windows")
    b.add_argument("--repeats", type=int, default=10)
    b.add_argument("--csv", required=True)
    b.add_argument("--heatmap", help="write a log10-ratio heatmap SVG")
    b.add_argument("--serial", action="store_true",
                   help="run cells sequentially for clean timings")
    b.set_defaults(fn=_cmd_bench)

    v = sub.add_parser("validate", help="re-check a saved plan")
    v.add_argument("scenario")
    v.add_argument("plan")
    v.set_defaults(fn=_cmd_validate)

    g = sub.add_parser("gen", help="write a generated scenario")
    g.add_argument("--family", choices=("toy", "corridor"), required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--steps", type=int, default=6, help="toy: phase count")
    g.add_argument("--splits", type=int, default=2,
                   help="toy: strip count is 2**splits")
    g.add_argument("--phases", type=int, default=10, help="corridor: phases")
    g.add_argument("--window", type=int, default=1,
                   help="corridor: candidate window half-width")
    g.set_defaults(fn=_cmd_gen)

    k = sub.add_parser("bench-kernels",
                       help="time numpy vs numba LP kernels")
    k.add_argument("--sizes", type=_axis, default=[40, 120, 240],
                   help="basis sizes, A..B or comma list")
    k.add_argument("--repeats", type=int, default=7)
    k.set_defaults(fn=_cmd_bench_kernels)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
