"""Benchmark grid sweeps, CSV schema, heatmap, kernel micro-bench."""

import csv
import math

import pytest

from stepstone.bench import (
    CSV_HEADER,
    BenchCell,
    SolverTiming,
    _ratio_color,
    measure_cell,
    run_grid,
    run_kernel_benchmark,
    scenario_for,
)


class TestScenarioFor:
    def test_toy_maps_surfaces_to_splits(self):
        assert len(scenario_for("toy", 3, 1).surfaces) == 1
        assert len(scenario_for("toy", 3, 4).surfaces) == 4
        assert len(scenario_for("toy", 3, 8).surfaces) == 8

    def test_toy_rejects_non_power_of_two(self):
        for bad in (0, 3, 5, 6, 7, -2):
            with pytest.raises(ValueError, match="power of two"):
                scenario_for("toy", 3, bad)

    def test_corridor_maps_surfaces_to_window(self):
        sf = scenario_for("corridor", 5, 2)
        widths = [len(p["candidates"]) for p in sf.phases]
        assert max(widths) == 5  # 2*window + 1

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown family"):
            scenario_for("stairs", 2, 1)


@pytest.fixture(scope="module")
def report():
    return run_grid("toy", [2, 3], [1, 2], repeats=2, parallel=False)


class TestRunGrid:

    def test_all_cells_present_and_clean(self, report):
        assert len(report.cells) == 4
        for c in report.cells:
            assert c.error is None
            assert len(c.sl1m.times) == 2 and len(c.mi.times) == 2
            assert min(c.sl1m.times) > 0.0 and min(c.mi.times) > 0.0
            assert c.ratio > 0.0

    def test_statuses_are_feasible(self, report):
        for c in report.cells:
            assert c.sl1m.status in ("sparse_direct", "fixed_after_fallback")
            assert c.mi.status == "branch_and_bound"

    def test_cell_lookup(self, report):
        assert report.cell(3, 2).steps == 3
        with pytest.raises(KeyError):
            report.cell(9, 9)

    def test_csv_schema(self, report, tmp_path):
        path = tmp_path / "grid.csv"
        report.to_csv(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == CSV_HEADER
        assert len(rows) == 5
        for row in rows[1:]:
            assert row[0] == "toy"
            assert float(row[4]) > 0.0  # sl1m median
            assert float(row[10]) > 0.0  # ratio
            assert row[11] == ""

    def test_statuses_deterministic_across_runs(self, report):
        again = run_grid("toy", [2, 3], [1, 2], repeats=1, parallel=False)
        for c1 in report.cells:
            c2 = again.cell(c1.steps, c1.surfaces)
            assert c2.sl1m.status == c1.sl1m.status
            assert c2.mi.status == c1.mi.status

    def test_parallel_matches_serial_statuses(self):
        a = run_grid("toy", [2], [1, 2], repeats=1, parallel=True)
        b = run_grid("toy", [2], [1, 2], repeats=1, parallel=False)
        for ca in a.cells:
            cb = b.cell(ca.steps, ca.surfaces)
            assert (ca.sl1m.status, ca.mi.status) == (cb.sl1m.status, cb.mi.status)

    def test_bad_cell_recorded_not_raised(self):
        rep = run_grid("toy", [2], [3], repeats=1, parallel=False)
        cell = rep.cells[0]
        assert cell.error is not None and "power of two" in cell.error
        assert cell.sl1m is None and cell.ratio is None
        rep.to_csv("/dev/null")  # error rows serialize too

    def test_repeats_one_median_equals_mean(self):
        cell = measure_cell("toy", 2, 1, 1)
        assert cell.sl1m.median == cell.sl1m.mean == cell.sl1m.times[0]

    def test_corridor_family_runs(self):
        rep = run_grid("corridor", [3], [0, 1], repeats=1, parallel=False)
        for c in rep.cells:
            assert c.error is None
            assert c.sl1m.status in ("sparse_direct", "fixed_after_fallback")


class TestTimingSanity:
    def test_wall_time_covers_solver_reported_time(self):
        from stepstone.scenario import gen_toy, to_instance
        from stepstone.sl1m import solve_sl1m
        import time

        inst = to_instance(gen_toy(3, 1))
        t0 = time.perf_counter()
        plan = solve_sl1m(inst)
        wall = time.perf_counter() - t0
        assert 0.0 < plan.solve_time <= wall + 1e-3


class TestHeatmap:
    def test_heatmap_svg_structure(self, tmp_path):
        rep = run_grid("toy", [2, 3], [1, 2], repeats=1, parallel=False)
        path = tmp_path / "heat.svg"
        rep.heatmap_svg(path)
        text = path.read_text()
        assert text.startswith("<svg")
        assert text.count("<rect") == 1 + 4  # background + one per cell
        assert "sl1m / mi" in text

    def test_ratio_color_ramp(self):
        assert _ratio_color(None) == "#bbbbbb"
        assert _ratio_color(1.0) == "#ffffff"
        assert _ratio_color(0.1) == "#648cff"   # sl1m 10x faster: blue end
        assert _ratio_color(10.0) == "#ff735a"  # sl1m 10x slower: red end
        assert _ratio_color(0.01) == _ratio_color(0.1)  # clamped

    def test_error_cells_render(self, tmp_path):
        rep = run_grid("toy", [2], [3], repeats=1, parallel=False)
        path = tmp_path / "err.svg"
        rep.heatmap_svg(path)
        assert "err" in path.read_text()


class TestKernelBenchmark:
    def test_rows_cover_kernels_and_sizes(self):
        rows = run_kernel_benchmark(sizes=(24,), repeats=2)
        kernels = {r["kernel"] for r in rows}
        assert kernels == {"ftran", "btran", "update_binv", "pick_dantzig"}
        for r in rows:
            assert r["size"] == 24
            assert r["numpy_s"] > 0.0
            assert math.isfinite(r["numpy_s"])
            if r["numba_s"] is not None:
                assert r["numba_s"] > 0.0
                assert r["speedup"] == pytest.approx(
                    r["numpy_s"] / r["numba_s"])
