"""Tests for the verification sweeps."""

import pytest

from src.oracles.checks import (CellResult, CheckReport, CheckTask, check_adem, check_bar, check_bm,
                                check_e2, check_koszul, check_lie, check_nishida, check_stability,
                                e2_table, run_tasks)


def _failing_task(key):
    return [CellResult("demo", (key,), key != 2, f"cell {key}")]


class TestRunTasks:

    def test_report_is_sorted_and_failures_listed(self):
        tasks = [CheckTask(_failing_task, {"key": k}) for k in (3, 1, 2)]
        report = run_tasks("demo", tasks)
        assert [c.cell for c in report.cells] == [(1,), (2,), (3,)]
        assert not report.ok
        assert [c.cell for c in report.failures()] == [(2,)]
        assert report.summary().startswith("FAIL")

    def test_process_pool_matches_inline(self):
        pooled = check_koszul(2, index_window=2, jobs=2)
        assert pooled.cells == check_koszul(2, index_window=2, jobs=1).cells
        assert pooled.ok

    def test_rows(self):
        report = CheckReport("demo", {}, [CellResult("demo", (0, 1), True, "ok")])
        assert report.rows() == [{"check": "demo", "cell": "0,1", "passed": True, "detail": "ok"}]
        assert report.ok and report.summary().startswith("PASS")

    def test_empty_report_passes(self):
        assert run_tasks("demo", []).ok


class TestChecks:

    def test_bm(self):
        report = check_bm(2, [(1,), (0,)], (-20, 3), 8)
        assert report.ok, report.failures()
        assert report.cells

    def test_bm_at_three(self):
        report = check_bm(3, [(1, 2)], (-14, 4), 9)
        assert report.ok, report.failures()

    def test_bar(self):
        report = check_bar([0], 3, (-8, 1))
        assert report.ok, report.failures()
        assert len(report.cells) == 10 * 3

    def test_adem_at_two(self):
        report = check_adem(2, index_window=3, source_window=2, index_cap=6, filtration_cap=2)
        assert report.ok, report.failures()
        assert {c.cell[0] for c in report.cells} == {"confluence", "R-relations", "translation"}
        confluence = [c.cell for c in report.cells if c.cell[0] == "confluence"]
        assert {cell[2] for cell in confluence} == {"additive", "full"}
        assert len(confluence) == 2 * 5

    def test_adem_at_three(self):
        report = check_adem(3, index_window=2, source_window=1, index_cap=4, filtration_cap=2,
                            degree_window=(-16, None))
        assert report.ok, report.failures()
        assert {c.cell[2] for c in report.cells if c.cell[0] == "confluence"} == {"additive"}

    @pytest.mark.parametrize("p", [2, 3])
    def test_lie(self, p):
        report = check_lie(p, [(1, 2), (1, 1, 3)], weight_cap=4)
        assert report.ok, report.failures()
        assert len(report.cells) == 6

    def test_nishida(self):
        report = check_nishida(2, class_degrees=(9, 12), index_cap=5, samples=20)
        assert report.ok, report.failures()
        assert (12, "bottom") in [c.cell for c in report.cells]

    def test_nishida_odd_prime_homogeneity_only(self):
        report = check_nishida(3, class_degrees=(1, 3), index_cap=3)
        assert report.ok, report.failures()
        assert {c.cell[1] for c in report.cells} == {"homogeneous"}

    def test_koszul(self, small_prime):
        report = check_koszul(small_prime, index_window=3)
        assert report.ok, report.failures()

    @pytest.mark.parametrize("p,j,cap", [(2, 0, 8), (2, 1, 8), (3, 1, 9), (3, 2, 9)])
    def test_e2(self, p, j, cap):
        report = check_e2(p, [j], (j - 24, j + 2), cap)
        assert report.ok, report.failures()

    def test_e2_table_weight_one(self):
        assert e2_table(3, 2, (-10, 5), 1)[(3, 1)] == 1

    def test_stability(self):
        report = check_stability(2, [-1, 0, 2], weight_exp_cap=2, window=(-12, None), index_cap=5)
        assert report.ok, report.failures()
