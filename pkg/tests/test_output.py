"""Tests for configuration and output helpers."""

import io
import json

import pytest
from pydantic import ValidationError

from src.oracles.checks import CellResult, CheckReport
from src.utils.config import Config
from src.utils.output import DimTable, write_report, write_rows, write_table


ROWS = [{"word": "R2", "degree": -2, "weight": 2}, {"word": "R1", "degree": -1, "weight": 2}]


class TestConfig:

    def test_defaults(self):
        config = Config()
        assert config.p == 2 and config.window == (-30, 30) and config.weight_cap == 4

    @pytest.mark.parametrize("p", [1, 4, 9])
    def test_rejects_non_primes(self, p):
        with pytest.raises(ValidationError):
            Config(p=p)

    def test_rejects_empty_window(self):
        with pytest.raises(ValidationError):
            Config(window=(3, 1))

    def test_rejects_unbounded_window(self):
        with pytest.raises(ValidationError):
            Config(window=(0, None))

    def test_display_degree(self):
        assert Config(grading="cohomological").display_degree(-4) == 4
        assert Config().display_degree(-4) == -4


class TestDimTable:

    def test_equality_ignores_zero_cells(self):
        assert DimTable({(0, 1): 1, (1, 2): 0}) == DimTable({(0, 1): 1})

    def test_mismatches(self):
        left, right = DimTable({(0, 1): 1, (-1, 2): 2}), DimTable({(0, 1): 1, (-2, 2): 1})
        assert left.mismatches(right) == [((-2, 2), 0, 1), ((-1, 2), 2, 0)]

    def test_pivot(self):
        frame = DimTable({(0, 1): 1, (-1, 2): 2, (-2, 2): 1}).pivot()
        assert list(frame.index) == [0, -1, -2]
        assert frame.loc[-1, 2] == 2 and frame.loc[0, 2] == 0


class TestWriters:

    def test_json_rows_carry_meta(self):
        stream = io.StringIO()
        write_rows(ROWS, Config(grading="cohomological", output_format="json"), stream)
        payload = json.loads(stream.getvalue())
        assert payload["meta"]["grading"] == "cohomological"
        assert [row["degree"] for row in payload["rows"]] == [2, 1]

    def test_csv_header(self):
        stream = io.StringIO()
        write_rows([{**row, "coeff": 1} for row in ROWS], Config(output_format="csv"), stream)
        assert stream.getvalue().splitlines()[0] == "word,degree,weight,coeff"

    def test_text_empty(self):
        stream = io.StringIO()
        write_rows([], Config(output_format="text"), stream, "nothing")
        assert "(empty)" in stream.getvalue()

    def test_table_json(self):
        stream = io.StringIO()
        write_table(DimTable({(-1, 2): 3}), Config(output_format="json"), stream)
        assert json.loads(stream.getvalue())["rows"] == [{"degree": -1, "weight": 2, "dim": 3}]

    def test_report_text_lists_failures_only(self):
        report = CheckReport("demo", {}, [CellResult("demo", (0,), True, "fine"),
                                          CellResult("demo", (1,), False, "off by one")])
        stream = io.StringIO()
        write_report(report, Config(), stream)
        out = stream.getvalue()
        assert "off by one" in out and "fine" not in out
        assert out.splitlines()[-1].startswith("FAIL: demo")
