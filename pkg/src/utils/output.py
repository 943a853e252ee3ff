"""
Dimension tables and row serialization for the command line.

Rows are plain dicts ``{word, degree, weight, coeff}``; ``coeff`` is left
out for basis listings.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, TextIO, Tuple

import pandas as pd

from src.utils.config import Config

logger = logging.getLogger(__name__)

ROW_COLUMNS = ["word", "degree", "weight", "coeff"]


@dataclass
class DimTable:
    """Counts of basis elements per (degree, weight) cell."""
    counts: Dict[Tuple[int, int], int] = field(default_factory=dict)

    @classmethod
    def from_items(cls, items: Iterable[Any]) -> "DimTable":
        """Anything with ``degree`` and ``weight`` attributes."""
        tally = Counter((item.degree, item.weight) for item in items)
        return cls(dict(tally))

    def __getitem__(self, cell: Tuple[int, int]) -> int:
        return self.counts.get(cell, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DimTable):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    def nonzero(self) -> Dict[Tuple[int, int], int]:
        return {cell: n for cell, n in self.counts.items() if n}

    def cells(self) -> List[Tuple[int, int]]:
        return sorted(self.nonzero())

    def mismatches(self, other: "DimTable") -> List[Tuple[Tuple[int, int], int, int]]:
        """Cells where the two tables differ, as (cell, mine, theirs)."""
        cells = sorted(set(self.nonzero()) | set(other.nonzero()))
        return [(cell, self[cell], other[cell]) for cell in cells if self[cell] != other[cell]]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"degree": d, "weight": w, "dim": n} for (d, w), n in sorted(self.nonzero().items())]
        return pd.DataFrame(rows, columns=["degree", "weight", "dim"])

    def pivot(self) -> pd.DataFrame:
        """Degree by weight table with zeros filled in."""
        frame = self.to_frame()
        if frame.empty:
            return frame
        return frame.pivot_table(index="degree", columns="weight", values="dim",
                                 aggfunc="sum", fill_value=0).sort_index(ascending=False)


def rows_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    columns = [c for c in ROW_COLUMNS if any(c in row for row in rows)] or ROW_COLUMNS[:3]
    return pd.DataFrame(rows, columns=columns)


def display_rows(rows: List[Dict[str, Any]], config: Config) -> List[Dict[str, Any]]:
    """Apply the grading convention to the degree column."""
    return [{**row, "degree": config.display_degree(row["degree"])} if "degree" in row else row
            for row in rows]


def write_rows(rows: List[Dict[str, Any]], config: Config, stream: TextIO,
               title: Optional[str] = None) -> None:
    """Serialize rows in the configured output format."""
    rows = display_rows(rows, config)
    if config.output_format == "json":
        json.dump({"meta": config.model_dump(), "rows": rows}, stream, ensure_ascii=False)
        stream.write("\n")
        return
    frame = rows_frame(rows)
    if config.output_format == "csv":
        frame.to_csv(stream, index=False)
        return
    if title:
        stream.write(f"{'=' * 60}\n{title}\n{'=' * 60}\n")
    if frame.empty:
        stream.write("(empty)\n")
    else:
        stream.write(frame.to_string(index=False) + "\n")
    stream.write(f"{len(rows)} rows\n")


def write_report(report: Any, config: Config, stream: TextIO, show_all: bool = False) -> None:
    """
    Serialize a check report (anything with ``rows()``, ``failures()``,
    ``summary()``, ``ok`` and ``params``). Text output lists failures only
    unless ``show_all``.
    """
    rows = report.rows()
    if config.output_format == "json":
        meta = {**config.model_dump(), **report.params}
        json.dump({"meta": meta, "ok": report.ok, "summary": report.summary(), "rows": rows},
                  stream, ensure_ascii=False, default=str)
        stream.write("\n")
        return
    if config.output_format == "csv":
        pd.DataFrame(rows, columns=["check", "cell", "passed", "detail"]).to_csv(stream, index=False)
        return
    stream.write(f"{'=' * 60}\ncheck {report.check}\n{'=' * 60}\n")
    shown = rows if show_all else [row for row in rows if not row["passed"]]
    for row in shown:
        verdict = "ok  " if row["passed"] else "FAIL"
        stream.write(f"  {verdict} {row['cell']:<24} {row['detail']}\n")
    stream.write(report.summary() + "\n")


def write_table(table: DimTable, config: Config, stream: TextIO, pivot: bool = False,
                title: Optional[str] = None) -> None:
    """Serialize a DimTable, long (degree, weight, dim) or pivoted."""
    frame = table.to_frame()
    if config.grading == "cohomological":
        frame["degree"] = -frame["degree"]
    if config.output_format == "json":
        rows = frame.to_dict(orient="records")
        json.dump({"meta": config.model_dump(), "rows": [{k: int(v) for k, v in r.items()} for r in rows]},
                  stream, ensure_ascii=False)
        stream.write("\n")
        return
    if pivot and not frame.empty:
        frame = frame.pivot_table(index="degree", columns="weight", values="dim",
                                  aggfunc="sum", fill_value=0).sort_index(ascending=False)
        if config.output_format == "csv":
            frame.to_csv(stream)
            return
        if title:
            stream.write(f"{'=' * 60}\n{title}\n{'=' * 60}\n")
        stream.write(frame.to_string() + "\n")
        return
    if config.output_format == "csv":
        frame.to_csv(stream, index=False)
        return
    if title:
        stream.write(f"{'=' * 60}\n{title}\n{'=' * 60}\n")
    stream.write(("(empty)" if frame.empty else frame.to_string(index=False)) + "\n")
