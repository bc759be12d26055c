"""Tests for the CSV writer and the text formatters."""

import csv
import math
from pathlib import Path

import pytest

from loopshaped_mpc.adapters.csv import CsvResultWriter
from loopshaped_mpc.adapters.csv.csv_result_writer import format_cell
from loopshaped_mpc.adapters.formatters import format_grid_summary, format_table
from loopshaped_mpc.domain.models.study_table import StudyTable


@pytest.mark.parametrize(
    ("value", "text"),
    [
        (0.1, "0.1"),
        (1e-12, "1e-12"),
        (math.nan, "nan"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (3, "3"),
        ("baseline", "baseline"),
    ],
)
def test_cell_text(value: float | int | str, text: str) -> None:
    """Given a cell, when formatting for CSV, then the shortest faithful text is used."""
    assert format_cell(value) == text


def test_writer_puts_metadata_above_the_header(tmp_path: Path) -> None:
    """Given a table with metadata, when writing, then comment lines precede the header."""
    table = StudyTable(
        "grf", ("cost", "fz"), (("baseline", 73.575), ("10", math.nan)), (("seed", "0"),)
    )

    path = CsvResultWriter(tmp_path / "out").write(table, "grf.csv")

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# seed = 0"
    rows = list(csv.reader(lines[1:]))
    assert rows == [["cost", "fz"], ["baseline", "73.575"], ["10", "nan"]]


def test_writer_creates_missing_directories(tmp_path: Path) -> None:
    """Given a nested output directory, when writing, then it is created."""
    target = tmp_path / "a" / "b"

    path = CsvResultWriter(target).write(StudyTable("t", ("x",), ((1.0,),)), "t.csv")

    assert path == target / "t.csv"
    assert path.exists()


def test_table_alignment() -> None:
    """Given numbers and text, when formatting, then numbers align right and text left."""
    table = StudyTable("t", ("cost", "mae"), (("baseline", 4.8), ("10", 12.25)))

    lines = format_table(table, precision=2).splitlines()

    assert lines[0] == "cost        mae"
    assert lines[1] == "--------  -----"
    assert lines[2] == "baseline   4.80"
    assert lines[3] == "10        12.25"


def test_table_column_selection_and_missing_values() -> None:
    """Given a NaN and a column subset, when formatting, then only those columns show, NaN as -."""
    table = StudyTable("t", ("a", "b", "c"), ((1.0, math.nan, "x"),))

    text = format_table(table, ("b", "c"))

    assert "a" not in text.splitlines()[0]
    assert text.splitlines()[2].startswith("-")


def test_grid_summary_pivots_terrain_against_cost() -> None:
    """Given grid rows, when summarizing, then each terrain is a row of MAE (MSE) pairs."""
    table = StudyTable(
        "grid",
        ("terrain", "cost", "mae", "mse", "published_sim_mae", "published_sim_mse"),
        (
            ("hard", "baseline", 4.0, 30.0, 4.8, 303.5),
            ("hard", "10", 3.0, 20.0, 5.0, 104.2),
            ("soft", "baseline", 9.0, 90.0, 13.5, 525.5),
        ),
    )

    summary = format_grid_summary(table)

    assert "4.0 (30.0)" in summary
    assert "4.8 (303.5)" in summary
    soft_line = next(line for line in summary.splitlines() if line.startswith("soft"))
    assert soft_line.split()[-1] == "-"
    assert "Published reference, different plant" in summary
