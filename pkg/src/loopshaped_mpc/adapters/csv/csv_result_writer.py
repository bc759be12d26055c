"""CSV result writer."""

import csv
import logging
import math
from pathlib import Path

from loopshaped_mpc.domain.models.study_table import Cell, StudyTable
from loopshaped_mpc.domain.ports.result_writer import ResultWriter

logger = logging.getLogger(__name__)


def format_cell(value: Cell) -> str:
    """Shortest round-tripping text of a cell; non-finite floats as ``nan``/``inf``/``-inf``."""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


class CsvResultWriter(ResultWriter):
    """Writes study tables as UTF-8 CSV files below ``out_dir``.

    Each file starts with ``# key = value`` lines holding the table metadata, then the header row.
    """

    def __init__(self, out_dir: str | Path) -> None:
        self.out_dir = Path(out_dir)

    def write(self, table: StudyTable, file_name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / file_name
        with open(path, "w", encoding="utf-8", newline="") as f:
            for key, value in table.metadata:
                f.write(f"# {key} = {value}\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(table.columns)
            writer.writerows([format_cell(cell) for cell in row] for row in table.rows)
        logger.info(f"Wrote {len(table.rows)} row(s) of {table.name} to {path}")
        return path
