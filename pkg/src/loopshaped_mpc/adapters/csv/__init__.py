"""CSV output adapters."""

from loopshaped_mpc.adapters.csv.csv_result_writer import CsvResultWriter, format_cell

__all__ = ["CsvResultWriter", "format_cell"]
