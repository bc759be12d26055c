"""Text formatters for study output."""

from loopshaped_mpc.adapters.formatters.table_formatter import format_grid_summary, format_table

__all__ = ["format_grid_summary", "format_table"]
