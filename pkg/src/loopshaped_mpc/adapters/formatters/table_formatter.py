"""Plain-text summaries of study tables."""

import math

from loopshaped_mpc.domain.models.study_table import Cell, StudyTable


def _text(value: Cell, precision: int) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "-"
        return f"{value:.{precision}f}"
    return str(value)


def format_table(
    table: StudyTable, columns: tuple[str, ...] | None = None, precision: int = 3
) -> str:
    """Aligned text rendering of ``table``; numbers right-aligned, text left-aligned."""
    selected = columns or table.columns
    positions = [table.columns.index(name) for name in selected]
    cells = [[_text(row[p], precision) for p in positions] for row in table.rows]
    numeric = [
        all(isinstance(row[p], int | float) for row in table.rows) if table.rows else False
        for p in positions
    ]
    widths = [
        max([len(name), *(len(line[i]) for line in cells)]) for i, name in enumerate(selected)
    ]

    def render(values: list[str]) -> str:
        parts = [
            value.rjust(width) if is_number else value.ljust(width)
            for value, width, is_number in zip(values, widths, numeric, strict=True)
        ]
        return "  ".join(parts).rstrip()

    lines = [render(list(selected)), render(["-" * width for width in widths])]
    lines.extend(render(line) for line in cells)
    return "\n".join(lines)


def format_grid_summary(table: StudyTable) -> str:
    """Terrain rows against cost columns, each cell ``MAE (MSE)`` like the published table.

    The published simulation values follow in a second block for comparison.
    """
    terrains = list(dict.fromkeys(str(v) for v in table.column("terrain")))
    costs = list(dict.fromkeys(str(v) for v in table.column("cost")))
    ours = _pairs(table, "mae", "mse")
    published = _pairs(table, "published_sim_mae", "published_sim_mse")

    def block(title: str, values: dict[tuple[str, str], tuple[Cell, Cell]]) -> str:
        rows = tuple(
            (terrain, *(_pair(values.get((terrain, cost))) for cost in costs))
            for terrain in terrains
        )
        return f"{title}\n" + format_table(StudyTable(title, ("terrain", *costs), rows))

    return "\n\n".join(
        [
            block("Force tracking MAE (MSE) [N (N^2)]", ours),
            block("Published reference, different plant", published),
        ]
    )


def _pairs(
    table: StudyTable, first: str, second: str
) -> dict[tuple[str, str], tuple[Cell, Cell]]:
    keys = zip(table.column("terrain"), table.column("cost"), strict=True)
    values = zip(table.column(first), table.column(second), strict=True)
    return {(str(t), str(c)): pair for (t, c), pair in zip(keys, values, strict=True)}


def _pair(values: tuple[Cell, Cell] | None) -> str:
    if values is None:
        return "-"
    mae, mse = values
    return f"{_text(mae, 1)} ({_text(mse, 1)})"
