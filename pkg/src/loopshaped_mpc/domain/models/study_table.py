"""Tabular study output."""

from dataclasses import dataclass, field

Cell = float | int | str


@dataclass(frozen=True)
class StudyTable:
    """A named table with a fixed column set and ``key = value`` metadata for the file header."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]
    metadata: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValueError(f"table {self.name!r} needs at least one column")
        for index, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"row {index} of table {self.name!r} has {len(row)} cells, "
                    f"expected {len(self.columns)}"
                )

    def column(self, name: str) -> list[Cell]:
        position = self.columns.index(name)
        return [row[position] for row in self.rows]

    def with_metadata(self, metadata: tuple[tuple[str, str], ...]) -> "StudyTable":
        return StudyTable(self.name, self.columns, self.rows, metadata + self.metadata)
