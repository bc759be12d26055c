"""Result writer port."""

from abc import ABC, abstractmethod
from pathlib import Path

from loopshaped_mpc.domain.models.study_table import StudyTable


class ResultWriter(ABC):
    """Port for persisting study tables."""

    @abstractmethod
    def write(self, table: StudyTable, file_name: str) -> Path:
        """Write ``table`` under ``file_name`` and return the path written."""
        ...
