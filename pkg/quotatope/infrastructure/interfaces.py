# quotatope/infrastructure/interfaces.py

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence


@dataclass
class Dataset:
    """Data class for one output table: a name, its columns and the rows in order."""
    name: str
    columns: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)
    metadata: Optional[Dict[str, Any]] = None

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


class DatasetWriterInterface(ABC):
    """Abstract interface for dataset writers."""

    extension: str

    @abstractmethod
    def write(self, dataset: Dataset, directory: Path) -> Path:
        """Write the dataset under directory and return the file path."""
        pass


class PlotterInterface(ABC):
    """Interface for scatter plot output."""

    @abstractmethod
    def scatter(self, dataset: Dataset, x: str, y: str, path: Path, group: Optional[str] = None) -> Path:
        pass
