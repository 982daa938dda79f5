# quotatope/infrastructure/dataset_writer.py

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Type
import csv
import json

import numpy as np

from quotatope.infrastructure.interfaces import Dataset, DatasetWriterInterface
from quotatope.utils.logger import get_logger

logger = get_logger(__name__)

REAL_FORMAT = ".12g"


def format_value(value: Any) -> str:
    """Exact integers as written, reals at 12 significant digits, None as an empty cell."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (Fraction, float, np.floating)):
        return format(float(value), REAL_FORMAT)
    return str(value)


def json_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (Fraction, float, np.floating)):
        return float(format(float(value), REAL_FORMAT))
    return value


class CsvDatasetWriter(DatasetWriterInterface):
    """UTF-8 CSV with a header row and LF line endings."""
    extension = "csv"

    def write(self, dataset: Dataset, directory: Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{dataset.name}.{self.extension}"
        with open(path, mode="w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(dataset.columns)
            for row in dataset.rows:
                writer.writerow([format_value(v) for v in row])
        logger.info(f"Wrote {len(dataset.rows)} rows to {path}")
        return path


class JsonDatasetWriter(DatasetWriterInterface):
    """A JSON document with the columns, the rows as objects and any metadata."""
    extension = "json"

    def write(self, dataset: Dataset, directory: Path) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / f"{dataset.name}.{self.extension}"
        payload: Dict[str, Any] = {
            "name": dataset.name,
            "columns": dataset.columns,
            "rows": [
                {column: json_value(v) for column, v in zip(dataset.columns, row)}
                for row in dataset.rows
            ],
        }
        if dataset.metadata:
            payload["metadata"] = {k: json_value(v) for k, v in dataset.metadata.items()}
        with open(path, mode="w", encoding="utf-8", newline="\n") as f:
            json.dump(payload, f, indent=2, ensure_ascii=False)
            f.write("\n")
        logger.info(f"Wrote {len(dataset.rows)} records to {path}")
        return path


def create_dataset_writer(output_format: str = "csv") -> DatasetWriterInterface:
    writers: Dict[str, Type[DatasetWriterInterface]] = {
        "csv": CsvDatasetWriter,
        "json": JsonDatasetWriter,
    }
    if output_format not in writers:
        raise ValueError(f"Unsupported output format: {output_format}")
    return writers[output_format]()
