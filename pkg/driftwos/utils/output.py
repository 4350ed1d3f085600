"""CSV and JSON writers for solver output.

Floats are written with repr(), the shortest decimal string that round-trips
to the same double, so identical results give byte-identical files.
"""

import csv
import io
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from driftwos.models.estimate import SkippedNode
from driftwos.models.run_config import SolveRecord

RECORD_FIELDS = ["mean", "stderr", "ci_lo", "ci_hi", "n_walks", "mean_steps", "budget_failures", "degraded"]


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def coordinate_header(prefix: str, dim: int) -> List[str]:
    return [f"{prefix}{axis}" for axis in range(1, dim + 1)]


def records_to_csv(records: Sequence[SolveRecord], dim: int) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(coordinate_header("x", dim) + RECORD_FIELDS)
    for record in records:
        row = [*record.point, *(getattr(record, name) for name in RECORD_FIELDS)]
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def records_to_json(records: Sequence[SolveRecord], skipped: Sequence[SkippedNode] = ()) -> str:
    payload = {
        "records": [record.model_dump(mode="json") for record in records],
        "skipped": [node.model_dump(mode="json") for node in skipped],
    }
    return json.dumps(payload, indent=2) + "\n"


def directions_to_csv(directions: np.ndarray) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(coordinate_header("w", directions.shape[1]))
    for row in directions:
        writer.writerow([repr(float(value)) for value in row])
    return buffer.getvalue()


def write_text(text: str, path: Optional[str]) -> None:
    """Write to ``path`` (parents created) or to stdout when path is None."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
