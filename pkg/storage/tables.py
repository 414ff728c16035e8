"""
Scan Table Module
Scan results as CSV with 17-significant-digit numbers and LF line endings
"""

import csv
import logging
from pathlib import Path
from typing import Dict, List, Union

from experiments.scans import ScanResult

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("purity", "squeezing_db", "feasible", "symplectic_min")


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def write_scan_csv(result: ScanResult, path: Union[str, Path]) -> Path:
    """One row per scan point: axis values, then purity, squeezing_db, feasible, symplectic_min"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(result.axis_names) + list(METRIC_COLUMNS)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for record in result.records:
            writer.writerow([_format(v) for v in record.row(result.axis_names)])
    logger.info("%d scan rows written to %s", len(result.records), path)
    return path


def _parse(value: str):
    if value == "":
        return None
    if value in ("true", "false"):
        return value == "true"
    try:
        return int(value)
    except ValueError:
        return float(value)


def read_scan_csv(path: Union[str, Path]) -> List[Dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return [{key: _parse(value) for key, value in row.items()} for row in csv.DictReader(f)]
