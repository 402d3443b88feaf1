"""Atomic JSON and CSV report writer."""

import csv
import io
import json
import platform
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import structlog

import core
from adapters.io.atomic import atomic_write_text
from core.usecases.ports import ReportSinkPort

logger = structlog.get_logger()

VERSIONED_PACKAGES = ("numpy", "scipy", "networkx")


def collect_versions() -> Dict[str, Optional[str]]:
    """Versions recorded in every report."""
    versions: Dict[str, Optional[str]] = {
        "graphlim": core.__version__,
        "python": platform.python_version(),
    }
    for package in VERSIONED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = None
    return versions


def _jsonable(value: Any) -> Any:
    """Fallback encoder for numpy scalars, arrays, fractions and paths."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return float(value)
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def _sanitize(value: Any) -> Any:
    # JSON has no infinities; encode them as strings
    if isinstance(value, float) and not np.isfinite(value):
        return "nan" if np.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return value


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(_sanitize(payload), sort_keys=True, indent=2, default=_jsonable, ensure_ascii=False) + "\n"


def render_csv(header: Sequence[str], rows: List[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([cell.item() if isinstance(cell, np.generic) else cell for cell in row])
    return buffer.getvalue()


class ReportWriter(ReportSinkPort):
    """Writes `<output_dir>/<name>` files atomically."""

    def __init__(self, output_dir: str, formats: Sequence[str] = ("json", "csv")):
        self.output_dir = Path(output_dir)
        self.formats = set(formats)

    def write_json(self, name: str, payload: Dict[str, Any]) -> str:
        if "json" not in self.formats:
            return ""
        path = atomic_write_text(self.output_dir / f"{name}.json", render_json(payload))
        logger.info("Report written", path=str(path))
        return str(path)

    def write_csv(self, name: str, header: Sequence[str], rows: List[Sequence[Any]]) -> str:
        if "csv" not in self.formats:
            return ""
        path = atomic_write_text(self.output_dir / f"{name}.csv", render_csv(header, rows))
        logger.debug("Table written", path=str(path), rows=len(rows))
        return str(path)
