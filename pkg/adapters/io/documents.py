"""JSON and CSV documents: sequence manifests, kernel specifications and real sequences."""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import structlog
from pydantic import ValidationError

from core.domain.canonical import CanonicalBallKey, canonical_form
from core.domain.entities import SequenceManifest
from core.domain.graph import Graph, RootedGraph
from core.exceptions import (
    GraphLimException,
    InvalidDocumentException,
    InvalidManifestException,
)
from core.usecases.ports import DocumentSourcePort
from core.usecases.spectral import KernelSpec

logger = structlog.get_logger()


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidDocumentException(str(path), "<file>", f"cannot read file: {e.strerror}") from e


def _read_json(path: Path) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise InvalidDocumentException(str(path), "<json>", f"line {e.lineno}: {e.msg}") from e


def _field_name(error: Dict[str, Any]) -> str:
    return ".".join(str(part) for part in error.get("loc", ())) or "<root>"


def parse_manifest(document: Any, source: str, base_dir: Optional[Path] = None) -> SequenceManifest:
    """Validate a manifest document and resolve member paths against base_dir."""
    try:
        manifest = SequenceManifest.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        raise InvalidManifestException(_field_name(first), first.get("msg", "invalid value")) from e
    if base_dir is None:
        return manifest
    members = []
    for member in manifest.members:
        if member.path is not None and not Path(member.path).is_absolute():
            member = member.model_copy(update={"path": str(base_dir / member.path)})
        members.append(member)
    logger.debug("Manifest parsed", source=source, members=len(members), d=manifest.d)
    return manifest.model_copy(update={"members": members})


def _inline_ball(entry: Dict[str, Any], source: str, index: int) -> Tuple[CanonicalBallKey, Tuple[int, ...]]:
    field = f"entries[{index}].ball"
    try:
        n = int(entry["n"])
        root = int(entry.get("root", 0))
        edges = [(int(u), int(v)) for u, v in entry.get("edges", [])]
    except (KeyError, TypeError, ValueError):
        raise InvalidDocumentException(source, field, "inline balls need n, root and edges [[u, v], ...]") from None
    degrees = [0] * max(n, 0)
    for u, v in edges:
        if 0 <= u < n and 0 <= v < n:
            degrees[u] += 1
            degrees[v] += 1
    try:
        g = Graph.from_edges(n, edges, max([1] + degrees))
        form = canonical_form(RootedGraph(g, root))
    except GraphLimException as e:
        raise InvalidDocumentException(source, field, e.message) from e
    return form.key, form.labeling


def parse_kernel(document: Any, source: str) -> KernelSpec:
    """KernelSpec from {R, entries: [{ball, values}]}; inline balls are put in canonical order."""
    if not isinstance(document, dict):
        raise InvalidDocumentException(source, "<root>", "expected a JSON object")
    try:
        R = int(document["R"])
    except (KeyError, TypeError, ValueError):
        raise InvalidDocumentException(source, "R", "integer range required") from None
    entries = document.get("entries")
    if not isinstance(entries, list):
        raise InvalidDocumentException(source, "entries", "list of {ball, values} required")

    table: Dict[CanonicalBallKey, Tuple[float, ...]] = {}
    for index, entry in enumerate(entries):
        if not isinstance(entry, dict) or "ball" not in entry or "values" not in entry:
            raise InvalidDocumentException(source, f"entries[{index}]", "needs 'ball' and 'values'")
        try:
            values = [float(value) for value in entry["values"]]
        except (TypeError, ValueError):
            raise InvalidDocumentException(source, f"entries[{index}].values", "numbers required") from None

        ball = entry["ball"]
        if isinstance(ball, str):
            try:
                key = CanonicalBallKey.from_hex(ball)
            except GraphLimException as e:
                raise InvalidDocumentException(source, f"entries[{index}].ball", e.message) from e
            ordered = tuple(values)
        else:
            if not isinstance(ball, dict):
                raise InvalidDocumentException(source, f"entries[{index}].ball", "hex key or inline ball required")
            key, labeling = _inline_ball(ball, source, index)
            if len(values) != key.size:
                raise InvalidDocumentException(
                    source, f"entries[{index}].values", f"ball has {key.size} vertices, got {len(values)} values"
                )
            canonical = [0.0] * key.size
            for local, value in enumerate(values):
                canonical[labeling[local]] = value
            ordered = tuple(canonical)

        if key in table and table[key] != ordered:
            raise InvalidDocumentException(source, f"entries[{index}]", f"conflicting values for class {key.hex}")
        table[key] = ordered

    name = str(document.get("name", Path(source).stem))
    try:
        return KernelSpec(name=name, R=R, table=table)
    except GraphLimException as e:
        logger.error("Kernel specification rejected", source=source, error=e.message)
        raise


def parse_reals(text: str, source: str) -> List[float]:
    """One value per line, or `n,a_n` rows with n = 1, 2, ...; non-numeric header lines are skipped."""
    values: List[float] = []
    indexed: Optional[bool] = None
    for number, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [cell.strip() for cell in row if cell.strip()]
        if not cells or cells[0].startswith("#"):
            continue
        try:
            numbers = [float(cell) for cell in cells]
        except ValueError:
            if values:
                raise InvalidDocumentException(source, f"line {number}", "non-numeric row after data") from None
            continue
        if len(numbers) > 2:
            raise InvalidDocumentException(source, f"line {number}", "expected 'a_n' or 'n,a_n'")
        if indexed is None:
            indexed = len(numbers) == 2
        if indexed != (len(numbers) == 2):
            raise InvalidDocumentException(source, f"line {number}", "mixed one- and two-column rows")
        if indexed and numbers[0] != len(values) + 1:
            raise InvalidDocumentException(source, f"line {number}", f"expected index {len(values) + 1}")
        value = numbers[-1]
        if not math.isfinite(value):
            raise InvalidDocumentException(source, f"line {number}", "values must be finite")
        values.append(value)
    if not values:
        raise InvalidDocumentException(source, "<data>", "no values found")
    return values


class DocumentAdapter(DocumentSourcePort):
    """Loads experiment documents from the filesystem."""

    def load_manifest(self, source: str) -> SequenceManifest:
        path = Path(source)
        return parse_manifest(_read_json(path), str(path), path.parent)

    def load_kernel(self, source: str) -> KernelSpec:
        path = Path(source)
        kernel = parse_kernel(_read_json(path), str(path))
        logger.info("Kernel loaded", source=str(path), R=kernel.R, classes=len(kernel.table))
        return kernel

    def load_reals(self, source: str) -> List[float]:
        path = Path(source)
        return parse_reals(_read_text(path), str(path))
