"""Edge-list text format: an `n d` header followed by one `u v` line per edge."""

from pathlib import Path
from typing import List, Optional, Tuple

import structlog

from adapters.io.atomic import atomic_write_text
from core.domain.graph import Graph
from core.exceptions import EdgeListFormatException, GraphLimException
from core.usecases.ports import GraphSourcePort

logger = structlog.get_logger()


def _parse_ints(text: str, source: str, line: int, expected: int, what: str) -> Tuple[int, ...]:
    parts = text.split()
    if len(parts) != expected:
        raise EdgeListFormatException(source, line, f"expected {what}, got {len(parts)} fields")
    try:
        return tuple(int(part) for part in parts)
    except ValueError:
        raise EdgeListFormatException(source, line, f"expected integers for {what}") from None


def parse_edge_list(text: str, source: str = "<string>") -> Graph:
    """Parse edge-list text; blank lines and `#` comments are ignored."""
    header: Optional[Tuple[int, ...]] = None
    header_line = 0
    edges: List[Tuple[int, int]] = []
    lines: List[int] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        if header is None:
            header = _parse_ints(content, source, number, 2, "header 'n d'")
            header_line = number
            continue
        edges.append(_parse_ints(content, source, number, 2, "edge 'u v'"))
        lines.append(number)

    if header is None:
        raise EdgeListFormatException(source, 0, "missing 'n d' header")
    n, d = header
    if n < 0 or d < 1:
        raise EdgeListFormatException(source, header_line, f"need n >= 0 and d >= 1, got n={n}, d={d}")

    # point format errors at the offending line
    seen = set()
    for (u, v), number in zip(edges, lines):
        if not (0 <= u < n and 0 <= v < n):
            raise EdgeListFormatException(source, number, f"vertex out of range [0, {n})")
        if u == v:
            raise EdgeListFormatException(source, number, f"loop at vertex {u}")
        edge = (min(u, v), max(u, v))
        if edge in seen:
            raise EdgeListFormatException(source, number, f"repeated edge {edge}")
        seen.add(edge)

    try:
        return Graph.from_edges(n, edges, d)
    except GraphLimException as e:
        raise EdgeListFormatException(source, header_line, e.message) from e


def format_edge_list(g: Graph) -> str:
    """Edge-list text with sorted `u < v` lines."""
    lines = [f"{g.n} {g.degree_bound}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


class EdgeListAdapter(GraphSourcePort):
    """Reads and writes graphs as UTF-8 edge-list files."""

    def __init__(self, base_dir: Optional[str] = None):
        self.base_dir = Path(base_dir) if base_dir else None

    def _resolve(self, location: str) -> Path:
        path = Path(location)
        if self.base_dir is not None and not path.is_absolute():
            path = self.base_dir / path
        return path

    def read(self, source: str) -> Graph:
        path = self._resolve(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise EdgeListFormatException(str(path), 0, f"cannot read file: {e.strerror}") from e
        g = parse_edge_list(text, str(path))
        logger.debug("Graph loaded", source=str(path), n=g.n, edges=g.num_edges, d=g.degree_bound)
        return g

    def write(self, g: Graph, target: str) -> None:
        path = atomic_write_text(self._resolve(target), format_edge_list(g))
        logger.info("Graph written", target=str(path), n=g.n, edges=g.num_edges)
