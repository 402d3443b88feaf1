"""Tests for the edge-list format."""

from pathlib import Path

import pytest

from adapters.io.edge_list import EdgeListAdapter, format_edge_list, parse_edge_list
from core.exceptions import EdgeListFormatException
from core.usecases.ports import GraphSourcePort
from core.usecases.sequences import gen_cycle, gen_torus


def test_parse_with_comments_and_blank_lines():
    """Comments and blank lines are skipped; edges may come in any order."""
    text = "# triangle\n3 2\n\n2 1  # last\n0 1\n0 2\n"
    g = parse_edge_list(text)

    assert g == gen_cycle(3)


def test_format_is_sorted_and_parseable():
    """Formatted text lists the header and sorted u < v lines."""
    text = format_edge_list(gen_cycle(4))

    assert text == "4 2\n0 1\n0 3\n1 2\n2 3\n"
    assert parse_edge_list(text) == gen_cycle(4)


@pytest.mark.parametrize("text,line", [
    ("", 0),
    ("3\n", 1),
    ("3 2\n0 x\n", 2),
    ("3 2\n0 1\n1 3\n", 3),
    ("3 2\n0 1\n1 1\n", 3),
    ("3 2\n0 1\n1 0\n", 3),
    ("3 0\n", 1),
    ("4 1\n0 1\n0 2\n", 1),
])
def test_format_errors_name_the_line(text, line):
    """Malformed input points at the offending line."""
    with pytest.raises(EdgeListFormatException) as excinfo:
        parse_edge_list(text, "graph.txt")

    assert excinfo.value.details["line"] == line
    assert excinfo.value.details["source"] == "graph.txt"


def test_adapter_round_trip(tmp_path: Path):
    """Graphs written by the adapter read back equal, relative to base_dir."""
    adapter = EdgeListAdapter(str(tmp_path))
    adapter.write(gen_torus(3), "nested/t3.txt")

    assert (tmp_path / "nested" / "t3.txt").exists()
    assert adapter.read("nested/t3.txt") == gen_torus(3)


def test_adapter_missing_file(tmp_path: Path):
    """Unreadable files are reported as format errors at line 0."""
    with pytest.raises(EdgeListFormatException) as excinfo:
        EdgeListAdapter().read(str(tmp_path / "absent.txt"))

    assert excinfo.value.details["line"] == 0


def test_edge_list_adapter_is_the_graph_source():
    """The edge-list adapter fills the graph source port."""
    assert issubclass(EdgeListAdapter, GraphSourcePort)
    assert isinstance(EdgeListAdapter(), GraphSourcePort)
