"""Test configuration and fixtures."""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
import pytest

from adapters.io.documents import DocumentAdapter
from adapters.io.edge_list import EdgeListAdapter, format_edge_list
from adapters.reports.writer import ReportWriter
from config.settings import Settings, get_settings
from core.domain.graph import Graph
from core.usecases.experiments import ExperimentRunner
from core.usecases.sequences import gen_cycle, gen_path


def pytest_configure(config):
    config.addinivalue_line("markers", "integration: end-to-end command-line tests")


@pytest.fixture(autouse=True)
def clear_settings_cache():
    """Settings are cached per process; tests that touch the environment need a fresh copy."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def test_settings() -> Settings:
    """Test settings."""
    return Settings(
        ENVIRONMENT="testing",
        LOG_LEVEL="WARNING",
        LOG_FORMAT="console",
        SEED=0,
        THREADS=1,
        OUTPUT_DIR="reports",
    )


@pytest.fixture
def p3() -> Graph:
    """Path on three vertices with degree bound 2."""
    return gen_path(3)


@pytest.fixture
def k3() -> Graph:
    """Triangle with degree bound 2."""
    return gen_cycle(3)


@pytest.fixture
def random_graph() -> Callable[..., Graph]:
    """Seeded random graph on n vertices with every degree at most d."""

    def make(rng: np.random.Generator, n: int, d: int = 3) -> Graph:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        tries = int(rng.integers(0, len(pairs) + 1))
        degree = [0] * n
        edges = []
        for index in rng.permutation(len(pairs))[:tries]:
            u, v = pairs[index]
            if degree[u] < d and degree[v] < d:
                edges.append((u, v))
                degree[u] += 1
                degree[v] += 1
        return Graph.from_edges(n, edges, d)

    return make


@pytest.fixture
def write_graph(tmp_path: Path) -> Callable[[Graph, str], str]:
    """Write a graph as an edge-list file under tmp_path and return its path."""

    def write(g: Graph, name: str) -> str:
        path = tmp_path / name
        path.write_text(format_edge_list(g), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def write_manifest(tmp_path: Path) -> Callable[..., str]:
    """Write a sequence manifest JSON under tmp_path and return its path."""

    def write(d: int, members: List[Dict[str, Any]], name: str = "seq.json", **extra: Any) -> str:
        path = tmp_path / name
        path.write_text(json.dumps({"d": d, "members": members, **extra}), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def path_members() -> Callable[[List[int]], List[Dict[str, Any]]]:
    """Manifest members for paths of the given sizes."""
    return lambda sizes: [{"family": "path", "params": {"n": n}} for n in sizes]


@pytest.fixture
def report_dir(tmp_path: Path) -> Path:
    """Directory that receives experiment reports."""
    return tmp_path / "reports"


@pytest.fixture
def runner(report_dir: Path) -> ExperimentRunner:
    """Experiment runner wired to the filesystem adapters."""
    return ExperimentRunner(
        graphs=EdgeListAdapter(),
        documents=DocumentAdapter(),
        sink=ReportWriter(str(report_dir), ["json", "csv"]),
        versions={"graphlim": "test"},
    )
