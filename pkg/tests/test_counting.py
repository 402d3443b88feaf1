"""Tests for independent-set counting."""

import itertools
import math

import pytest

from core.domain.graph import Graph, disjoint_union
from core.exceptions import ParameterOutOfRangeException
from core.usecases.counting import count_independent_sets, log_independent_sets, transfer_matrix_count
from core.usecases.sequences import gen_box, gen_cycle, gen_path, gen_torus, gen_tree_ball


def _fibonacci(k: int) -> int:
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


def _brute_force(g: Graph) -> int:
    total = 0
    for size in range(g.n + 1):
        for subset in itertools.combinations(range(g.n), size):
            chosen = set(subset)
            if all(not (u in chosen and v in chosen) for u, v in g.edges):
                total += 1
    return total


@pytest.mark.parametrize("n", [0, 1, 2, 5, 30, 200])
def test_path_counts_are_fibonacci(n):
    """P_n has F(n + 2) independent sets."""
    assert transfer_matrix_count(n) == _fibonacci(n + 2)


@pytest.mark.parametrize("n", [3, 4, 7, 12])
def test_cycle_counts_are_lucas(n):
    """C_n has L_n = F(n - 1) + F(n + 1) independent sets."""
    assert transfer_matrix_count(n, cyclic=True) == _fibonacci(n - 1) + _fibonacci(n + 1)


def test_growth_rate_is_log_golden_ratio():
    """log2 i(P_1000) / 1000 is close to log2 of the golden ratio."""
    rate = math.log2(transfer_matrix_count(1000)) / 1000

    assert rate == pytest.approx(0.694242, abs=5e-3)


def test_strip_width_two():
    """A 2 x L ladder matches brute force."""
    ladder = Graph.from_edges(6, [(0, 1), (2, 3), (4, 5), (0, 2), (2, 4), (1, 3), (3, 5)], 3)
    assert transfer_matrix_count(3, width=2) == _brute_force(ladder)


def test_transfer_matrix_parameters():
    """Widths below one, negative lengths and short cyclic strips are rejected."""
    with pytest.raises(ParameterOutOfRangeException):
        transfer_matrix_count(3, width=0)
    with pytest.raises(ParameterOutOfRangeException):
        transfer_matrix_count(-1)
    with pytest.raises(ParameterOutOfRangeException):
        transfer_matrix_count(2, cyclic=True)


def test_path_like_graphs_use_components():
    """Counts multiply over components of paths and cycles."""
    g = disjoint_union(gen_path(3), gen_cycle(4))

    assert count_independent_sets(g) == 5 * 7


@pytest.mark.parametrize("g,expected", [(gen_box(3), 63), (gen_torus(3), 34)])
def test_exact_branching_on_grids(g, expected):
    """The 3 x 3 grid has 63 independent sets; the 3 x 3 rook graph has 34."""
    assert count_independent_sets(g) == expected


def test_exact_branching_matches_brute_force():
    """Branching agrees with enumeration on a tree ball."""
    g = gen_tree_ball(2)

    assert count_independent_sets(g) == _brute_force(g)


def test_log_count_of_empty_graph():
    """The empty graph has exactly the empty set."""
    assert count_independent_sets(Graph.empty(2)) == 1
    assert log_independent_sets(Graph.empty(2)) == 0.0
