"""Independent-set counting: exact branching and transfer matrices."""

import functools
import math
from typing import List

import numpy as np
import structlog

from core.domain.graph import Graph, connected_components, is_path_like
from core.exceptions import ParameterOutOfRangeException

logger = structlog.get_logger()


def _column_states(width: int) -> List[int]:
    return [s for s in range(1 << width) if s & (s >> 1) == 0]


def transfer_matrix_count(length: int, width: int = 1, cyclic: bool = False) -> int:
    """Independent sets of a path (or cycle) of `length` columns, each a path of `width` vertices."""
    if width < 1:
        raise ParameterOutOfRangeException("width", width, "width >= 1")
    if length < 0:
        raise ParameterOutOfRangeException("length", length, "length >= 0")
    if cyclic and length < 3:
        raise ParameterOutOfRangeException("length", length, "cyclic strips need length >= 3")
    if length == 0:
        return 1

    states = _column_states(width)
    transfer = np.array(
        [[1 if s & t == 0 else 0 for t in states] for s in states],
        dtype=object,
    )
    if cyclic:
        power = np.identity(len(states), dtype=object)
        for _ in range(length):
            power = power @ transfer
        return int(np.trace(power))

    vector = np.ones(len(states), dtype=object)
    for _ in range(length - 1):
        vector = transfer @ vector
    return int(vector.sum())


def _masks(g: Graph) -> List[int]:
    return [sum(1 << u for u in neighbors) for neighbors in g.adjacency]


def _component_mask(neighbors: List[int], mask: int) -> int:
    lowest = mask & -mask
    component = lowest
    frontier = lowest
    while frontier:
        v = frontier.bit_length() - 1
        frontier &= ~(1 << v)
        fresh = neighbors[v] & mask & ~component
        component |= fresh
        frontier |= fresh
    return component


def _count_exact(g: Graph) -> int:
    neighbors = _masks(g)

    @functools.lru_cache(maxsize=None)
    def count(mask: int) -> int:
        if mask == 0:
            return 1
        component = _component_mask(neighbors, mask)
        if component != mask:
            return count(component) * count(mask & ~component)

        best, best_degree = -1, -1
        rest = mask
        while rest:
            v = rest.bit_length() - 1
            rest &= ~(1 << v)
            degree = bin(neighbors[v] & mask).count("1")
            if degree > best_degree:
                best, best_degree = v, degree
        if best_degree == 0:
            return 2
        without = mask & ~(1 << best)
        return count(without) + count(without & ~neighbors[best])

    return count((1 << g.n) - 1)


def count_independent_sets(g: Graph) -> int:
    """Number of independent vertex sets, the empty set included."""
    if g.is_empty():
        return 1
    if not is_path_like(g):
        return _count_exact(g)

    total = 1
    for component in connected_components(g):
        m = len(component)
        edges = sum(len(g.adjacency[v]) for v in component) // 2
        total *= transfer_matrix_count(m, cyclic=edges == m)
    return total


def log_independent_sets(g: Graph) -> float:
    """log2 of the independent-set count."""
    return math.log2(count_independent_sets(g))
