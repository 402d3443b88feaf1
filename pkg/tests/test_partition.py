"""Tests for the hyperfinite partitioners."""

from fractions import Fraction

import numpy as np
import pytest

from core.domain.entities import PartitionStrategy
from core.domain.graph import Graph, disjoint_union
from core.exceptions import NotForestException, NotPathLikeException, NotTorusException, ParameterOutOfRangeException
from core.usecases.partition import (
    equipartition_compare,
    exceptional_vertices,
    hyperfiniteness_profile,
    partition_auto,
    partition_ball_carving,
    partition_path_like,
    partition_torus,
    partition_tree,
    pipeline_parameters,
    validate_partition,
)
from core.usecases.sequences import gen_box, gen_cycle, gen_path, gen_random_regular, gen_torus, gen_tree_ball


def test_path_partition_of_p10():
    """eps = 0.25 gives K = 8: one cut between 7 and 8."""
    p = partition_path_like(gen_path(10), 0.25)

    assert p.K == 8
    assert p.cut_edges == ((7, 8),)
    assert p.sizes == [2, 8]
    assert exceptional_vertices(p) == [7, 8]
    assert p.eps == Fraction(1, 9)
    validate_partition(p)


def test_cycle_partition_of_c12():
    """eps = 0.5 gives K = 4 and three cuts around the cycle."""
    p = partition_path_like(gen_cycle(12), 0.5)

    assert len(p.cut_edges) == 3
    assert p.sizes == [4, 4, 4]
    validate_partition(p)


def test_short_cycle_is_left_whole():
    """A cycle no longer than K needs no cut."""
    p = partition_path_like(gen_cycle(5), 0.25)

    assert p.cut_edges == ()
    assert p.eps == 0


def test_path_like_rejects_higher_degree():
    """Degree three is outside the path partitioner."""
    with pytest.raises(NotPathLikeException):
        partition_path_like(gen_tree_ball(2), 0.5)


def test_torus_box_cut():
    """Box side min(s, ceil(4/eps)) splits the torus into equal boxes."""
    p = partition_torus(gen_torus(8), 1.0)

    assert p.K == 16
    assert p.sizes == [16, 16, 16, 16]
    assert len(p.class_freq) == 1
    validate_partition(p)
    with pytest.raises(NotTorusException):
        partition_torus(gen_box(4), 0.5)


def test_tree_partition_bounds_components():
    """Subtrees stay within K = ceil(4(d+1)/eps)."""
    p = partition_tree(gen_tree_ball(6), 1.0)

    assert p.K == 16
    assert p.max_component <= 16
    validate_partition(p)
    with pytest.raises(NotForestException):
        partition_tree(gen_cycle(6), 0.5)


def _random_tree(rng: np.random.Generator, n: int) -> Graph:
    degree = [0] * n
    edges = []
    for v in range(1, n):
        open_vertices = [u for u in range(v) if degree[u] < 3]
        u = open_vertices[int(rng.integers(len(open_vertices)))]
        edges.append((u, v))
        degree[u] += 1
        degree[v] += 1
    return Graph.from_edges(n, edges, 3)


@pytest.mark.parametrize("eps", [1.0, 0.5, 0.25])
def test_tree_partition_cuts_at_most_half_eps(eps):
    """Every cut child carries at least K/d vertices, so the cut fraction stays below eps/2."""
    rng = np.random.default_rng(3)
    trees = [gen_tree_ball(6)] + [_random_tree(rng, int(rng.integers(2, 400))) for _ in range(30)]
    for g in trees:
        p = partition_tree(g, eps)

        assert len(p.cut_edges) * p.K <= g.degree_bound * g.n
        assert p.eps <= Fraction(eps) / 2
        assert p.max_component <= p.K


def test_ball_carving_on_grid():
    """Carving covers every vertex and reports the achieved bound."""
    p = partition_ball_carving(gen_box(6), 0.5, seed=1)

    assert sum(p.sizes) == 36
    assert p.K == p.max_component
    validate_partition(p)


@pytest.mark.parametrize("seed", range(10))
def test_ball_carving_negative_control_on_expander(seed):
    """Small pieces of a random 3-regular graph cost a large cut fraction."""
    g = gen_random_regular(500, 3, seed=seed)
    p = partition_ball_carving(g, 0.05, seed=seed, max_component=20)

    assert p.max_component <= 20
    assert p.eps >= Fraction(1, 20)
    validate_partition(p)


def test_partition_auto_dispatch():
    """Recognized families go to their partitioner."""
    assert partition_auto(gen_path(20), 0.5).strategy == "path"
    assert partition_auto(gen_torus(5), 0.5).strategy == "torus"
    assert partition_auto(gen_tree_ball(3), 1.0).strategy == "tree"
    assert partition_auto(gen_box(4), 0.5).strategy == "carve"
    assert partition_auto(gen_torus(5), 0.5, strategy=PartitionStrategy.CARVE).strategy == "carve"


def test_eps_must_be_in_unit_interval():
    """eps outside (0, 1] is rejected."""
    with pytest.raises(ParameterOutOfRangeException):
        partition_path_like(gen_path(5), 0.0)


def test_equipartition_compare():
    """Identical component statistics are at distance 0."""
    pa = partition_path_like(gen_path(16), 0.25)
    pb = partition_path_like(gen_path(32), 0.25)
    pc = partition_path_like(disjoint_union(gen_path(16), gen_path(3)), 0.25)

    assert equipartition_compare(pa, pb) == 0
    assert equipartition_compare(pa, pc) > 0


def test_pipeline_parameters():
    """eps1 = eps/(6d), beta = eps1/(MK) and the resulting bound."""
    result = pipeline_parameters(0.5, 2, 3, 10)

    assert result["eps1"] == pytest.approx(0.5 / 12)
    assert result["beta"] == pytest.approx(0.5 / 12 / 30)
    assert result["bound"] == pytest.approx(0.4167, abs=1e-4)


def test_hyperfiniteness_profile_for_paths():
    """K stays fixed along a path sequence."""
    seq = [gen_path(n) for n in (20, 40, 80)]
    report = hyperfiniteness_profile(seq, [0.25])

    assert report.evidenced
    assert [row["K"] for row in report.rows] == [8, 8, 8]
    assert all(row["within_budget"] for row in report.rows)
