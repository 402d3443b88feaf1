"""Tests for canonical ball keys."""

import itertools
from collections import defaultdict
from typing import Dict, List, Sequence

import networkx as nx
import numpy as np
import pytest

from core.domain.canonical import (
    CanonicalBallKey,
    canonical_form,
    canonical_key,
    root_fixing_orbits,
    unrooted_key,
)
from core.domain.graph import Graph, RootedGraph, VertexLabeling, ball, connected_components, relabel
from core.exceptions import CanonicalizationLimitException, InvalidGraphException, InvalidKeyException
from core.usecases.sequences import gen_box, gen_cycle, gen_path, gen_torus, gen_tree_ball


def _as_networkx(b: RootedGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from((v, {"label": "root" if v == b.root else "vertex"}) for v in range(b.graph.n))
    g.add_edges_from(b.graph.edges)
    return g


def _same_label(x: Dict[str, str], y: Dict[str, str]) -> bool:
    return x["label"] == y["label"]


def _rooted_isomorphic(a: RootedGraph, b: RootedGraph) -> bool:
    return nx.is_isomorphic(_as_networkx(a), _as_networkx(b), node_match=_same_label)


def _check_keys_against_networkx(rooted: Sequence[RootedGraph]) -> int:
    """Equal keys imply rooted isomorphism, and distinct keys are never isomorphic; returns the class count."""
    representatives: Dict[CanonicalBallKey, nx.Graph] = {}
    for b in rooted:
        key = canonical_key(b)
        current = _as_networkx(b)
        if key in representatives:
            assert nx.is_isomorphic(representatives[key], current, node_match=_same_label), b.graph.edges
        else:
            representatives[key] = current

    buckets: Dict[str, List[nx.Graph]] = defaultdict(list)
    for g in representatives.values():
        buckets[nx.weisfeiler_lehman_graph_hash(g, node_attr="label")].append(g)
    for bucket in buckets.values():
        for a, b in itertools.combinations(bucket, 2):
            assert not nx.is_isomorphic(a, b, node_match=_same_label), (list(a.edges), list(b.edges))
    return len(representatives)


def test_key_invariant_under_relabeling():
    """Relabeled copies with the root moved along share a key."""
    g = gen_box(3)
    for perm in [(8, 7, 6, 5, 4, 3, 2, 1, 0), (1, 2, 0, 4, 5, 3, 7, 8, 6)]:
        sigma = VertexLabeling(perm)
        moved = relabel(g, sigma)
        assert canonical_key(RootedGraph(g, 4)) == canonical_key(RootedGraph(moved, sigma[4]))


def test_keys_agree_with_networkx_isomorphism():
    """Equal keys exactly when networkx finds a root-preserving isomorphism."""
    graphs = [gen_cycle(4), gen_path(4), gen_box(2), gen_torus(3), gen_tree_ball(2), gen_box(3)]
    rooted = [RootedGraph(g, root) for g in graphs for root in range(min(g.n, 3))]
    for a, b in itertools.combinations(rooted, 2):
        if a.graph.n != b.graph.n:
            continue
        same_key = canonical_key(a) == canonical_key(b)
        assert same_key == _rooted_isomorphic(a, b)


def test_every_small_connected_graph_against_networkx():
    """All connected graphs on at most 7 vertices with degree <= 3, every root, plus shuffled copies."""
    rng = np.random.default_rng(11)
    rooted: List[RootedGraph] = []
    for atlas_graph in nx.graph_atlas_g()[1:]:
        n = atlas_graph.number_of_nodes()
        if not nx.is_connected(atlas_graph) or max(dict(atlas_graph.degree).values()) > 3:
            continue
        g = Graph.from_edges(n, list(atlas_graph.edges), 3)
        sigma = VertexLabeling(tuple(int(v) for v in rng.permutation(n)))
        shuffled = relabel(g, sigma)
        for root in range(n):
            rooted.append(RootedGraph(g, root))
            rooted.append(RootedGraph(shuffled, sigma[root]))

    classes = _check_keys_against_networkx(rooted)
    assert classes < len(rooted)
    assert classes == len({canonical_key(b) for b in rooted[::2]})


def test_random_graphs_on_seven_and_eight_vertices_against_networkx(random_graph):
    """Ten thousand seeded connected samples, one random root each."""
    rng = np.random.default_rng(2024)
    rooted: List[RootedGraph] = []
    while len(rooted) < 10_000:
        n = int(rng.integers(7, 9))
        g = random_graph(rng, n, 3)
        if len(connected_components(g)) != 1:
            continue
        rooted.append(RootedGraph(g, int(rng.integers(n))))

    assert _check_keys_against_networkx(rooted) > 1


def test_key_equality_ignores_degree_bound():
    """Keys compare by bytes only."""
    small = canonical_key(RootedGraph(gen_path(3), 1))
    lifted = canonical_key(RootedGraph(Graph.from_edges(3, [(0, 1), (1, 2)], 4), 1))

    assert small == lifted
    assert hash(small) == hash(lifted)


def test_root_has_canonical_index_zero():
    """The root is labeled first and the labeling is a bijection."""
    for g, root in [(gen_path(5), 2), (gen_cycle(5), 3), (gen_box(3), 0)]:
        form = canonical_form(RootedGraph(g, root))
        assert form.labeling[root] == 0
        assert sorted(form.labeling) == list(range(g.n))


def test_labeling_maps_onto_representative():
    """Relabeling by the canonical labeling gives the representative."""
    g = gen_box(3)
    form = canonical_form(RootedGraph(g, 1))

    assert relabel(g, VertexLabeling(tuple(form.labeling))).edges == form.key.representative.edges


def test_hex_round_trip_and_metadata():
    """Hex keys decode to the representative with radius and size."""
    key = canonical_key(ball(gen_cycle(10), 0, 2))
    decoded = CanonicalBallKey.from_hex(key.hex)

    assert decoded == key
    assert (decoded.radius, decoded.size) == (2, 5)
    assert decoded.representative.edges == key.representative.edges


@pytest.mark.parametrize("text", ["zz", "00", "0002", "000200000000", "00030001"])
def test_from_hex_rejects_malformed(text):
    """Non-hex, empty, out-of-range and disconnected keys are rejected."""
    with pytest.raises(InvalidKeyException):
        CanonicalBallKey.from_hex(text)


def test_enumeration_order():
    """Keys sort by radius, then size, then bytes."""
    keys = [
        canonical_key(ball(gen_path(7), 3, r))
        for r in (2, 0, 1)
    ]

    assert [k.radius for k in sorted(keys)] == [0, 1, 2]


def test_limits_and_connectivity():
    """Too-large or disconnected rooted graphs are refused."""
    with pytest.raises(CanonicalizationLimitException):
        canonical_key(RootedGraph(gen_path(10), 0), limit=5)
    with pytest.raises(InvalidGraphException):
        canonical_key(RootedGraph(Graph.from_edges(3, [(0, 1)], 2), 0))


def test_unrooted_key_is_root_independent():
    """The component key does not depend on the labeling."""
    g = gen_path(5)
    flipped = relabel(g, VertexLabeling((4, 3, 2, 1, 0)))

    assert unrooted_key(g) == unrooted_key(flipped)
    assert unrooted_key(g) != unrooted_key(gen_cycle(5))


def test_root_fixing_orbits():
    """Orbits of the stabilizer of the root."""
    assert root_fixing_orbits(gen_path(3), 1) == [[0, 2], [1]]
    assert root_fixing_orbits(gen_path(3), 0) == [[0], [1], [2]]
    assert root_fixing_orbits(gen_cycle(4), 0) == [[0], [1, 3], [2]]
