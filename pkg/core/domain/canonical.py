"""Canonical forms of rooted balls.

A rooted graph is canonically labeled by iterated neighborhood refinement seeded
with (distance from root, degree), followed by individualization and
backtracking on the first non-singleton cell. The certificate is the sorted edge
list under the smallest labeling found. Rooted trees take a faster path through
sorted subtree encodings. Both paths put the root at canonical index 0.

Key layout: 2-byte big-endian vertex count, then one 4-byte (i, j) pair per
canonical edge with i < j, edges ascending.
"""

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from core.domain.graph import Graph, RootedGraph
from core.exceptions import (
    CanonicalizationLimitException,
    InvalidGraphException,
    InvalidKeyException,
)

DEFAULT_CANONICAL_LIMIT = 64
DEFAULT_COMPONENT_LIMIT = 512

Certificate = Tuple[Tuple[int, int], ...]


@functools.total_ordering
@dataclass(frozen=True)
class CanonicalBallKey:
    """Canonical identity of a rooted isomorphism class."""

    key: bytes
    radius: int = field(compare=False)
    size: int = field(compare=False)
    representative: Graph = field(compare=False, repr=False)

    @property
    def sort_key(self) -> Tuple[int, int, bytes]:
        """Enumeration order: (radius, vertex count, key bytes)."""
        return (self.radius, self.size, self.key)

    def __lt__(self, other: "CanonicalBallKey") -> bool:
        if not isinstance(other, CanonicalBallKey):
            return NotImplemented
        return self.sort_key < other.sort_key

    @property
    def hex(self) -> str:
        return self.key.hex()

    @classmethod
    def from_hex(cls, text: str, degree_bound: Optional[int] = None) -> "CanonicalBallKey":
        """Decode a hex key back into its representative (root 0)."""
        try:
            raw = bytes.fromhex(text)
        except ValueError as e:
            raise InvalidKeyException(text, "not hexadecimal") from e
        if len(raw) < 2 or (len(raw) - 2) % 4:
            raise InvalidKeyException(text, "wrong length")
        n = int.from_bytes(raw[:2], "big")
        if n == 0:
            raise InvalidKeyException(text, "empty rooted graph")
        edges = []
        for offset in range(2, len(raw), 4):
            i = int.from_bytes(raw[offset:offset + 2], "big")
            j = int.from_bytes(raw[offset + 2:offset + 4], "big")
            if not 0 <= i < j < n:
                raise InvalidKeyException(text, f"edge ({i}, {j}) out of range")
            edges.append((i, j))
        degrees = [0] * n
        for i, j in edges:
            degrees[i] += 1
            degrees[j] += 1
        bound = degree_bound if degree_bound is not None else max(1, max(degrees))
        representative = Graph.from_edges(n, edges, bound)
        distances = _distances(representative, 0)
        if len(distances) != n:
            raise InvalidKeyException(text, "representative not connected")
        return cls(raw, max(distances.values()), n, representative)


@dataclass(frozen=True)
class CanonicalForm:
    """A canonical key plus the map from input vertices to canonical indices."""

    key: CanonicalBallKey
    labeling: Tuple[int, ...]


def _distances(g: Graph, root: int) -> Dict[int, int]:
    distances = {root: 0}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in distances:
                distances[u] = distances[v] + 1
                queue.append(u)
    return distances


def _rank(values: Sequence) -> List[int]:
    order = {value: i for i, value in enumerate(sorted(set(values)))}
    return [order[value] for value in values]


def _refine(adjacency: Sequence[Sequence[int]], colors: List[int]) -> List[int]:
    cells = len(set(colors))
    while True:
        signatures = [
            (colors[v], tuple(sorted(colors[u] for u in adjacency[v])))
            for v in range(len(adjacency))
        ]
        refined = _rank(signatures)
        refined_cells = len(set(refined))
        if refined_cells == cells:
            return refined
        colors, cells = refined, refined_cells


def _certificate(adjacency: Sequence[Sequence[int]], labeling: Sequence[int]) -> Certificate:
    edges = []
    for v, neighbors in enumerate(adjacency):
        for u in neighbors:
            if v < u:
                a, b = labeling[v], labeling[u]
                edges.append((a, b) if a < b else (b, a))
    return tuple(sorted(edges))


def _twins(adjacency: Sequence[Sequence[int]], u: int, v: int) -> bool:
    return set(adjacency[u]) - {v} == set(adjacency[v]) - {u}


def _search(adjacency: Sequence[Sequence[int]], colors: List[int]) -> Tuple[Certificate, Tuple[int, ...]]:
    colors = _refine(adjacency, colors)
    n = len(adjacency)
    if len(set(colors)) == n:
        return _certificate(adjacency, colors), tuple(colors)

    cells: Dict[int, List[int]] = {}
    for v, color in enumerate(colors):
        cells.setdefault(color, []).append(v)
    target = min(color for color, members in cells.items() if len(members) > 1)

    best: Optional[Tuple[Certificate, Tuple[int, ...]]] = None
    tried: List[int] = []
    for v in cells[target]:
        # swapping twins is an automorphism fixing every other vertex
        if any(_twins(adjacency, v, w) for w in tried):
            continue
        tried.append(v)
        child = [2 * color + 1 for color in colors]
        child[v] = 2 * colors[v]
        result = _search(adjacency, _rank(child))
        if best is None or result[0] < best[0]:
            best = result
    assert best is not None
    return best


def _tree_labeling(g: Graph, root: int) -> Tuple[int, ...]:
    order = [root]
    parent = {root: -1}
    for v in order:
        for u in g.adjacency[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    children: Dict[int, List[int]] = {v: [] for v in order}
    for v in order[1:]:
        children[parent[v]].append(v)

    encoding: Dict[int, str] = {}
    for v in reversed(order):
        encoding[v] = "(" + "".join(sorted(encoding[c] for c in children[v])) + ")"

    labeling = [0] * g.n
    next_label = 0
    stack = [root]
    while stack:
        v = stack.pop()
        labeling[v] = next_label
        next_label += 1
        ordered = sorted(children[v], key=lambda c: encoding[c])
        stack.extend(reversed(ordered))
    return tuple(labeling)


def _encode(n: int, certificate: Certificate) -> bytes:
    parts = [n.to_bytes(2, "big")]
    for i, j in certificate:
        parts.append(i.to_bytes(2, "big"))
        parts.append(j.to_bytes(2, "big"))
    return b"".join(parts)


def _prepare(b: RootedGraph, limit: int) -> Dict[int, int]:
    g = b.graph
    if g.n > limit:
        raise CanonicalizationLimitException(g.n, limit)
    distances = _distances(g, b.root)
    if len(distances) != g.n:
        raise InvalidGraphException("rooted graph is not connected from its root", {"n": g.n})
    return distances


def canonical_form(b: RootedGraph, limit: int = DEFAULT_CANONICAL_LIMIT) -> CanonicalForm:
    """Canonical key of a rooted graph together with the root-preserving labeling."""
    g = b.graph
    distances = _prepare(b, limit)

    if g.num_edges == g.n - 1:
        labeling = _tree_labeling(g, b.root)
        certificate = _certificate(g.adjacency, labeling)
    else:
        seed = _rank([(distances[v], len(g.adjacency[v])) for v in range(g.n)])
        certificate, labeling = _search(g.adjacency, seed)

    representative = Graph.from_edges(g.n, certificate, g.degree_bound)
    key = CanonicalBallKey(
        key=_encode(g.n, certificate),
        radius=max(distances.values()),
        size=g.n,
        representative=representative,
    )
    return CanonicalForm(key=key, labeling=labeling)


def canonical_key(b: RootedGraph, limit: int = DEFAULT_CANONICAL_LIMIT) -> CanonicalBallKey:
    """Canonical key of a rooted graph; equal keys iff rooted isomorphic."""
    return canonical_form(b, limit).key


def unrooted_key(g: Graph, limit: int = DEFAULT_CANONICAL_LIMIT) -> CanonicalBallKey:
    """Class key of a connected graph: the largest rooted key over all roots."""
    if g.n == 0:
        raise InvalidGraphException("empty component")
    return max(canonical_key(RootedGraph(g, root), limit) for root in range(g.n))


def root_fixing_orbits(g: Graph, root: int = 0) -> List[List[int]]:
    """Orbits of the automorphism group of (g, root) acting on the vertices."""
    distances = _prepare(RootedGraph(g, root), max(g.n, 1))
    base = [(distances[v], len(g.adjacency[v])) for v in range(g.n)]
    orbits: Dict[Tuple[Certificate, int], List[int]] = {}
    for marked in range(g.n):
        seed = _rank([(*base[v], 0 if v == marked else 1) for v in range(g.n)])
        certificate, labeling = _search(g.adjacency, seed)
        orbits.setdefault((certificate, labeling[marked]), []).append(marked)
    return sorted(orbits.values())
