"""Finite bounded-degree simple graphs and elementary constructions."""

import math
from collections import deque
from dataclasses import dataclass, field
from numbers import Integral
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from core.exceptions import (
    DegreeBoundExceededException,
    DegreeBoundMismatchException,
    InvalidGraphException,
    InvalidLabelingException,
    InvalidVertexException,
    ParameterOutOfRangeException,
)

INFINITY = math.inf

Edge = Tuple[int, int]
Distance = Union[int, float]


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1 with a declared degree bound."""

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    degree_bound: int

    def __post_init__(self):
        if self.n < 0:
            raise InvalidGraphException("negative vertex count", {"n": self.n})
        if self.degree_bound < 1:
            raise InvalidGraphException("degree bound must be positive", {"degree_bound": self.degree_bound})
        if len(self.adjacency) != self.n:
            raise InvalidGraphException(
                "adjacency length differs from vertex count",
                {"n": self.n, "adjacency": len(self.adjacency)}
            )
        for v, neighbors in enumerate(self.adjacency):
            if len(neighbors) > self.degree_bound:
                raise DegreeBoundExceededException(v, len(neighbors), self.degree_bound)
            previous = -1
            for u in neighbors:
                if not 0 <= u < self.n:
                    raise InvalidVertexException(u, self.n)
                if u == v:
                    raise InvalidGraphException("loop", {"vertex": v})
                if u <= previous:
                    raise InvalidGraphException("neighbor list not strictly ascending", {"vertex": v})
                previous = u
        for v, neighbors in enumerate(self.adjacency):
            for u in neighbors:
                if v not in self.adjacency[u]:
                    raise InvalidGraphException("adjacency not symmetric", {"u": v, "v": u})

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], degree_bound: int) -> "Graph":
        """Build a graph from an edge iterable, rejecting loops and repeated edges."""
        neighbors: List[set] = [set() for _ in range(n)]
        for edge in edges:
            u, v = int(edge[0]), int(edge[1])
            for w in (u, v):
                if not 0 <= w < n:
                    raise InvalidVertexException(w, n)
            if u == v:
                raise InvalidGraphException("loop", {"vertex": u})
            if v in neighbors[u]:
                raise InvalidGraphException("multiple edge", {"u": min(u, v), "v": max(u, v)})
            neighbors[u].add(v)
            neighbors[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in neighbors), degree_bound)

    @classmethod
    def empty(cls, degree_bound: int) -> "Graph":
        """The graph with no vertices."""
        return cls(0, (), degree_bound)

    @property
    def edges(self) -> List[Edge]:
        """Edges as (u, v) with u < v, lexicographically sorted."""
        return [(v, u) for v in range(self.n) for u in self.adjacency[v] if v < u]

    @property
    def num_edges(self) -> int:
        return sum(len(neighbors) for neighbors in self.adjacency) // 2

    @property
    def max_degree(self) -> int:
        return max((len(neighbors) for neighbors in self.adjacency), default=0)

    def degree(self, v: int) -> int:
        self.check_vertex(v)
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> Tuple[int, ...]:
        self.check_vertex(v)
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def check_vertex(self, v: int) -> None:
        if not isinstance(v, Integral) or not 0 <= v < self.n:
            raise InvalidVertexException(v, self.n)

    def is_empty(self) -> bool:
        return self.n == 0


@dataclass(frozen=True)
class RootedGraph:
    """A graph with a distinguished root and the map back to its source graph."""

    graph: Graph
    root: int
    back_map: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        self.graph.check_vertex(self.root)


@dataclass(frozen=True)
class VertexLabeling:
    """A permutation sigma of 0..n-1; vertex v is renamed sigma[v]."""

    perm: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InvalidLabelingException("not a bijection of 0..n-1")

    @classmethod
    def identity(cls, n: int) -> "VertexLabeling":
        return cls(tuple(range(n)))

    def __len__(self) -> int:
        return len(self.perm)

    def __getitem__(self, v: int) -> int:
        return self.perm[v]

    def inverse(self) -> "VertexLabeling":
        inverse = [0] * len(self.perm)
        for v, image in enumerate(self.perm):
            inverse[image] = v
        return VertexLabeling(tuple(inverse))

    def compose(self, other: "VertexLabeling") -> "VertexLabeling":
        """Apply other first, then self."""
        if len(other) != len(self):
            raise InvalidLabelingException("composed labelings have different lengths")
        return VertexLabeling(tuple(self.perm[other.perm[v]] for v in range(len(self.perm))))


def _require_same_bound(g: Graph, h: Graph) -> None:
    if g.degree_bound != h.degree_bound:
        raise DegreeBoundMismatchException(g.degree_bound, h.degree_bound)


def path_distance(g: Graph, x: int, y: int) -> Distance:
    """Length of a shortest x-y path, INFINITY when y is unreachable."""
    g.check_vertex(x)
    g.check_vertex(y)
    if x == y:
        return 0
    distances = {x: 0}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for u in g.adjacency[v]:
            if u not in distances:
                distances[u] = distances[v] + 1
                if u == y:
                    return distances[u]
                queue.append(u)
    return INFINITY


def bfs_layers(g: Graph, x: int, r: Optional[int] = None) -> List[List[int]]:
    """Vertices grouped by distance from x, up to radius r (all reachable when r is None)."""
    g.check_vertex(x)
    seen = {x}
    layers = [[x]]
    while layers[-1] and (r is None or len(layers) <= r):
        frontier = []
        for v in layers[-1]:
            for u in g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    frontier.append(u)
        if not frontier:
            break
        layers.append(sorted(frontier))
    return layers


def _induced(g: Graph, vertices: Sequence[int]) -> Tuple[Graph, Tuple[int, ...]]:
    back_map = tuple(sorted(set(vertices)))
    for v in back_map:
        g.check_vertex(v)
    index = {v: i for i, v in enumerate(back_map)}
    adjacency = tuple(
        tuple(sorted(index[u] for u in g.adjacency[v] if u in index))
        for v in back_map
    )
    return Graph(len(back_map), adjacency, g.degree_bound), back_map


def induced_subgraph(g: Graph, t: Iterable[int]) -> Graph:
    """Subgraph induced on t, relabeled 0..|t|-1 in ascending order of t."""
    result, _ = _induced(g, list(t))
    return result


def ball(g: Graph, x: int, r: int) -> RootedGraph:
    """Induced r-ball around x, rooted at x, with the back-map to g."""
    if r < 0:
        raise ParameterOutOfRangeException("r", r, "r >= 0")
    layers = bfs_layers(g, x, r)
    members = [v for layer in layers for v in layer]
    result, back_map = _induced(g, members)
    return RootedGraph(result, back_map.index(x), back_map)


def disjoint_multiple(g: Graph, q: int) -> Graph:
    """q disjoint copies of g; copy i occupies labels [i*n, (i+1)*n)."""
    if q < 1:
        raise ParameterOutOfRangeException("q", q, "q >= 1")
    n = g.n
    adjacency = tuple(
        tuple(u + i * n for u in g.adjacency[v])
        for i in range(q)
        for v in range(n)
    )
    return Graph(q * n, adjacency, g.degree_bound)


def disjoint_union(g: Graph, h: Graph) -> Graph:
    """g followed by h, with h's labels shifted by |V(g)|."""
    _require_same_bound(g, h)
    shifted = tuple(tuple(u + g.n for u in neighbors) for neighbors in h.adjacency)
    return Graph(g.n + h.n, g.adjacency + shifted, g.degree_bound)


def connected_components(g: Graph) -> List[List[int]]:
    """Maximal connected vertex sets, each sorted, listed by smallest member."""
    seen = [False] * g.n
    components = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        component = [start]
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for u in g.adjacency[v]:
                if not seen[u]:
                    seen[u] = True
                    component.append(u)
                    queue.append(u)
        components.append(sorted(component))
    return components


def relabel(g: Graph, sigma: VertexLabeling) -> Graph:
    """The graph g^sigma in which vertex v of g carries the label sigma(v)."""
    if len(sigma) != g.n:
        raise InvalidLabelingException(f"labeling of length {len(sigma)} applied to {g.n} vertices")
    adjacency: List[Tuple[int, ...]] = [()] * g.n
    for v in range(g.n):
        adjacency[sigma[v]] = tuple(sorted(sigma[u] for u in g.adjacency[v]))
    return Graph(g.n, tuple(adjacency), g.degree_bound)


def remove_edges(g: Graph, edges: Iterable[Sequence[int]]) -> Graph:
    """Copy of g without the given edges; every edge must be present."""
    removed = set()
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if not g.has_edge(u, v):
            raise InvalidGraphException("removed edge not present", {"u": u, "v": v})
        removed.add((min(u, v), max(u, v)))
    adjacency = tuple(
        tuple(u for u in g.adjacency[v] if (min(u, v), max(u, v)) not in removed)
        for v in range(g.n)
    )
    return Graph(g.n, adjacency, g.degree_bound)


def subgraph(g: Graph, vertices: Iterable[int], edges: Iterable[Sequence[int]]) -> Graph:
    """Subgraph on the given vertices keeping only the listed edges, relabeled ascending."""
    keep, back_map = _induced(g, list(vertices))
    index = {v: i for i, v in enumerate(back_map)}
    kept = []
    for edge in edges:
        u, v = int(edge[0]), int(edge[1])
        if u in index and v in index and g.has_edge(u, v):
            kept.append((index[u], index[v]))
    return Graph.from_edges(keep.n, sorted(set((min(a, b), max(a, b)) for a, b in kept)), g.degree_bound)


def with_degree_bound(g: Graph, degree_bound: int) -> Graph:
    """Same graph with a different declared degree bound."""
    if degree_bound == g.degree_bound:
        return g
    return Graph(g.n, g.adjacency, degree_bound)


def is_path_like(g: Graph) -> bool:
    """Every component is a path, a cycle or an isolated vertex."""
    return g.max_degree <= 2


def is_forest(g: Graph) -> bool:
    return g.num_edges == g.n - len(connected_components(g))


def torus_side(g: Graph) -> Optional[int]:
    """Side s when g is exactly the row-major s x s torus grid (s >= 3), else None."""
    s = math.isqrt(g.n)
    if s < 3 or s * s != g.n or g.num_edges != 2 * g.n:
        return None
    for v in range(g.n):
        row, col = divmod(v, s)
        expected = sorted({
            row * s + (col + 1) % s,
            row * s + (col - 1) % s,
            ((row + 1) % s) * s + col,
            ((row - 1) % s) * s + col,
        })
        if list(g.adjacency[v]) != expected:
            return None
    return s
