"""Edge-removal partitioners into bounded components and component-class statistics."""

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import structlog

from core.domain.canonical import DEFAULT_COMPONENT_LIMIT, CanonicalBallKey, unrooted_key
from core.domain.entities import PartitionStrategy
from core.domain.graph import (
    Edge,
    Graph,
    connected_components,
    induced_subgraph,
    is_forest,
    is_path_like,
    remove_edges,
    torus_side,
)
from core.exceptions import (
    InvariantViolationException,
    NotForestException,
    NotPathLikeException,
    NotTorusException,
    ParameterOutOfRangeException,
    PartitionMismatchException,
)
from core.services.parallel import parallel_map

logger = structlog.get_logger()


@dataclass(frozen=True)
class Partition:
    """A set of removed edges and the bounded components left behind."""

    source: Graph = field(repr=False)
    cut_edges: Tuple[Edge, ...]
    components: Tuple[Tuple[int, ...], ...]
    K: int
    eps: Fraction
    class_counts: Mapping[CanonicalBallKey, int]
    class_freq: Mapping[CanonicalBallKey, Fraction]
    requested_eps: Fraction
    strategy: str

    @property
    def sizes(self) -> List[int]:
        return sorted(len(component) for component in self.components)

    @property
    def max_component(self) -> int:
        return max((len(component) for component in self.components), default=0)

    def component_frequency(self, key: CanonicalBallKey) -> Fraction:
        """gamma: components of class key per vertex of the source."""
        return Fraction(self.class_counts.get(key, 0), self.source.n)

    def to_document(self) -> Dict[str, object]:
        return {
            "strategy": self.strategy,
            "n": self.source.n,
            "edges": self.source.num_edges,
            "K": self.K,
            "max_component": self.max_component,
            "requested_eps": float(self.requested_eps),
            "eps": float(self.eps),
            "cut_edges": [list(edge) for edge in self.cut_edges],
            "component_sizes": self.sizes,
            "class_freq": {
                key.hex: {
                    "num": self.class_freq[key].numerator,
                    "den": self.class_freq[key].denominator,
                    "components": self.class_counts[key],
                    "component_size": key.size,
                }
                for key in sorted(self.class_freq)
            },
        }


def _as_fraction(eps: float) -> Fraction:
    if not 0 < eps <= 1:
        raise ParameterOutOfRangeException("eps", eps, "(0, 1]")
    return Fraction(eps).limit_denominator(10**9)


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class _ClassCache:
    """Unrooted component keys memoized on the relabeled component structure."""

    def __init__(self, limit: int):
        self.limit = limit
        self.keys: Dict[Tuple[Tuple[int, ...], ...], CanonicalBallKey] = {}

    def key(self, remaining: Graph, component: Sequence[int]) -> CanonicalBallKey:
        piece = induced_subgraph(remaining, component)
        cached = self.keys.get(piece.adjacency)
        if cached is None:
            cached = unrooted_key(piece, self.limit)
            self.keys[piece.adjacency] = cached
        return cached


def _build(
    g: Graph,
    cut: Set[Edge],
    K: Optional[int],
    requested: Fraction,
    strategy: PartitionStrategy,
    component_limit: int,
) -> Partition:
    cut_edges = tuple(sorted(cut))
    remaining = remove_edges(g, cut_edges)
    components = tuple(tuple(component) for component in connected_components(remaining))
    if K is None:
        K = max((len(component) for component in components), default=0)

    cache = _ClassCache(component_limit)
    counts: Counter = Counter()
    for component in components:
        counts[cache.key(remaining, component)] += 1
    class_freq = {key: Fraction(key.size * count, g.n) for key, count in counts.items()}
    achieved = Fraction(len(cut_edges), g.num_edges) if g.num_edges else Fraction(0)

    partition = Partition(
        source=g,
        cut_edges=cut_edges,
        components=components,
        K=K,
        eps=achieved,
        class_counts=dict(counts),
        class_freq=class_freq,
        requested_eps=requested,
        strategy=strategy.value,
    )
    logger.debug(
        "Partition built",
        strategy=strategy.value,
        n=g.n,
        cuts=len(cut_edges),
        K=K,
        classes=len(counts),
    )
    return partition


def _walk(g: Graph, start: int, previous: int = -1) -> List[int]:
    """Vertices of a path or cycle component in walking order from start."""
    order = [start]
    current = start
    while True:
        following = [u for u in g.adjacency[current] if u != previous and u != start]
        if not following:
            return order
        previous, current = current, min(following)
        order.append(current)


def _segment_cuts(order: Sequence[int], K: int, cyclic: bool) -> List[Edge]:
    m = len(order)
    if cyclic and m <= K:
        return []
    cuts = [_edge(order[j * K - 1], order[j * K]) for j in range(1, math.ceil(m / K)) if j * K < m]
    if cyclic:
        cuts.append(_edge(order[-1], order[0]))
    return cuts


def partition_path_like(
    g: Graph,
    eps: float,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
) -> Partition:
    """Cut every K-th edge of each path and cycle, K = ceil(2/eps)."""
    requested = _as_fraction(eps)
    if not is_path_like(g):
        raise NotPathLikeException(g.max_degree)
    K = math.ceil(2 / requested)

    cut: Set[Edge] = set()
    for component in connected_components(g):
        if len(component) == 1:
            continue
        ends = [v for v in component if len(g.adjacency[v]) == 1]
        if ends:
            order = _walk(g, min(ends))
            cut.update(_segment_cuts(order, K, cyclic=False))
        else:
            start = component[0]
            order = _walk(g, start)
            cut.update(_segment_cuts(order, K, cyclic=True))
    return _build(g, cut, K, requested, PartitionStrategy.PATH, component_limit)


def _cycle_boundaries(s: int, b: int) -> List[int]:
    """Positions i whose link (i, i+1 mod s) is cut when a cycle of length s is split into runs of b."""
    if s <= b:
        return []
    boundaries = [j * b - 1 for j in range(1, math.ceil(s / b)) if j * b < s]
    boundaries.append(s - 1)
    return boundaries


def partition_torus(
    g: Graph,
    eps: float,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
) -> Partition:
    """Box cut of a row-major torus grid with box side min(s, ceil(4/eps))."""
    requested = _as_fraction(eps)
    s = torus_side(g)
    if s is None:
        raise NotTorusException(g.n)
    b = min(s, math.ceil(4 / requested))

    cut: Set[Edge] = set()
    for i in _cycle_boundaries(s, b):
        following = (i + 1) % s
        for k in range(s):
            cut.add(_edge(k * s + i, k * s + following))
            cut.add(_edge(i * s + k, following * s + k))
    return _build(g, cut, b * b, requested, PartitionStrategy.TORUS, component_limit)


def partition_tree(
    g: Graph,
    eps: float,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
) -> Partition:
    """Greedy bottom-up cut of a forest into subtrees of at most K = ceil(4(d+1)/eps) vertices.

    Children are merged smallest first, so every cut child tops a component of at least K/d
    vertices. Hence at most d*n/K edges are cut, which on a tree with n >= 2 is a fraction
    of at most eps/2 of its edges.
    """
    requested = _as_fraction(eps)
    if not is_forest(g):
        raise NotForestException(g.n, g.num_edges)
    K = math.ceil(4 * (g.degree_bound + 1) / requested)

    cut: Set[Edge] = set()
    pending = [1] * g.n
    for component in connected_components(g):
        root = component[0]
        parent = {root: -1}
        order = [root]
        for v in order:
            for u in g.adjacency[v]:
                if u not in parent:
                    parent[u] = v
                    order.append(u)
        for v in reversed(order):
            children = sorted(
                (u for u in g.adjacency[v] if parent.get(u) == v),
                key=lambda u: (pending[u], u),
            )
            for child in children:
                if pending[v] + pending[child] <= K:
                    pending[v] += pending[child]
                else:
                    cut.add(_edge(v, child))
    return _build(g, cut, K, requested, PartitionStrategy.TREE, component_limit)


def partition_ball_carving(
    g: Graph,
    eps: float,
    seed: int = 0,
    max_component: Optional[int] = None,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
) -> Partition:
    """Carve BFS balls until the boundary is at most eps times the interior."""
    requested = _as_fraction(eps)
    if torus_side(g) is not None:
        logger.debug("Torus grid recognized, using box cut", n=g.n)
        return partition_torus(g, eps, component_limit)
    cap = max_component if max_component is not None else component_limit

    region_of = [-1] * g.n
    order = np.random.default_rng(seed).permutation(g.n).tolist()
    regions = 0
    for start in order:
        if region_of[start] >= 0:
            continue
        region = {start}
        while True:
            interior = sum(1 for v in region for u in g.adjacency[v] if u in region) // 2
            outside = {u for v in region for u in g.adjacency[v] if u not in region and region_of[u] < 0}
            boundary = sum(1 for v in region for u in g.adjacency[v] if u in outside)
            if boundary == 0 or boundary <= requested * interior:
                break
            if len(region) + len(outside) > cap:
                break
            region.update(outside)
        for v in region:
            region_of[v] = regions
        regions += 1

    cut = {_edge(u, v) for u, v in g.edges if region_of[u] != region_of[v]}
    return _build(g, cut, None, requested, PartitionStrategy.CARVE, component_limit)


def partition_auto(
    g: Graph,
    eps: float,
    seed: int = 0,
    strategy: PartitionStrategy = PartitionStrategy.AUTO,
    max_component: Optional[int] = None,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
) -> Partition:
    """Dispatch to the partitioner for the recognized family, ball carving otherwise."""
    strategy = PartitionStrategy(strategy)
    if strategy is PartitionStrategy.AUTO:
        if torus_side(g) is not None:
            strategy = PartitionStrategy.TORUS
        elif is_path_like(g):
            strategy = PartitionStrategy.PATH
        elif is_forest(g):
            strategy = PartitionStrategy.TREE
        else:
            strategy = PartitionStrategy.CARVE

    if strategy is PartitionStrategy.PATH:
        return partition_path_like(g, eps, component_limit)
    if strategy is PartitionStrategy.TORUS:
        return partition_torus(g, eps, component_limit)
    if strategy is PartitionStrategy.TREE:
        return partition_tree(g, eps, component_limit)
    return partition_ball_carving(g, eps, seed, max_component, component_limit)


def validate_partition(p: Partition) -> None:
    """Re-derive components and frequencies from the cut edges."""
    remaining = remove_edges(p.source, p.cut_edges)
    derived = tuple(tuple(component) for component in connected_components(remaining))
    if derived != p.components:
        raise InvariantViolationException("partition components", {"expected": len(derived), "stored": len(p.components)})
    if p.max_component > p.K:
        raise InvariantViolationException("component size bound", {"K": p.K, "largest": p.max_component})
    if p.source.n and sum(p.class_freq.values()) != 1:
        raise InvariantViolationException("class frequencies sum to one", {"sum": str(sum(p.class_freq.values()))})
    if p.eps * p.source.num_edges != len(p.cut_edges):
        raise InvariantViolationException("cut fraction", {"eps": str(p.eps), "cuts": len(p.cut_edges)})
    sizes = sum(key.size * count for key, count in p.class_counts.items())
    if sizes != p.source.n:
        raise InvariantViolationException("class counts cover vertices", {"covered": sizes, "n": p.source.n})


def exceptional_vertices(p: Partition) -> List[int]:
    """Endpoints of removed edges."""
    exceptional = sorted({v for edge in p.cut_edges for v in edge})
    bound = 2 * p.source.degree_bound * p.eps * p.source.n
    if len(exceptional) > 2 * len(p.cut_edges) or len(exceptional) > bound:
        raise InvariantViolationException(
            "exceptional vertex bound",
            {"exceptional": len(exceptional), "cuts": len(p.cut_edges)}
        )
    return exceptional


def _require_comparable(pa: Partition, pb: Partition) -> None:
    if pa.K != pb.K:
        raise PartitionMismatchException("K", pa.K, pb.K)
    if pa.source.degree_bound != pb.source.degree_bound:
        raise PartitionMismatchException("degree_bound", pa.source.degree_bound, pb.source.degree_bound)


def equipartition_compare(pa: Partition, pb: Partition) -> Fraction:
    """Sum over component classes of |c(pa) - c(pb)|."""
    _require_comparable(pa, pb)
    classes = set(pa.class_freq) | set(pb.class_freq)
    return sum(
        (abs(pa.class_freq.get(key, Fraction(0)) - pb.class_freq.get(key, Fraction(0))) for key in classes),
        Fraction(0),
    )


def pipeline_parameters(eps: float, d: int, M: int, K: int) -> Dict[str, float]:
    """eps1 = eps/(6d) and beta = eps1/(M K) for turning weak convergence into strong convergence."""
    if not 0 < eps <= 1:
        raise ParameterOutOfRangeException("eps", eps, "(0, 1]")
    if d < 1 or M < 1 or K < 1:
        raise ParameterOutOfRangeException("d, M, K", (d, M, K), "all >= 1")
    eps1 = eps / (6 * d)
    return {"eps": eps, "eps1": eps1, "beta": eps1 / (M * K), "bound": 4 * d * eps1 + 2 * M * K * (eps1 / (M * K))}


@dataclass
class HyperfinitenessReport:
    """Achieved component bound and cut fraction per (member, eps)."""

    rows: List[Dict[str, object]]
    evidenced: bool


def hyperfiniteness_profile(
    seq: Sequence[Graph],
    eps_values: Sequence[float],
    strategy: PartitionStrategy = PartitionStrategy.AUTO,
    seed: int = 0,
    max_component: Optional[int] = None,
    component_limit: int = DEFAULT_COMPONENT_LIMIT,
    threads: int = 1,
) -> HyperfinitenessReport:
    """Evidence for hyperfiniteness: K stays bounded across members within the cut budget."""
    rows: List[Dict[str, object]] = []
    evidenced = True
    for eps in eps_values:
        partitions = parallel_map(
            lambda g: partition_auto(g, eps, seed, strategy, max_component, component_limit),
            seq,
            threads,
        )
        for index, p in enumerate(partitions):
            rows.append({
                "member": index,
                "n": p.source.n,
                "eps": eps,
                "K": p.K,
                "max_component": p.max_component,
                "cut_fraction": float(p.eps),
                "within_budget": p.eps <= _as_fraction(eps),
            })
        half = max(1, len(partitions) // 2)
        early = max(p.max_component for p in partitions[:half])
        late = max(p.max_component for p in partitions[half:]) if partitions[half:] else early
        if late > early or any(p.eps > _as_fraction(eps) for p in partitions):
            evidenced = False

    logger.info("Hyperfiniteness profile computed", members=len(seq), eps_values=len(eps_values), evidenced=evidenced)
    return HyperfinitenessReport(rows=rows, evidenced=evidenced)
