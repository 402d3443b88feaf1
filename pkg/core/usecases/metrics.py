"""Graph distances: labeled-star distance, permutation-minimized distance and the geometric distance."""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from core.domain.entities import CauchyProfile, DistanceEstimate, EstimateKind, SearchMode, StarMode
from core.domain.graph import (
    Edge,
    Graph,
    VertexLabeling,
    connected_components,
    disjoint_multiple,
    relabel,
)
from core.exceptions import (
    DegreeBoundMismatchException,
    ExactLimitExceededException,
    InvariantViolationException,
    PartitionMismatchException,
    SizeMismatchException,
    StatisticsMismatchException,
)
from core.services.parallel import parallel_map
from core.usecases.cauchy import DEFAULT_MAX_PAIRS, sample_pairs, tail_profile
from core.usecases.partition import Partition

logger = structlog.get_logger()

DEFAULT_EXACT_LIMIT = 10
DEFAULT_MULTIPLE_CAP = 3
DEFAULT_RESTARTS = 8
DEFAULT_SWEEPS = 50

# restarts are skipped above this size
RESTART_VERTEX_LIMIT = 64
# all-pairs swap neighbourhoods up to this size, local neighbourhoods beyond
FULL_SWAP_LIMIT = 60


@dataclass(frozen=True)
class StarFingerprint:
    """Labeled 1-ball of a vertex: sorted closed neighbourhood plus the edges compared."""

    center: int
    vertices: Tuple[int, ...]
    edges: Tuple[Edge, ...]

    @classmethod
    def of(cls, g: Graph, v: int, mode: StarMode = StarMode.INDUCED) -> "StarFingerprint":
        g.check_vertex(v)
        neighbors = g.adjacency[v]
        vertices = tuple(sorted((v, *neighbors)))
        edges = [(min(v, u), max(v, u)) for u in neighbors]
        if StarMode(mode) is StarMode.INDUCED:
            for i, a in enumerate(neighbors):
                for b in neighbors[i + 1:]:
                    if g.has_edge(a, b):
                        edges.append((min(a, b), max(a, b)))
        return cls(v, vertices, tuple(sorted(edges)))


def _require_same_shape(g: Graph, h: Graph) -> None:
    if g.n != h.n:
        raise SizeMismatchException(g.n, h.n)
    if g.degree_bound != h.degree_bound:
        raise DegreeBoundMismatchException(g.degree_bound, h.degree_bound)


def delta(g: Graph, h: Graph, mode: StarMode = StarMode.INDUCED) -> float:
    """Fraction of vertices whose labeled stars differ; 1 against the empty graph."""
    if g.is_empty() and h.is_empty():
        return 0.0
    if g.is_empty() or h.is_empty():
        return 1.0
    _require_same_shape(g, h)
    differing = sum(
        1 for v in range(g.n)
        if StarFingerprint.of(g, v, mode) != StarFingerprint.of(h, v, mode)
    )
    return differing / g.n


def _star_classes(g: Graph, mode: StarMode) -> List[Tuple[int, int]]:
    """Isomorphism invariant of each star: degree and edges among the neighbours."""
    classes = []
    for v in range(g.n):
        inner = 0
        if mode is StarMode.INDUCED:
            neighbors = g.adjacency[v]
            inner = sum(
                1 for i, a in enumerate(neighbors) for b in neighbors[i + 1:] if g.has_edge(a, b)
            )
        classes.append((len(g.adjacency[v]), inner))
    return classes


class _Matching:
    """A bijection pi: V(g) -> V(h) with incremental star comparison."""

    def __init__(self, g: Graph, h: Graph, mode: StarMode, pi: Sequence[int]):
        self.g = g
        self.h = h
        self.mode = mode
        self.g_sets = [frozenset(neighbors) for neighbors in g.adjacency]
        self.h_sets = [frozenset(neighbors) for neighbors in h.adjacency]
        self.pi = list(pi)
        self.inv = [0] * len(self.pi)
        for v, w in enumerate(self.pi):
            self.inv[w] = v
        self.bad = [self.star_differs(v) for v in range(g.n)]
        self.count = sum(self.bad)

    def star_differs(self, v: int) -> bool:
        w = self.pi[v]
        neighbors = self.g.adjacency[v]
        image = self.h_sets[w]
        if len(neighbors) != len(image):
            return True
        if any(self.pi[u] not in image for u in neighbors):
            return True
        if self.mode is StarMode.INDUCED:
            for i, a in enumerate(neighbors):
                for b in neighbors[i + 1:]:
                    if (b in self.g_sets[a]) != (self.pi[b] in self.h_sets[self.pi[a]]):
                        return True
        return False

    def _affected(self, a: int, b: int) -> set:
        affected = {a, b}
        for v in (a, b):
            affected.update(self.g.adjacency[v])
            affected.update(self.inv[y] for y in self.h.adjacency[self.pi[v]])
        return affected

    def _swap(self, a: int, b: int) -> None:
        wa, wb = self.pi[a], self.pi[b]
        self.pi[a], self.pi[b] = wb, wa
        self.inv[wa], self.inv[wb] = b, a

    def try_swap(self, a: int, b: int) -> bool:
        """Swap the images of a and b when that lowers the mismatch count."""
        before = self._affected(a, b)
        self._swap(a, b)
        after = self._affected(a, b)
        touched = before | after
        previous = {v: self.bad[v] for v in touched}
        updated = {v: self.star_differs(v) for v in touched}
        change = sum(updated.values()) - sum(previous.values())
        if change < 0:
            for v, value in updated.items():
                self.bad[v] = value
            self.count += change
            return True
        self._swap(a, b)
        return False


def _greedy_matching(g: Graph, h: Graph, class_g: Sequence, class_h: Sequence) -> List[int]:
    """Grow the matching along BFS order, preferring images adjacent to matched neighbours."""
    n = g.n
    pool = sorted(range(n), key=lambda w: (class_h[w], w))
    by_class: Dict[Tuple[int, int], List[int]] = {}
    for w in pool:
        by_class.setdefault(class_h[w], []).append(w)
    cursor = {key: 0 for key in by_class}
    used = [False] * n
    pi = [-1] * n

    def take_from_pool(v: int) -> int:
        members = by_class.get(class_g[v], [])
        position = cursor.get(class_g[v], 0)
        while position < len(members) and used[members[position]]:
            position += 1
        if class_g[v] in cursor:
            cursor[class_g[v]] = position
        if position < len(members):
            return members[position]
        return next(w for w in pool if not used[w])

    order: List[int] = []
    for component in connected_components(g):
        start = min(component, key=lambda v: (class_g[v], v))
        seen = {start}
        frontier = [start]
        while frontier:
            order.extend(frontier)
            following = []
            for v in frontier:
                for u in g.adjacency[v]:
                    if u not in seen:
                        seen.add(u)
                        following.append(u)
            frontier = following

    for v in order:
        matched = [u for u in g.adjacency[v] if pi[u] >= 0]
        candidates = {
            y for u in matched for y in h.adjacency[pi[u]] if not used[y]
        }
        if candidates:
            def score(y: int) -> Tuple:
                support = sum(1 for u in matched if y in h.adjacency[pi[u]])
                return (class_h[y] != class_g[v], -support, class_h[y], y)
            w = min(candidates, key=score)
        else:
            w = take_from_pool(v)
        pi[v] = w
        used[w] = True
    return pi


def _swap_partners(matching: _Matching, a: int, full: bool) -> List[int]:
    n = matching.g.n
    if full:
        return [b for b in range(n) if b != a]
    near = set()
    for u in matching.g.adjacency[a]:
        near.add(u)
        near.update(matching.g.adjacency[u])
    for y in matching.h.adjacency[matching.pi[a]]:
        near.add(matching.inv[y])
        near.update(matching.inv[z] for z in matching.h.adjacency[y])
    near.discard(a)
    return sorted(near)


def _local_search(matching: _Matching, sweeps: int) -> None:
    full = matching.g.n <= FULL_SWAP_LIMIT
    for _ in range(sweeps):
        improved = False
        for a in [v for v in range(matching.g.n) if matching.bad[v]]:
            if not matching.bad[a]:
                continue
            for b in _swap_partners(matching, a, full):
                if matching.try_swap(a, b):
                    improved = True
                    break
        if not improved or matching.count == 0:
            return


def _heuristic_matching(
    g: Graph,
    h: Graph,
    mode: StarMode,
    seed: int,
    restarts: int,
    sweeps: int,
) -> Tuple[int, List[int]]:
    class_g = _star_classes(g, mode)
    class_h = _star_classes(h, mode)
    starts = [list(range(g.n)), _greedy_matching(g, h, class_g, class_h)]
    if g.n <= RESTART_VERTEX_LIMIT:
        rng = np.random.default_rng(seed)
        starts.extend(rng.permutation(g.n).tolist() for _ in range(restarts))

    best: Optional[_Matching] = None
    for start in starts:
        matching = _Matching(g, h, mode, start)
        _local_search(matching, sweeps)
        if best is None or matching.count < best.count:
            best = matching
        if best.count == 0:
            break
    assert best is not None
    return best.count, best.pi


class _BranchAndBound:
    """Exact minimum of the mismatch count over all bijections V(g) -> V(h).

    An assigned pair {a, b} is inconsistent when adjacency of a, b in g differs
    from adjacency of their images in h. Such a pair spoils the stars of a and b
    and, for induced stars, of every common neighbour of a and b in g. At a full
    assignment the spoiled vertices are exactly the mismatched ones.
    """

    def __init__(self, g: Graph, h: Graph, mode: StarMode, best_count: int, best_pi: List[int]):
        self.g = g
        self.h = h
        self.mode = mode
        self.n = g.n
        self.g_sets = [frozenset(neighbors) for neighbors in g.adjacency]
        self.h_sets = [frozenset(neighbors) for neighbors in h.adjacency]
        self.class_g = _star_classes(g, mode)
        self.class_h = _star_classes(h, mode)
        self.remaining_g = Counter(self.class_g)
        self.remaining_h = Counter(self.class_h)
        self.pi = [-1] * self.n
        self.inv = [-1] * self.n
        self.marks = [0] * self.n
        self.marked_total = 0
        self.marked_unassigned = 0
        self.best_count = best_count
        self.best_pi = list(best_pi)
        self.order = [v for component in connected_components(g) for v in self._bfs(component)]
        self.floor = self._histogram_bound()
        self.nodes = 0

    def _bfs(self, component: List[int]) -> List[int]:
        start = min(component, key=lambda v: (self.class_g[v], v))
        order = [start]
        seen = {start}
        for v in order:
            for u in self.g.adjacency[v]:
                if u not in seen:
                    seen.add(u)
                    order.append(u)
        return order

    def _histogram_bound(self) -> int:
        unassigned = sum(self.remaining_g.values())
        paired = sum(min(count, self.remaining_h[key]) for key, count in self.remaining_g.items())
        return unassigned - paired

    def _lower_bound(self) -> int:
        assigned_marked = self.marked_total - self.marked_unassigned
        return assigned_marked + max(self._histogram_bound(), self.marked_unassigned)

    def _mark(self, v: int, spoiled: List[int]) -> None:
        self.marks[v] += 1
        spoiled.append(v)
        if self.marks[v] == 1:
            self.marked_total += 1
            if self.pi[v] < 0:
                self.marked_unassigned += 1

    def _unmark(self, v: int) -> None:
        self.marks[v] -= 1
        if self.marks[v] == 0:
            self.marked_total -= 1
            if self.pi[v] < 0:
                self.marked_unassigned -= 1

    def _assign(self, v: int, w: int) -> List[int]:
        self.pi[v] = w
        self.inv[w] = v
        self.remaining_g[self.class_g[v]] -= 1
        self.remaining_h[self.class_h[w]] -= 1
        if self.marks[v]:
            self.marked_unassigned -= 1

        spoiled: List[int] = []
        partners = set(self.g.adjacency[v])
        partners.update(self.inv[y] for y in self.h.adjacency[w] if self.inv[y] >= 0)
        for u in partners:
            if self.pi[u] < 0:
                continue
            if (u in self.g_sets[v]) == (self.pi[u] in self.h_sets[w]):
                continue
            self._mark(v, spoiled)
            self._mark(u, spoiled)
            if self.mode is StarMode.INDUCED:
                for c in self.g_sets[v] & self.g_sets[u]:
                    self._mark(c, spoiled)
        return spoiled

    def _unassign(self, v: int, spoiled: List[int]) -> None:
        for u in reversed(spoiled):
            self._unmark(u)
        w = self.pi[v]
        if self.marks[v]:
            self.marked_unassigned += 1
        self.pi[v] = -1
        self.inv[w] = -1
        self.remaining_g[self.class_g[v]] += 1
        self.remaining_h[self.class_h[w]] += 1

    def _candidates(self, v: int) -> List[int]:
        images = [self.pi[u] for u in self.g.adjacency[v] if self.pi[u] >= 0]

        def priority(w: int) -> Tuple[int, int, int]:
            attached = sum(1 for y in images if w in self.h_sets[y])
            return (self.class_h[w] != self.class_g[v], len(images) - attached, w)

        return sorted((w for w in range(self.n) if self.inv[w] < 0), key=priority)

    def _descend(self, depth: int) -> None:
        self.nodes += 1
        if depth == self.n:
            if self.marked_total < self.best_count:
                self.best_count = self.marked_total
                self.best_pi = list(self.pi)
            return
        v = self.order[depth]
        for w in self._candidates(v):
            spoiled = self._assign(v, w)
            if self._lower_bound() < self.best_count:
                self._descend(depth + 1)
            self._unassign(v, spoiled)
            if self.best_count <= self.floor:
                return

    def run(self) -> Tuple[int, List[int]]:
        if self.best_count > self.floor:
            self._descend(0)
        return self.best_count, self.best_pi


def _witness(pi: Sequence[int]) -> List[int]:
    """Labeling sigma of h with h^sigma matched to g: sigma = pi^-1."""
    sigma = [0] * len(pi)
    for v, w in enumerate(pi):
        sigma[w] = v
    return sigma


def delta_S(
    g: Graph,
    h: Graph,
    mode: SearchMode = SearchMode.EXACT,
    star_mode: StarMode = StarMode.INDUCED,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    sweeps: int = DEFAULT_SWEEPS,
) -> DistanceEstimate:
    """min over sigma of delta(g, h^sigma): exact by branch and bound, or a tagged upper bound."""
    mode = SearchMode(mode)
    star_mode = StarMode(star_mode)
    if g.is_empty() and h.is_empty():
        return DistanceEstimate(value=0.0, kind=EstimateKind.EXACT, witness=[])
    if g.is_empty() or h.is_empty():
        return DistanceEstimate(value=1.0, kind=EstimateKind.EXACT, witness=[])
    _require_same_shape(g, h)
    if mode is SearchMode.EXACT and g.n > exact_limit:
        raise ExactLimitExceededException(g.n, exact_limit)

    count, pi = _heuristic_matching(g, h, star_mode, seed, restarts, sweeps)
    kind = EstimateKind.UPPER_BOUND
    if mode is SearchMode.EXACT:
        search = _BranchAndBound(g, h, star_mode, count, pi)
        count, pi = search.run()
        kind = EstimateKind.EXACT
        logger.debug("Exact permutation search finished", n=g.n, nodes=search.nodes, mismatched=count)

    witness = _witness(pi)
    value = count / g.n
    replayed = delta(g, relabel(h, VertexLabeling(tuple(witness))), star_mode)
    if not math.isclose(replayed, value, abs_tol=1e-12):
        raise InvariantViolationException(
            "witness reproduces distance",
            {"reported": value, "replayed": replayed, "kind": kind.value}
        )
    return DistanceEstimate(value=value, kind=kind, witness=witness)


def delta_rho(
    g: Graph,
    h: Graph,
    multiple_cap: int = DEFAULT_MULTIPLE_CAP,
    star_mode: StarMode = StarMode.INDUCED,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    sweeps: int = DEFAULT_SWEEPS,
) -> DistanceEstimate:
    """Upper bound on the geometric distance over multiples of the minimal size-matching pair."""
    if g.is_empty() and h.is_empty():
        return DistanceEstimate(value=0.0, kind=EstimateKind.EXACT, witness=[])
    if g.is_empty() or h.is_empty():
        return DistanceEstimate(value=1.0, kind=EstimateKind.EXACT, witness=[])
    if g.degree_bound != h.degree_bound:
        raise DegreeBoundMismatchException(g.degree_bound, h.degree_bound)

    common = math.gcd(g.n, h.n)
    q0, p0 = h.n // common, g.n // common
    best: Optional[Tuple[float, Tuple[int, int], List[int]]] = None
    for k in range(1, multiple_cap + 1):
        q, p = k * q0, k * p0
        size = q * g.n
        search = SearchMode.EXACT if size <= exact_limit else SearchMode.HEURISTIC
        estimate = delta_S(
            disjoint_multiple(g, q),
            disjoint_multiple(h, p),
            mode=search,
            star_mode=star_mode,
            exact_limit=exact_limit,
            seed=seed,
            restarts=restarts,
            sweeps=sweeps,
        )
        if best is None or estimate.value < best[0]:
            best = (estimate.value, (q, p), estimate.witness or [])
        if best[0] == 0.0:
            break

    assert best is not None
    value, multiples, witness = best
    logger.debug("Geometric distance bounded", n_g=g.n, n_h=h.n, value=value, multiples=multiples)
    return DistanceEstimate(
        value=value,
        kind=EstimateKind.UPPER_BOUND,
        witness=witness,
        multiples=multiples,
    )


def delta_rho_upper_from_partitions(pg: Partition, ph: Partition, eps1: float) -> float:
    """4 d eps1 + 2 M K beta from per-vertex component counts, clamped to [0, 1]."""
    if pg.K != ph.K:
        raise PartitionMismatchException("K", pg.K, ph.K)
    d_g, d_h = pg.source.degree_bound, ph.source.degree_bound
    if d_g != d_h:
        raise PartitionMismatchException("degree_bound", d_g, d_h)

    classes = set(pg.class_counts) | set(ph.class_counts)
    beta = max(
        (abs(pg.component_frequency(key) - ph.component_frequency(key)) for key in classes),
        default=0,
    )
    observed = sum(1 for key in classes if key.size <= pg.K)
    bound = 4 * d_g * eps1 + 2 * observed * pg.K * float(beta)
    return min(1.0, max(0.0, bound))


@dataclass
class StrongCauchyReport:
    """Strong Cauchy profile with the estimate chosen per sampled pair."""

    profile: CauchyProfile
    estimates: Dict[Tuple[int, int], DistanceEstimate] = field(default_factory=dict)
    partition_bounds: Dict[Tuple[int, int], float] = field(default_factory=dict)


def strong_cauchy_profile(
    seq: Sequence[Graph],
    multiple_cap: int = DEFAULT_MULTIPLE_CAP,
    partitions: Optional[Sequence[Partition]] = None,
    eps1: Optional[float] = None,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    star_mode: StarMode = StarMode.INDUCED,
    exact_limit: int = DEFAULT_EXACT_LIMIT,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    sweeps: int = DEFAULT_SWEEPS,
    threads: int = 1,
) -> StrongCauchyReport:
    """Best available geometric-distance bound per sampled pair and its tail supremum."""
    pairs = sample_pairs(len(seq), max_pairs)
    bounds = {g.degree_bound for g in seq}
    if len(bounds) > 1:
        raise DegreeBoundMismatchException(min(bounds), max(bounds))
    if partitions is not None:
        if len(partitions) != len(seq):
            raise PartitionMismatchException("count", len(partitions), len(seq))
        if eps1 is None:
            eps1 = max(float(p.eps) for p in partitions)

    def estimate(pair: Tuple[int, int]) -> DistanceEstimate:
        i, j = pair
        return delta_rho(
            seq[i], seq[j], multiple_cap,
            star_mode=star_mode, exact_limit=exact_limit,
            seed=seed, restarts=restarts, sweeps=sweeps,
        )

    estimates = dict(zip(pairs, parallel_map(estimate, pairs, threads)))
    partition_bounds: Dict[Tuple[int, int], float] = {}
    values = []
    for i, j in pairs:
        value = estimates[(i, j)].value
        if partitions is not None:
            bound = delta_rho_upper_from_partitions(partitions[i], partitions[j], eps1)
            partition_bounds[(i, j)] = bound
            value = min(value, bound)
        values.append((i, j, value))

    profile = tail_profile(len(seq), values)
    logger.info("Strong profile computed", members=len(seq), pairs=len(pairs), tail_sup=profile.tail_sup[0])
    return StrongCauchyReport(profile=profile, estimates=estimates, partition_bounds=partition_bounds)


def strong_weak_consistency(
    strong: CauchyProfile,
    weak: CauchyProfile,
    tolerance: float,
) -> Dict[str, object]:
    """Indices whose strong tail is within tolerance while the weak tail is not."""
    if len(strong.tail_sup) != len(weak.tail_sup):
        raise StatisticsMismatchException("length", len(strong.tail_sup), len(weak.tail_sup))
    compared = {pair.i for pair in strong.pairs}
    offending = [
        m for m, (s, w) in enumerate(zip(strong.tail_sup, weak.tail_sup))
        if any(i >= m for i in compared) and s <= tolerance and w > tolerance
    ]
    return {"consistent": not offending, "offending_indices": offending}
