"""Local statistics: ball-class census, the statistics vector and d_pi."""

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import structlog

from core.domain.canonical import (
    DEFAULT_CANONICAL_LIMIT,
    DEFAULT_COMPONENT_LIMIT,
    CanonicalBallKey,
    canonical_key,
    unrooted_key,
)
from core.domain.entities import CauchyProfile
from core.domain.graph import Graph, ball, bfs_layers, connected_components, induced_subgraph
from core.exceptions import (
    EmptyGraphException,
    InvariantViolationException,
    ParameterOutOfRangeException,
    StatisticsMismatchException,
)
from core.services.parallel import chunked, parallel_map
from core.usecases.cauchy import DEFAULT_MAX_PAIRS, sample_pairs, tail_profile

logger = structlog.get_logger()

DEFAULT_TOLERANCE = 1e-3


@dataclass(frozen=True)
class StatVector:
    """Truncated local statistics L(G): class counts over |V(G)|."""

    counts: Mapping[CanonicalBallKey, int]
    level_counts: Tuple[Mapping[CanonicalBallKey, int], ...]
    r_max: int
    n: int
    degree_bound: int

    def frequency(self, key: CanonicalBallKey) -> Fraction:
        return Fraction(self.counts.get(key, 0), self.n)

    @property
    def frequencies(self) -> Dict[CanonicalBallKey, Fraction]:
        return {key: Fraction(count, self.n) for key, count in self.counts.items()}

    def classes(self) -> List[CanonicalBallKey]:
        """Observed classes in enumeration order."""
        return sorted(self.counts)

    def level_frequencies(self, r: int) -> Dict[CanonicalBallKey, Fraction]:
        """Classes of the radius-r balls and their vertex frequencies."""
        if not 0 <= r <= self.r_max:
            raise ParameterOutOfRangeException("r", r, f"[0, {self.r_max}]")
        return {key: Fraction(count, self.n) for key, count in self.level_counts[r].items()}

    def check_normalization(self) -> None:
        """Each vertex falls in exactly one class per radius."""
        for r, level in enumerate(self.level_counts):
            total = sum(level.values())
            if total != self.n:
                raise InvariantViolationException(
                    "census normalization",
                    {"radius": r, "total": total, "n": self.n}
                )

    def to_document(self) -> Dict[str, Dict[str, int]]:
        """JSON map from hex key to {num, den, radius, ball_size}."""
        return {
            key.hex: {
                "num": self.counts[key],
                "den": self.n,
                "radius": key.radius,
                "ball_size": key.size,
            }
            for key in self.classes()
        }


def _ball_keys(g: Graph, x: int, r: int, limit: int) -> List[CanonicalBallKey]:
    layers = bfs_layers(g, x, r)
    keys: List[CanonicalBallKey] = []
    for s in range(r + 1):
        if s < len(layers):
            keys.append(canonical_key(ball(g, x, s), limit))
        else:
            # saturated: the component is already covered
            keys.append(keys[-1])
    return keys


def class_census(
    g: Graph,
    r: int,
    limit: int = DEFAULT_CANONICAL_LIMIT,
    threads: int = 1,
) -> StatVector:
    """p(G, alpha) for every class alpha of radius <= r observed in g."""
    if g.is_empty():
        raise EmptyGraphException("class_census")
    if r < 0:
        raise ParameterOutOfRangeException("r", r, "r >= 0")

    def census_chunk(vertices: Sequence[int]) -> List[Counter]:
        levels = [Counter() for _ in range(r + 1)]
        for x in vertices:
            for s, key in enumerate(_ball_keys(g, x, r, limit)):
                levels[s][key] += 1
        return levels

    partial = parallel_map(census_chunk, chunked(list(range(g.n)), threads), threads)
    levels = [Counter() for _ in range(r + 1)]
    for chunk_levels in partial:
        for s, level in enumerate(chunk_levels):
            levels[s].update(level)

    counts: Dict[CanonicalBallKey, int] = {}
    for s, level in enumerate(levels):
        for key, count in level.items():
            if key.radius == s:
                counts[key] = count

    vector = StatVector(
        counts=counts,
        level_counts=tuple(dict(level) for level in levels),
        r_max=r,
        n=g.n,
        degree_bound=g.degree_bound,
    )
    vector.check_normalization()
    logger.debug("Census completed", n=g.n, radius=r, classes=len(counts))
    return vector


def _require_comparable(a: StatVector, b: StatVector) -> None:
    if a.r_max != b.r_max:
        raise StatisticsMismatchException("r_max", a.r_max, b.r_max)
    if a.degree_bound != b.degree_bound:
        raise StatisticsMismatchException("degree_bound", a.degree_bound, b.degree_bound)


def d_pi(a: StatVector, b: StatVector) -> float:
    """Product-topology distance with weights 2^-k over the enumerated classes."""
    _require_comparable(a, b)
    terms = []
    for k, key in enumerate(sorted(set(a.counts) | set(b.counts)), start=1):
        difference = abs(a.frequency(key) - b.frequency(key))
        if difference:
            terms.append(math.ldexp(float(difference / (1 + difference)), -k))
    return math.fsum(terms)


def d_pi_tail(a: StatVector, b: StatVector) -> float:
    """Weight left to classes beyond the enumerated prefix."""
    _require_comparable(a, b)
    return math.ldexp(1.0, -len(set(a.counts) | set(b.counts)))


@dataclass
class WeakCauchyReport:
    """Weak Cauchy profile of a sequence with tail frequency estimates."""

    profile: CauchyProfile
    vectors: List[StatVector]
    limit_estimates: Dict[CanonicalBallKey, Fraction]
    spreads: Dict[CanonicalBallKey, float]
    stable_classes: List[CanonicalBallKey] = field(default_factory=list)


def weak_cauchy_profile(
    seq: Sequence[Graph],
    r_max: int,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    tolerance: float = DEFAULT_TOLERANCE,
    limit: int = DEFAULT_CANONICAL_LIMIT,
    threads: int = 1,
) -> WeakCauchyReport:
    """d_pi between sampled members and the per-index tail supremum."""
    pairs = sample_pairs(len(seq), max_pairs)
    bounds = {g.degree_bound for g in seq}
    if len(bounds) > 1:
        raise StatisticsMismatchException("degree_bound", min(bounds), max(bounds))

    vectors = parallel_map(lambda g: class_census(g, r_max, limit), seq, threads)
    profile = tail_profile(len(seq), [(i, j, d_pi(vectors[i], vectors[j])) for i, j in pairs])

    last = vectors[-1]
    tail = vectors[len(vectors) // 2:]
    spreads = {}
    for key in last.classes():
        values = [float(vector.frequency(key)) for vector in tail]
        spreads[key] = max(values) - min(values)
    stable = [key for key, spread in spreads.items() if spread <= tolerance]

    logger.info(
        "Weak profile computed",
        members=len(seq),
        pairs=len(pairs),
        tail_sup=profile.tail_sup[0],
        stable_classes=len(stable),
    )
    return WeakCauchyReport(
        profile=profile,
        vectors=vectors,
        limit_estimates=last.frequencies,
        spreads=spreads,
        stable_classes=sorted(stable),
    )


def ball_growth(g: Graph, r_max: int) -> List[Dict[str, float]]:
    """Largest and mean ball size per radius."""
    if g.is_empty():
        raise EmptyGraphException("ball_growth")
    sizes = [[0] * g.n for _ in range(r_max + 1)]
    for x in range(g.n):
        layers = bfs_layers(g, x, r_max)
        total = 0
        for s in range(r_max + 1):
            if s < len(layers):
                total += len(layers[s])
            sizes[s][x] = total
    return [
        {"radius": s, "max": max(row), "mean": sum(row) / g.n}
        for s, row in enumerate(sizes)
    ]


@dataclass
class AlmostInjectivityReport:
    """Whether two graphs are unions of copies of one common graph."""

    common_base: bool
    base_counts: Dict[str, int]
    multiplicities: Optional[Tuple[int, int]]


def _component_classes(g: Graph, limit: int) -> Counter:
    return Counter(
        unrooted_key(induced_subgraph(g, component), limit)
        for component in connected_components(g)
    )


def almost_injectivity(g: Graph, h: Graph, limit: int = DEFAULT_COMPONENT_LIMIT) -> AlmostInjectivityReport:
    """Detect g = qK and h = pK for a common graph K."""
    classes_g = _component_classes(g, limit)
    classes_h = _component_classes(h, limit)
    if set(classes_g) != set(classes_h) or not classes_g:
        return AlmostInjectivityReport(False, {}, None)

    q = math.gcd(*classes_g.values())
    p = math.gcd(*classes_h.values())
    base_g = {key: count // q for key, count in classes_g.items()}
    base_h = {key: count // p for key, count in classes_h.items()}
    if base_g != base_h:
        return AlmostInjectivityReport(False, {}, None)
    return AlmostInjectivityReport(
        True,
        {key.hex: count for key, count in sorted(base_g.items())},
        (q, p),
    )
