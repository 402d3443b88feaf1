"""Graph functionals: almost-additivity, normalized limits, subadditive axioms and Fekete limits."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from core.domain.entities import CauchyProfile, FunctionalKind, SearchMode
from core.domain.graph import (
    Graph,
    VertexLabeling,
    disjoint_multiple,
    disjoint_union,
    induced_subgraph,
    relabel,
    subgraph,
)
from core.domain.values import NormedValue, ScalarValue
from core.exceptions import (
    EmptyGraphException,
    FunctionalEvaluationException,
    GraphLimException,
    NonScalarFunctionalException,
    SequenceTooShortException,
    UnknownFunctionalException,
)
from core.services.parallel import parallel_map
from core.usecases.cauchy import DEFAULT_MAX_PAIRS, sample_pairs, tail_profile
from core.usecases.counting import log_independent_sets
from core.usecases.metrics import delta_S
from core.usecases.ports import GraphFunctionalPort

logger = structlog.get_logger()

DEFAULT_TOLERANCE = 1e-3
DEFAULT_FLOOR = -1e6
EXHAUSTIVE_LIMIT = 8
RANDOM_TRIALS = 32
FEKETE_TOLERANCE = 1e-12
# float slack for exact identities such as special additivity of logarithms
VALUE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GraphFunctional(GraphFunctionalPort):
    """A named evaluation procedure with its declared constants."""

    name: str
    evaluator: Callable[[Graph], NormedValue] = field(repr=False)
    kind: FunctionalKind = FunctionalKind.UNKNOWN
    D: Optional[Callable[[int], float]] = field(default=None, repr=False)
    C: Optional[float] = None

    def evaluate(self, g: Graph) -> NormedValue:
        try:
            return self.evaluator(g)
        except GraphLimException:
            raise
        except Exception as e:
            logger.error("Functional evaluation failed", functional=self.name, n=g.n, error=str(e))
            raise FunctionalEvaluationException(self.name, e) from e

    def constant(self, d: int) -> Optional[float]:
        """Almost-additivity constant for degree bound d, when declared."""
        return None if self.D is None else float(self.D(d))

    def scalar(self, g: Graph) -> float:
        value = self.evaluate(g)
        if not isinstance(value, ScalarValue):
            raise NonScalarFunctionalException(self.name, type(value).__name__)
        return value.value


def builtin_functional(name: str) -> GraphFunctional:
    """vcount, ecount, log-indep-sets or eig-count:<kernel>."""
    if name == "vcount":
        return GraphFunctional(
            name=name,
            evaluator=lambda g: ScalarValue(float(g.n)),
            kind=FunctionalKind.ALMOST_ADDITIVE,
            D=lambda d: 0.0,
            C=1.0,
        )
    if name == "ecount":
        return GraphFunctional(
            name=name,
            evaluator=lambda g: ScalarValue(float(g.num_edges)),
            kind=FunctionalKind.ALMOST_ADDITIVE,
            D=lambda d: d / 2.0,
            C=None,
        )
    if name == "log-indep-sets":
        return GraphFunctional(
            name=name,
            evaluator=lambda g: ScalarValue(log_independent_sets(g)),
            kind=FunctionalKind.SUBADDITIVE,
            C=1.0,
        )
    if name.startswith("eig-count:"):
        from core.usecases.spectral import builtin_kernel, eig_counting_functional

        return eig_counting_functional(builtin_kernel(name.split(":", 1)[1]))
    raise UnknownFunctionalException(name)


@dataclass
class AlmostAdditivityReport:
    """Per-pair comparison of ||pF(G) - qF(H)|| against D * delta * p|V(G)|."""

    functional: str
    D: Optional[float]
    rows: List[Dict[str, Any]]
    passed: Optional[bool]
    empirical_D: float


def verify_almost_additive(
    f: GraphFunctional,
    pairs: Sequence[Tuple[Graph, Graph]],
    multiple_cap: int = 1,
    exact_limit: int = 10,
    seed: int = 0,
) -> AlmostAdditivityReport:
    """Check the almost-additivity bound on every pair for the minimal multiples and their first multiples."""
    rows: List[Dict[str, Any]] = []
    D = None
    empirical = 0.0
    for index, (g, h) in enumerate(pairs):
        if g.is_empty() or h.is_empty():
            raise EmptyGraphException("verify_almost_additive")
        D = f.constant(g.degree_bound)
        value_g, value_h = f.evaluate(g), f.evaluate(h)
        common = math.gcd(g.n, h.n)
        p0, q0 = h.n // common, g.n // common
        for k in range(1, multiple_cap + 1):
            p, q = k * p0, k * q0
            size = p * g.n
            search = SearchMode.EXACT if size <= exact_limit else SearchMode.HEURISTIC
            estimate = delta_S(
                disjoint_multiple(g, p),
                disjoint_multiple(h, q),
                mode=search,
                exact_limit=exact_limit,
                seed=seed,
            )
            lhs = (value_g * p - value_h * q).norm()
            scale = estimate.value * size
            rhs = None if D is None else D * scale
            if lhs > VALUE_TOLERANCE:
                empirical = max(empirical, lhs / scale if scale else math.inf)
            rows.append({
                "pair": index,
                "p": p,
                "q": q,
                "size": size,
                "lhs": lhs,
                "rhs": rhs,
                "delta": estimate.value,
                "kind": estimate.kind,
                "passed": None if rhs is None else lhs <= rhs + VALUE_TOLERANCE,
            })

    passed = None if D is None else all(row["passed"] for row in rows)
    logger.info("Almost-additivity verified", functional=f.name, pairs=len(pairs), passed=passed, empirical_D=empirical)
    return AlmostAdditivityReport(functional=f.name, D=D, rows=rows, passed=passed, empirical_D=empirical)


@dataclass
class NormalizedLimitReport:
    """Normalized values F(G)/|V(G)|, their Cauchy profile and the limit estimate."""

    limit: NormedValue
    normalized: List[NormedValue]
    profile: CauchyProfile
    converged_at: Optional[int]


def normalized_limit(
    f: GraphFunctional,
    seq: Sequence[Graph],
    tolerance: float = DEFAULT_TOLERANCE,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    threads: int = 1,
) -> NormalizedLimitReport:
    """Estimate lim F(G_n)/|V(G_n)| by the last member, with the sampled tail profile."""
    if not seq:
        raise SequenceTooShortException(0, 1)
    if any(g.is_empty() for g in seq):
        raise EmptyGraphException("normalized_limit")
    values = parallel_map(f.evaluate, seq, threads)
    normalized = [value / g.n for value, g in zip(values, seq)]

    if len(seq) >= 2:
        pairs = sample_pairs(len(seq), max_pairs)
        profile = tail_profile(len(seq), [(i, j, normalized[i].distance(normalized[j])) for i, j in pairs])
    else:
        profile = CauchyProfile(pairs=[], tail_sup=[0.0])
    converged = profile.converged_at(tolerance)

    logger.info("Normalized limit estimated", functional=f.name, members=len(seq), converged_at=converged)
    return NormalizedLimitReport(
        limit=normalized[-1],
        normalized=normalized,
        profile=profile,
        converged_at=converged,
    )


AXIOMS = ("boundedness", "monotonicity", "subadditivity", "special_additivity", "pattern_invariance")


@dataclass
class AxiomViolation:
    """A sample on which an axiom fails, with the witnessing sets."""

    axiom: str
    sample: int
    lhs: float
    rhs: float
    witness: Dict[str, Any]


@dataclass
class AxiomReport:
    """Outcome per axiom; boundedness is None when no constant C is declared."""

    functional: str
    results: Dict[str, Optional[bool]]
    violations: List[AxiomViolation]
    checked: Dict[str, int]

    @property
    def passed(self) -> bool:
        return all(result is not False for result in self.results.values())


def _subsets(n: int, rng: np.random.Generator, trials: int) -> List[List[int]]:
    if n <= EXHAUSTIVE_LIMIT:
        return [[v for v in range(n) if mask >> v & 1] for mask in range(1, (1 << n) - 1)]
    return [np.flatnonzero(rng.random(n) < 0.5).tolist() for _ in range(trials)]


def _random_edges(g: Graph, vertices: Sequence[int], rng: np.random.Generator) -> List[Tuple[int, int]]:
    inside = set(vertices)
    return [(u, v) for u, v in g.edges if u in inside and v in inside and rng.random() < 0.5]


def check_subadditive_axioms(
    h: GraphFunctional,
    g_samples: Sequence[Graph],
    seed: int = 0,
    strict: bool = False,
    trials: int = RANDOM_TRIALS,
) -> AxiomReport:
    """Check boundedness, monotonicity, subadditivity, special additivity and pattern invariance."""
    if g_samples:
        h.scalar(g_samples[0])
    rng = np.random.default_rng(seed)
    violations: List[AxiomViolation] = []
    checked = {axiom: 0 for axiom in AXIOMS}

    def record(axiom: str, sample: int, lhs: float, rhs: float, **witness: Any) -> None:
        checked[axiom] += 1
        if lhs > rhs + VALUE_TOLERANCE:
            violations.append(AxiomViolation(axiom, sample, lhs, rhs, witness))

    for index, g in enumerate(g_samples):
        value = h.scalar(g)

        if h.C is not None:
            record("boundedness", index, value, h.C * g.n)

        for part in _subsets(g.n, rng, trials):
            record("monotonicity", index, h.scalar(induced_subgraph(g, part)), value, vertices=part)
            if strict:
                edges = _random_edges(g, part, rng)
                record("monotonicity", index, h.scalar(subgraph(g, part, edges)), value, vertices=part, edges=edges)

        for part in _subsets(g.n, rng, trials):
            if 0 in part and g.n <= EXHAUSTIVE_LIMIT:
                # each bipartition once
                continue
            inside = set(part)
            rest = [v for v in range(g.n) if v not in inside]
            if not rest:
                continue
            pieces = h.scalar(induced_subgraph(g, part)) + h.scalar(induced_subgraph(g, rest))
            record("subadditivity", index, value, pieces, part=part, rest=rest)
            if strict:
                a = subgraph(g, part, _random_edges(g, part, rng))
                b = subgraph(g, rest, _random_edges(g, rest, rng))
                record("subadditivity", index, value, h.scalar(a) + h.scalar(b), part=part, rest=rest, arbitrary=True)

        partner = g_samples[(index + 1) % len(g_samples)]
        if partner.degree_bound == g.degree_bound:
            union = h.scalar(disjoint_union(g, partner))
            separate = value + h.scalar(partner)
            record("special_additivity", index, abs(union - separate), 0.0, partner=(index + 1) % len(g_samples))

        for _ in range(min(trials, 4)):
            sigma = VertexLabeling(tuple(rng.permutation(g.n).tolist()))
            record("pattern_invariance", index, abs(h.scalar(relabel(g, sigma)) - value), 0.0, sigma=list(sigma.perm))

    results: Dict[str, Optional[bool]] = {}
    for axiom in AXIOMS:
        if axiom == "boundedness" and h.C is None:
            results[axiom] = None
        else:
            results[axiom] = not any(v.axiom == axiom for v in violations)

    logger.info("Subadditive axioms checked", functional=h.name, samples=len(g_samples), violations=len(violations))
    return AxiomReport(functional=h.name, results=results, violations=violations, checked=checked)


@dataclass
class SubadditiveLimitReport:
    """lambda estimate (possibly -inf) from the normalized values over the tail."""

    lam: float
    normalized: List[float]
    liminf: float
    limsup: float
    gap: float
    converged: bool


def subadditive_limit(
    h: GraphFunctional,
    seq: Sequence[Graph],
    floor: float = DEFAULT_FLOOR,
    tolerance: float = DEFAULT_TOLERANCE,
    threads: int = 1,
) -> SubadditiveLimitReport:
    """liminf of h(G_n)/|V(G_n)| over the second half of the sequence."""
    if not seq:
        raise SequenceTooShortException(0, 1)
    if any(g.is_empty() for g in seq):
        raise EmptyGraphException("subadditive_limit")
    normalized = [value / g.n for value, g in zip(parallel_map(h.scalar, seq, threads), seq)]
    tail = normalized[len(normalized) // 2:]
    liminf, limsup = min(tail), max(tail)
    lam = liminf
    if liminf < floor and tail[-1] < tail[0]:
        lam = -math.inf
    gap = limsup - liminf
    logger.info("Subadditive limit estimated", functional=h.name, members=len(seq), lam=lam, gap=gap)
    return SubadditiveLimitReport(
        lam=lam,
        normalized=normalized,
        liminf=liminf,
        limsup=limsup,
        gap=gap,
        converged=gap <= tolerance and math.isfinite(lam),
    )


@dataclass
class FeketeReport:
    """Subadditivity check of a real sequence and its limit estimates."""

    infimum: float
    last_ratio: float
    richardson: Optional[float]
    subadditive: bool
    violations: List[Tuple[int, int]] = field(default_factory=list)
    violation_count: int = 0


def fekete_limit(
    a: Sequence[float],
    tolerance: float = FEKETE_TOLERANCE,
    max_violations: int = 100,
) -> FeketeReport:
    """Check a_{m+n} <= a_m + a_n (indices from 1) and estimate lim a_n / n."""
    if not a:
        raise SequenceTooShortException(0, 1)
    values = np.asarray(a, dtype=float)
    length = values.size
    index = np.arange(1, length + 1)

    # one row of pairs (m, n), m <= n <= length - m, at a time
    witnesses: List[Tuple[int, int]] = []
    violation_count = 0
    for m in range(1, length // 2 + 1):
        excess = values[2 * m - 1:] - values[m - 1] - values[m - 1:length - m]
        bad = np.flatnonzero(excess > tolerance)
        if not bad.size:
            continue
        violation_count += int(bad.size)
        room = max_violations - len(witnesses)
        witnesses.extend((m, m + int(i)) for i in bad[:room])

    ratios = values / index
    richardson = None
    N = length if length % 2 == 0 else length - 1
    if N >= 2:
        top = Fraction(float(values[N - 1])) / N
        half = Fraction(float(values[N // 2 - 1])) / (N // 2)
        richardson = float(2 * top - half)

    return FeketeReport(
        infimum=float(ratios.min()),
        last_ratio=float(ratios[-1]),
        richardson=richardson,
        subadditive=violation_count == 0,
        violations=witnesses,
        violation_count=violation_count,
    )
