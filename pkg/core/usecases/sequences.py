"""Deterministic generators for test graph families and manifest-driven sequences."""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np
import structlog
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from core.domain.entities import SequenceManifest
from core.domain.graph import Graph, with_degree_bound
from core.exceptions import (
    DegreeBoundExceededException,
    GenerationInfeasibleException,
    InvalidInputException,
    InvalidManifestException,
    ParameterOutOfRangeException,
    RejectionCapExceededException,
    UnknownFamilyException,
)
from core.services.parallel import parallel_map
from core.usecases.ports import GraphSourcePort

logger = structlog.get_logger()

DEFAULT_REJECTION_CAP = 1000
DEFAULT_MAX_DERIVED_SEEDS = 16


def _require(name: str, value: int, minimum: int) -> None:
    if value < minimum:
        raise ParameterOutOfRangeException(name, value, f"{name} >= {minimum}")


def gen_path(n: int) -> Graph:
    """P_n labeled 0-1-...-(n-1)."""
    _require("n", n, 1)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], 2)


def gen_cycle(n: int) -> Graph:
    """C_n: the path plus the edge {0, n-1}."""
    _require("n", n, 3)
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)], 2)


def _grid_edges(b: int, wrap: bool) -> List[tuple]:
    edges = set()
    for row in range(b):
        for col in range(b):
            v = row * b + col
            for r, c in ((row, col + 1), (row + 1, col)):
                if not wrap and (r >= b or c >= b):
                    continue
                u = (r % b) * b + (c % b)
                edges.add((min(u, v), max(u, v)))
    return sorted(edges)


def gen_torus(b: int, dim: int = 2) -> Graph:
    """Cayley graph of (Z/b)^dim: the cycle C_b or the row-major b x b torus grid."""
    _require("b", b, 3)
    if dim == 1:
        return gen_cycle(b)
    if dim != 2:
        raise ParameterOutOfRangeException("dim", dim, "{1, 2}")
    return Graph.from_edges(b * b, _grid_edges(b, wrap=True), 4)


def gen_box(b: int, dim: int = 2) -> Graph:
    """The box [0, b)^dim with free boundary: P_b or the b x b grid."""
    _require("b", b, 1)
    if dim == 1:
        return gen_path(b)
    if dim != 2:
        raise ParameterOutOfRangeException("dim", dim, "{1, 2}")
    return Graph.from_edges(b * b, _grid_edges(b, wrap=False), 4)


def gen_tree_ball(depth: int) -> Graph:
    """Complete binary tree of the given depth; vertex i has children 2i+1 and 2i+2."""
    _require("depth", depth, 0)
    n = 2 ** (depth + 1) - 1
    return Graph.from_edges(n, [((v - 1) // 2, v) for v in range(1, n)], 3)


def _pairing_attempts(n: int, d: int, rng: np.random.Generator, cap: int) -> Optional[Graph]:
    stubs = np.repeat(np.arange(n), d)
    for _ in range(cap):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        if np.unique(pairs, axis=0).shape[0] != pairs.shape[0]:
            continue
        return Graph.from_edges(n, sorted(map(tuple, pairs.tolist())), d)
    return None


def gen_random_regular(
    n: int,
    d: int,
    seed: int = 0,
    rejection_cap: int = DEFAULT_REJECTION_CAP,
    max_derived_seeds: int = DEFAULT_MAX_DERIVED_SEEDS,
) -> Graph:
    """Simple d-regular graph from the pairing model, rejecting loops and multi-edges."""
    _require("d", d, 1)
    if n * d % 2:
        raise GenerationInfeasibleException("random-regular", f"n*d = {n * d} is odd")
    if n <= d:
        raise GenerationInfeasibleException("random-regular", f"need n > d, got n={n}, d={d}")

    def attempt(index: int) -> Graph:
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        graph = _pairing_attempts(n, d, rng, rejection_cap)
        if graph is None:
            logger.warning("Pairing rejection cap reached", n=n, d=d, seed=seed, derived_seed=index)
            raise RejectionCapExceededException(n, d, rejection_cap)
        if index:
            logger.info("Random regular graph from derived seed", n=n, d=d, seed=seed, derived_seed=index)
        return graph

    graph = None
    for retry_attempt in Retrying(
        stop=stop_after_attempt(max_derived_seeds),
        retry=retry_if_exception_type(RejectionCapExceededException),
        reraise=True,
    ):
        with retry_attempt:
            graph = attempt(retry_attempt.retry_state.attempt_number - 1)
    return graph


@dataclass(frozen=True)
class Family:
    """A generator family with its parameter names."""

    name: str
    build: Callable[..., Graph]
    params: tuple
    seeded: bool = False


FAMILIES: Dict[str, Family] = {
    "path": Family("path", gen_path, ("n",)),
    "cycle": Family("cycle", gen_cycle, ("n",)),
    "torus": Family("torus", gen_torus, ("b", "dim")),
    "box": Family("box", gen_box, ("b", "dim")),
    "tree-ball": Family("tree-ball", gen_tree_ball, ("depth",)),
    "random-regular": Family("random-regular", gen_random_regular, ("n", "d"), seeded=True),
}


def generate(
    family: str,
    params: Mapping[str, Any],
    seed: int = 0,
    rejection_cap: int = DEFAULT_REJECTION_CAP,
    max_derived_seeds: int = DEFAULT_MAX_DERIVED_SEEDS,
) -> Graph:
    """Build one member of a registered family."""
    spec = FAMILIES.get(family)
    if spec is None:
        raise UnknownFamilyException(family)
    unknown = set(params) - set(spec.params)
    if unknown:
        raise InvalidInputException("params", sorted(unknown), f"family '{family}' takes {', '.join(spec.params)}")
    arguments = {}
    for name, value in params.items():
        try:
            arguments[name] = int(value)
        except (TypeError, ValueError):
            raise InvalidInputException(name, value, "must be an integer") from None
    if spec.seeded:
        arguments.update(seed=seed, rejection_cap=rejection_cap, max_derived_seeds=max_derived_seeds)
    try:
        return spec.build(**arguments)
    except TypeError as e:
        raise InvalidInputException("params", dict(params), str(e)) from e


def build_sequence(
    manifest: SequenceManifest,
    source: GraphSourcePort,
    threads: int = 1,
    default_seed: int = 0,
    rejection_cap: int = DEFAULT_REJECTION_CAP,
    max_derived_seeds: int = DEFAULT_MAX_DERIVED_SEEDS,
) -> List[Graph]:
    """Load or generate every member and lift it to the manifest degree bound."""

    def load(member) -> Graph:
        if member.family is not None:
            seed = member.seed if member.seed is not None else default_seed
            return generate(member.family, member.params, seed, rejection_cap, max_derived_seeds)
        return source.read(member.path)

    graphs = parallel_map(load, manifest.members, threads)
    lifted = []
    for index, g in enumerate(graphs):
        if g.max_degree > manifest.d:
            raise InvalidManifestException(
                f"members[{index}]",
                f"max degree {g.max_degree} exceeds d = {manifest.d}"
            )
        try:
            lifted.append(with_degree_bound(g, manifest.d))
        except DegreeBoundExceededException as e:
            raise InvalidManifestException(f"members[{index}]", e.message) from e

    if not manifest.allow_nonincreasing:
        for index in range(1, len(lifted)):
            if lifted[index].n <= lifted[index - 1].n:
                raise InvalidManifestException(
                    f"members[{index}]",
                    f"sizes must strictly increase ({lifted[index - 1].n} then {lifted[index].n})"
                )

    logger.info("Sequence built", members=len(lifted), d=manifest.d, sizes=[g.n for g in lifted])
    return lifted
