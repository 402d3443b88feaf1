"""Pattern-invariant operators on graphs, eigenvalue counting and spectral distributions."""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import structlog
from scipy import linalg, sparse

from core.domain.canonical import DEFAULT_CANONICAL_LIMIT, CanonicalBallKey, canonical_form, root_fixing_orbits
from core.domain.entities import CauchyProfile, FunctionalKind
from core.domain.graph import Graph, ball
from core.domain.values import StepFunctionValue
from core.exceptions import (
    InvalidInputException,
    InvariantViolationException,
    KernelAsymmetricException,
    KernelNotWellDefinedException,
    MatrixAsymmetricException,
    MissingKernelClassException,
    ParameterOutOfRangeException,
    UnknownKernelException,
)
from core.services.parallel import parallel_map
from core.usecases.cauchy import DEFAULT_MAX_PAIRS, sample_pairs, tail_profile
from core.usecases.functionals import GraphFunctional
from core.usecases.local_stats import StatVector, class_census

logger = structlog.get_logger()

DEFAULT_DENSE_LIMIT = 4000
DEFAULT_DECIMALS = 9
DEFAULT_GRID_POINTS = 1000
INERTIA_SHIFT = 1e-9
SYMMETRY_TOLERANCE = 1e-12

Curve = Callable[[np.ndarray], np.ndarray]
ClassValues = Tuple[float, ...]


@dataclass(frozen=True)
class KernelSpec:
    """Admissible kernel: per radius-R class alpha, values h_alpha on the representative's vertices."""

    name: str
    R: int
    table: Mapping[CanonicalBallKey, ClassValues] = field(default_factory=dict)
    generator: Optional[Callable[[CanonicalBallKey], ClassValues]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.R < 0:
            raise ParameterOutOfRangeException("R", self.R, "R >= 0")
        for key, values in self.table.items():
            self._check_entry(key, values)

    def _check_entry(self, key: CanonicalBallKey, values: ClassValues) -> None:
        if len(values) != key.size:
            raise InvalidInputException("values", len(values), f"class {key.hex} has {key.size} vertices")
        if key.radius > self.R:
            raise InvalidInputException("ball", key.hex, f"radius {key.radius} exceeds kernel range {self.R}")
        for orbit in root_fixing_orbits(key.representative):
            if len({values[v] for v in orbit}) > 1:
                raise KernelNotWellDefinedException(key.hex, orbit)

    def values_for(self, key: CanonicalBallKey) -> ClassValues:
        values = self.table.get(key)
        if values is not None:
            return values
        if self.generator is not None:
            return self.generator(key)
        raise MissingKernelClassException(key.hex, 0)

    def combine(self, other: "KernelSpec", a: float = 1.0, b: float = 1.0) -> "KernelSpec":
        """The kernel a*self + b*other."""
        if self.R != other.R:
            raise InvalidInputException("R", other.R, f"combined kernels need equal range {self.R}")

        def generator(key: CanonicalBallKey) -> ClassValues:
            return tuple(a * x + b * y for x, y in zip(self.values_for(key), other.values_for(key)))

        return KernelSpec(name=f"{a}*{self.name}+{b}*{other.name}", R=self.R, generator=generator)

    def vanishes_on(self, key: CanonicalBallKey) -> bool:
        return all(value == 0 for value in self.values_for(key))


def _root_degree(key: CanonicalBallKey) -> int:
    return len(key.representative.adjacency[0])


def _star_values(root: Callable[[int], float], neighbor: float) -> Callable[[CanonicalBallKey], ClassValues]:
    def generator(key: CanonicalBallKey) -> ClassValues:
        neighbors = set(key.representative.adjacency[0])
        values = [neighbor if v in neighbors else 0.0 for v in range(key.size)]
        values[0] = float(root(_root_degree(key)))
        return tuple(values)
    return generator


BUILTIN_KERNELS: Dict[str, Callable[[CanonicalBallKey], ClassValues]] = {
    "adjacency": _star_values(lambda degree: 0.0, 1.0),
    "laplacian": _star_values(lambda degree: -degree, 1.0),
    "graph-laplacian": _star_values(lambda degree: degree, -1.0),
    "degree": _star_values(lambda degree: degree, 0.0),
    "zero": _star_values(lambda degree: 0.0, 0.0),
}


def builtin_kernel(name: str) -> KernelSpec:
    """Nearest-neighbour kernels: adjacency, laplacian (A - D), graph-laplacian (D - A), degree, zero."""
    generator = BUILTIN_KERNELS.get(name)
    if generator is None:
        raise UnknownKernelException(name)
    return KernelSpec(name=name, R=1, generator=generator)


def assemble(
    g: Graph,
    k: KernelSpec,
    limit: int = DEFAULT_CANONICAL_LIMIT,
) -> sparse.csr_matrix:
    """M[x, y] = h_alpha(phi(y)) where B_R(x) is isomorphic to alpha via phi."""
    rows: List[int] = []
    cols: List[int] = []
    data: List[float] = []
    for x in range(g.n):
        rooted = ball(g, x, k.R)
        form = canonical_form(rooted, limit)
        try:
            values = k.values_for(form.key)
        except MissingKernelClassException:
            raise MissingKernelClassException(form.key.hex, x) from None
        for local, y in enumerate(rooted.back_map):
            value = values[form.labeling[local]]
            if value:
                rows.append(x)
                cols.append(y)
                data.append(value)

    matrix = sparse.coo_matrix((data, (rows, cols)), shape=(g.n, g.n), dtype=float).tocsr()
    _check_symmetric(matrix)
    return matrix


def _check_symmetric(matrix: sparse.csr_matrix) -> None:
    difference = abs(matrix - matrix.T).tocoo()
    if difference.nnz and difference.data.max() > SYMMETRY_TOLERANCE:
        worst = int(np.argmax(difference.data))
        x, y = int(difference.row[worst]), int(difference.col[worst])
        raise KernelAsymmetricException(x, y, float(matrix[x, y]), float(matrix[y, x]))


def _as_dense(m: Union[np.ndarray, sparse.spmatrix]) -> np.ndarray:
    return m.toarray() if sparse.issparse(m) else np.asarray(m, dtype=float)


def _inertia_count(dense: np.ndarray, lam: float, shift: float = INERTIA_SHIFT) -> int:
    """Eigenvalues <= lam, from the negative inertia of an LDL^T factorization of M - (lam + shift) I."""
    shifted = dense - (lam + shift) * np.identity(dense.shape[0])
    _, d, _ = linalg.ldl(shifted)
    negative = 0
    i = 0
    size = d.shape[0]
    while i < size:
        if i + 1 < size and d[i, i + 1] != 0.0:
            negative += int(np.sum(np.linalg.eigvalsh(d[i:i + 2, i:i + 2]) < 0))
            i += 2
        else:
            negative += int(d[i, i] < 0)
            i += 1
    return negative


class SpectralCDF:
    """Normalized eigenvalue counting function N(lambda) = #{E <= lambda} / n."""

    def __init__(
        self,
        n: int,
        bound: float,
        eigenvalues: Optional[np.ndarray] = None,
        matrix: Optional[np.ndarray] = None,
        shift: float = INERTIA_SHIFT,
    ):
        if (eigenvalues is None) == (matrix is None):
            raise InvalidInputException("mode", None, "exactly one of eigenvalues or matrix")
        self.n = n
        self.bound = bound
        self.eigenvalues = None if eigenvalues is None else np.sort(np.asarray(eigenvalues, dtype=float))
        self._matrix = matrix
        self.shift = shift

    @property
    def mode(self) -> str:
        return "dense" if self.eigenvalues is not None else "inertia"

    def count(self, lam: Union[float, np.ndarray]) -> Union[int, np.ndarray]:
        """Unnormalized count of eigenvalues <= lam."""
        if self.eigenvalues is not None:
            result = np.searchsorted(self.eigenvalues, lam, side="right")
            return int(result) if np.ndim(result) == 0 else result
        if np.ndim(lam) == 0:
            return _inertia_count(self._matrix, float(lam), self.shift)
        return np.array([_inertia_count(self._matrix, float(x), self.shift) for x in np.ravel(lam)])

    def __call__(self, lam: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        if self.n == 0:
            return 0.0 if np.ndim(lam) == 0 else np.zeros(np.shape(lam))
        return self.count(lam) / self.n

    def jumps(self) -> Tuple[np.ndarray, np.ndarray]:
        """Distinct eigenvalues and their multiplicities (dense mode)."""
        if self.eigenvalues is None:
            raise InvalidInputException("mode", "inertia", "jump list requires dense mode")
        return np.unique(self.eigenvalues, return_counts=True)

    def grid(self, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
        return np.linspace(-self.bound, self.bound, points)

    def to_step_function(self, weight: float = 1.0) -> StepFunctionValue:
        """weight * n_H as a step function (dense mode)."""
        if self.eigenvalues is None:
            raise InvalidInputException("mode", "inertia", "step functions require dense mode")
        return StepFunctionValue.counting(self.eigenvalues, weight)

    def rows(self, points: int = DEFAULT_GRID_POINTS) -> List[Tuple[float, float]]:
        """(lambda, N(lambda)) rows for reports: the jumps in dense mode, a grid otherwise."""
        if self.eigenvalues is not None:
            values, counts = self.jumps()
            return [(float(v), float(c) / self.n) for v, c in zip(values, np.cumsum(counts))]
        grid = self.grid(points)
        return [(float(x), float(y)) for x, y in zip(grid, self(grid))]


def spectral_cdf(
    m: Union[np.ndarray, sparse.spmatrix],
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    decimals: int = DEFAULT_DECIMALS,
    shift: float = INERTIA_SHIFT,
) -> SpectralCDF:
    """Full eigensolve below dense_limit, LDL^T inertia counting above it."""
    dense = _as_dense(m)
    n = dense.shape[0]
    if dense.shape != (n, n):
        raise InvalidInputException("matrix", dense.shape, "square matrix required")
    deviation = float(np.max(np.abs(dense - dense.T))) if n else 0.0
    if deviation > SYMMETRY_TOLERANCE:
        raise MatrixAsymmetricException(deviation)
    bound = float(np.max(np.sum(np.abs(dense), axis=1))) if n else 0.0

    if n > dense_limit:
        logger.debug("Using inertia counting", n=n, dense_limit=dense_limit)
        return SpectralCDF(n, bound, matrix=dense, shift=shift)

    eigenvalues = np.round(linalg.eigvalsh(dense), decimals) if n else np.zeros(0)
    if n and (eigenvalues[0] < -bound - 1e-8 or eigenvalues[-1] > bound + 1e-8):
        raise InvariantViolationException(
            "eigenvalues within row-sum bound",
            {"bound": bound, "min": float(eigenvalues[0]), "max": float(eigenvalues[-1])}
        )
    return SpectralCDF(n, bound, eigenvalues=eigenvalues + 0.0)


def sup_distance(
    a: SpectralCDF,
    b: Union[SpectralCDF, Curve],
    grid_points: int = DEFAULT_GRID_POINTS,
) -> float:
    """Supremum distance between a CDF and another CDF or a continuous nondecreasing curve."""
    if isinstance(b, SpectralCDF):
        if a.mode == "dense" and b.mode == "dense":
            points = np.union1d(a.jumps()[0], b.jumps()[0])
            if not points.size:
                return 0.0
            return float(np.max(np.abs(a(points) - b(points))))
        bound = max(a.bound, b.bound)
        points = np.linspace(-bound - 1.0, bound + 1.0, grid_points)
        for cdf in (a, b):
            if cdf.mode == "dense":
                points = np.union1d(points, cdf.jumps()[0])
        return float(np.max(np.abs(a(points) - b(points))))

    if a.mode == "dense":
        values, counts = a.jumps()
        if not values.size:
            return 0.0
        reference = np.asarray(b(values), dtype=float)
        after = np.cumsum(counts) / a.n
        before = after - counts / a.n
        return float(max(np.max(np.abs(after - reference)), np.max(np.abs(before - reference))))

    points = np.linspace(-a.bound - 1.0, a.bound + 1.0, grid_points)
    return float(np.max(np.abs(a(points) - np.asarray(b(points), dtype=float))))


def atom_mass(cdf: SpectralCDF, lam: float, tolerance: float = 1e-9) -> Fraction:
    """Spectral mass at lam: multiplicity over n."""
    if cdf.n == 0:
        return Fraction(0)
    count = cdf.count(lam + tolerance) - cdf.count(lam - tolerance)
    return Fraction(int(count), cdf.n)


def trace_functional(
    stats: StatVector,
    k: KernelSpec,
    matrix: Optional[Union[np.ndarray, sparse.spmatrix]] = None,
) -> Dict[str, float]:
    """Sum over radius-R classes of p(alpha) h_alpha(root), checked against the diagonal average."""
    if stats.r_max < k.R:
        raise ParameterOutOfRangeException("r_max", stats.r_max, f">= kernel range {k.R}")
    # rational sums: both sides add the same root values, only grouped differently
    exact = sum(
        (frequency * Fraction(k.values_for(key)[0]) for key, frequency in stats.level_frequencies(k.R).items()),
        Fraction(0),
    )
    result = {"trace": float(exact)}
    if matrix is not None:
        diagonal = sum((Fraction(float(x)) for x in _as_dense(matrix).diagonal()), Fraction(0)) / stats.n
        if diagonal != exact:
            raise InvariantViolationException(
                "trace identity", {"trace": float(exact), "diagonal": float(diagonal)}
            )
        result["diagonal_average"] = float(diagonal)
    return result


def interlacing_holds(small: SpectralCDF, large: SpectralCDF, tolerance: float = 1e-9) -> bool:
    """Cauchy interlacing for a principal submatrix: large[i] <= small[i] <= large[i + n - m]."""
    if small.eigenvalues is None or large.eigenvalues is None:
        raise InvalidInputException("mode", "inertia", "interlacing requires dense mode")
    m, n = small.n, large.n
    if m > n:
        raise InvalidInputException("small", m, f"at most {n} eigenvalues")
    lower = large.eigenvalues[:m] <= small.eigenvalues + tolerance
    upper = small.eigenvalues <= large.eigenvalues[n - m:] + tolerance
    return bool(np.all(lower) and np.all(upper))


def product_trace(g: Graph, k1: KernelSpec, k2: KernelSpec) -> Tuple[float, float]:
    """Normalized tr(H1 H2) and tr(H2 H1)."""
    h1, h2 = assemble(g, k1), assemble(g, k2)
    forward = float((h1 @ h2).diagonal().sum()) / g.n
    backward = float((h2 @ h1).diagonal().sum()) / g.n
    if not math.isclose(forward, backward, rel_tol=1e-12, abs_tol=1e-12):
        raise InvariantViolationException("trace property", {"forward": forward, "backward": backward})
    return forward, backward


def _null_flag(stats: StatVector, k: KernelSpec) -> bool:
    return all(k.vanishes_on(key) for key in stats.level_frequencies(k.R))


@dataclass
class IdsReport:
    """Spectral distributions of a sequence and their convergence diagnostics."""

    cdfs: List[SpectralCDF]
    profile: CauchyProfile
    reference_distances: Optional[List[float]]
    null_sequence: bool
    null_members: List[bool]
    sizes: List[int]


def ids_experiment(
    seq: Sequence[Graph],
    k: KernelSpec,
    reference: Optional[Curve] = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    decimals: int = DEFAULT_DECIMALS,
    grid_points: int = DEFAULT_GRID_POINTS,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    limit: int = DEFAULT_CANONICAL_LIMIT,
    threads: int = 1,
    shift: float = INERTIA_SHIFT,
) -> IdsReport:
    """Per-member spectral CDFs, their sup-distance profile and distances to a reference curve."""
    pairs = sample_pairs(len(seq), max_pairs)
    cdfs = parallel_map(
        lambda g: spectral_cdf(assemble(g, k, limit), dense_limit, decimals, shift),
        seq,
        threads,
    )
    profile = tail_profile(
        len(seq),
        [(i, j, sup_distance(cdfs[i], cdfs[j], grid_points)) for i, j in pairs],
    )
    distances = None
    if reference is not None:
        distances = [sup_distance(cdf, reference, grid_points) for cdf in cdfs]

    census = [class_census(g, k.R, limit) for g in seq]
    null_members = [_null_flag(stats, k) for stats in census]
    tail = census[len(census) // 2:]
    null_sequence = all(_null_flag(stats, k) for stats in tail)

    logger.info(
        "Spectral distributions computed",
        kernel=k.name,
        members=len(seq),
        tail_sup=profile.tail_sup[0],
        null_sequence=null_sequence,
    )
    return IdsReport(
        cdfs=cdfs,
        profile=profile,
        reference_distances=distances,
        null_sequence=null_sequence,
        null_members=null_members,
        sizes=[g.n for g in seq],
    )


def eig_counting_functional(k: KernelSpec, decimals: int = DEFAULT_DECIMALS) -> GraphFunctional:
    """G -> n_H, the unnormalized eigenvalue counting function, as a step function."""

    def evaluate(g: Graph) -> StepFunctionValue:
        if g.is_empty():
            return StepFunctionValue.constant(0.0)
        cdf = spectral_cdf(assemble(g, k), dense_limit=g.n, decimals=decimals)
        return cdf.to_step_function()

    reach = max(k.R, 1)
    return GraphFunctional(
        name=f"eig-count:{k.name}",
        evaluator=evaluate,
        kind=FunctionalKind.ALMOST_ADDITIVE,
        D=lambda d: 4.0 * (d + 1) ** reach,
    )
