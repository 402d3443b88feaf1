"""Tests for kernels, operator assembly and spectral distributions."""

from fractions import Fraction

import numpy as np
import pytest

from core.domain.canonical import canonical_key
from core.domain.graph import RootedGraph
from core.exceptions import (
    InvalidInputException,
    KernelAsymmetricException,
    KernelNotWellDefinedException,
    MatrixAsymmetricException,
    MissingKernelClassException,
    UnknownKernelException,
)
from core.usecases.functionals import builtin_functional, verify_almost_additive
from core.usecases.local_stats import class_census
from core.usecases.references import reference_curve
from core.usecases.sequences import gen_cycle, gen_path, gen_random_regular
from core.usecases.spectral import (
    KernelSpec,
    assemble,
    atom_mass,
    builtin_kernel,
    ids_experiment,
    interlacing_holds,
    product_trace,
    spectral_cdf,
    sup_distance,
    trace_functional,
)


def _centered_p3():
    return canonical_key(RootedGraph(gen_path(3), 1))


def _skew_values(key):
    neighbors = set(key.representative.adjacency[0])
    degree = float(len(neighbors))
    return tuple(degree if v in neighbors else 0.0 for v in range(key.size))


def test_builtin_adjacency_matches_edges():
    """The adjacency kernel assembles the adjacency matrix."""
    g = gen_cycle(6)
    m = assemble(g, builtin_kernel("adjacency")).toarray()

    expected = np.zeros((6, 6))
    for u, v in g.edges:
        expected[u, v] = expected[v, u] = 1.0
    assert np.array_equal(m, expected)
    with pytest.raises(UnknownKernelException):
        builtin_kernel("hessian")


def test_table_kernel_covering_every_class():
    """A one-entry table suffices on a cycle, not on a path."""
    k = KernelSpec(name="partial", R=1, table={_centered_p3(): (0.0, 1.0, 1.0)})

    assert np.array_equal(
        assemble(gen_cycle(8), k).toarray(),
        assemble(gen_cycle(8), builtin_kernel("adjacency")).toarray(),
    )
    with pytest.raises(MissingKernelClassException):
        assemble(gen_path(5), k)


def test_kernel_table_validation():
    """Values must fit the class, stay within range and respect orbits."""
    key = _centered_p3()

    with pytest.raises(KernelNotWellDefinedException):
        KernelSpec(name="bad", R=1, table={key: (0.0, 1.0, 2.0)})
    with pytest.raises(InvalidInputException):
        KernelSpec(name="short", R=1, table={key: (0.0, 1.0)})
    with pytest.raises(InvalidInputException):
        KernelSpec(name="range", R=0, table={key: (0.0, 1.0, 1.0)})


def test_asymmetric_kernel_is_rejected():
    """Neighbour weights depending on the root degree break symmetry at path ends."""
    k = KernelSpec(name="skew", R=1, generator=_skew_values)

    with pytest.raises(KernelAsymmetricException):
        assemble(gen_path(4), k)


def test_combined_kernel():
    """adjacency - degree is the laplacian kernel."""
    combined = builtin_kernel("adjacency").combine(builtin_kernel("degree"), 1.0, -1.0)
    g = gen_path(5)

    assert np.allclose(assemble(g, combined).toarray(), assemble(g, builtin_kernel("laplacian")).toarray())


@pytest.mark.parametrize("n", [99, 100, 999, 1000])
def test_path_laplacian_against_arccos_reference(n):
    """The graph laplacian of P_n is within 1/n of the line's IDS."""
    cdf = spectral_cdf(assemble(gen_path(n), builtin_kernel("graph-laplacian")))
    curve = reference_curve("arccos-1d", "graph-laplacian")

    assert cdf.mode == "dense"
    assert sup_distance(cdf, curve) <= 1.5 / n


@pytest.mark.parametrize("n", [99, 100, 999, 1000])
def test_cycle_adjacency_against_arccos_reference(n):
    """Double eigenvalues of C_n put the CDF at most 1/n from the arcsine law."""
    cdf = spectral_cdf(assemble(gen_cycle(n), builtin_kernel("adjacency")))

    assert sup_distance(cdf, reference_curve("arccos-1d")) <= 1.5 / n


@pytest.mark.parametrize("n", [7, 21, 99, 100, 999, 1000])
def test_atom_at_zero_only_for_odd_paths(n):
    """Adjacency of P_n has the simple eigenvalue 0 when n is odd and none when n is even."""
    cdf = spectral_cdf(assemble(gen_path(n), builtin_kernel("adjacency")))

    assert atom_mass(cdf, 0.0) == (Fraction(1, n) if n % 2 else 0)


def test_inertia_counting_matches_dense():
    """LDL inertia counts agree with a full eigensolve away from eigenvalues."""
    m = assemble(gen_cycle(10), builtin_kernel("adjacency"))
    dense = spectral_cdf(m)
    inertia = spectral_cdf(m, dense_limit=0)
    points = np.array([-2.5, -1.9, -0.5, 0.3, 1.1, 2.5])

    assert inertia.mode == "inertia"
    assert inertia.count(points).tolist() == dense.count(points).tolist()
    assert sup_distance(dense, inertia) <= 1e-12
    with pytest.raises(InvalidInputException):
        inertia.jumps()


@pytest.mark.parametrize("seed", range(3))
def test_inertia_counting_matches_dense_on_random_regular(seed):
    """A cubic graph on 400 vertices, counted at 100 uniform points."""
    m = assemble(gen_random_regular(400, 3, seed=seed), builtin_kernel("adjacency"))
    points = np.random.default_rng(seed).uniform(-3.5, 3.5, size=100)

    assert spectral_cdf(m, dense_limit=0).count(points).tolist() == spectral_cdf(m).count(points).tolist()


def test_asymmetric_matrix_is_rejected():
    """Spectral distributions need symmetric input."""
    with pytest.raises(MatrixAsymmetricException):
        spectral_cdf(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_cdf_rows_end_at_one():
    """Dense rows list each distinct eigenvalue with the cumulative mass."""
    rows = spectral_cdf(assemble(gen_path(3), builtin_kernel("adjacency"))).rows()

    assert len(rows) == 3
    assert rows[1][0] == 0.0
    assert rows[-1][1] == 1.0


def test_trace_on_cycles_and_paths():
    """Laplacian trace is -2 on cycles and -(2n - 2)/n on paths."""
    k = builtin_kernel("laplacian")
    cycle = gen_cycle(10)
    path = gen_path(10)

    on_cycle = trace_functional(class_census(cycle, 1), k, assemble(cycle, k))
    on_path = trace_functional(class_census(path, 1), k, assemble(path, k))

    assert on_cycle["trace"] == pytest.approx(-2.0)
    assert on_cycle["diagonal_average"] == pytest.approx(-2.0)
    assert on_path["trace"] == pytest.approx(-18 / 10)


@pytest.mark.parametrize("kernel", ["adjacency", "laplacian"])
@pytest.mark.parametrize("seed", range(100))
def test_trace_identity_on_random_graphs(random_graph, seed, kernel):
    """The class sum equals the diagonal average on arbitrary bounded-degree graphs."""
    rng = np.random.default_rng(seed)
    g = random_graph(rng, int(rng.integers(2, 13)))
    k = builtin_kernel(kernel)

    result = trace_functional(class_census(g, 1), k, assemble(g, k))

    assert result["trace"] == result["diagonal_average"]
    expected = -2 * g.num_edges / g.n if kernel == "laplacian" else 0.0
    assert result["trace"] == pytest.approx(expected)


def test_interlacing_for_principal_submatrix():
    """Removing an end vertex of P6 leaves P5."""
    k = builtin_kernel("adjacency")
    small = spectral_cdf(assemble(gen_path(5), k))
    large = spectral_cdf(assemble(gen_path(6), k))

    assert interlacing_holds(small, large)
    with pytest.raises(InvalidInputException):
        interlacing_holds(large, small)


def test_product_trace_is_symmetric():
    """tr(A^2)/n is the average degree."""
    assert product_trace(gen_cycle(6), builtin_kernel("adjacency"), builtin_kernel("adjacency")) == (2.0, 2.0)
    assert product_trace(gen_path(4), builtin_kernel("adjacency"), builtin_kernel("degree")) == (0.0, 0.0)


def test_ids_experiment_on_paths():
    """Adjacency spectra of paths approach the arcsine law."""
    seq = [gen_path(n) for n in (10, 20, 40)]
    report = ids_experiment(seq, builtin_kernel("adjacency"), reference_curve("arccos-1d"))

    assert report.sizes == [10, 20, 40]
    assert not report.null_sequence
    assert all(d <= 1.5 / n for d, n in zip(report.reference_distances, report.sizes))
    assert len(report.profile.tail_sup) == 3


def test_ids_experiment_zero_kernel_is_null():
    """The zero kernel concentrates all mass at zero."""
    report = ids_experiment([gen_cycle(5), gen_cycle(9)], builtin_kernel("zero"))

    assert report.null_sequence
    assert report.null_members == [True, True]
    assert all(atom_mass(cdf, 0.0) == 1 for cdf in report.cdfs)
    assert report.reference_distances is None


def test_eigenvalue_counting_functional():
    """n_H of P3 has three jumps, so its sup norm is three."""
    value = builtin_functional("eig-count:adjacency").evaluate(gen_path(3))

    assert value.norm() == 3.0


def test_eigenvalue_counting_is_almost_additive_on_random_pairs(random_graph):
    """Two hundred same-size pairs stay within the declared constant 4 (d + 1) for d = 3."""
    rng = np.random.default_rng(31)
    pairs = []
    for _ in range(200):
        n = int(rng.integers(3, 8))
        pairs.append((random_graph(rng, n), random_graph(rng, n)))

    report = verify_almost_additive(builtin_functional("eig-count:adjacency"), pairs)

    assert report.D == 16.0
    assert report.passed
    assert all(row["passed"] for row in report.rows)
    assert report.empirical_D <= 16.0
