"""Tests for graph functionals and Fekete limits."""

import math

import numpy as np
import pytest

from core.domain.entities import FunctionalKind
from core.domain.values import ScalarValue
from core.exceptions import (
    FunctionalEvaluationException,
    NonScalarFunctionalException,
    SequenceTooShortException,
    UnknownFunctionalException,
)
from core.usecases.functionals import (
    GraphFunctional,
    builtin_functional,
    check_subadditive_axioms,
    fekete_limit,
    normalized_limit,
    subadditive_limit,
    verify_almost_additive,
)
from core.usecases.sequences import gen_cycle, gen_path


def _neg_square() -> GraphFunctional:
    return GraphFunctional(
        name="neg-square",
        evaluator=lambda g: ScalarValue(-float(g.n ** 2)),
        kind=FunctionalKind.SUBADDITIVE,
    )


def test_builtin_functional_lookup():
    """Known names resolve; anything else is rejected."""
    assert builtin_functional("vcount").constant(4) == 0.0
    assert builtin_functional("ecount").constant(4) == 2.0
    assert builtin_functional("log-indep-sets").kind == FunctionalKind.SUBADDITIVE
    with pytest.raises(UnknownFunctionalException):
        builtin_functional("diameter")


def test_evaluation_errors_are_wrapped():
    """Unexpected failures inside an evaluator carry the functional name."""
    broken = GraphFunctional(name="broken", evaluator=lambda g: ScalarValue(1 / 0))

    with pytest.raises(FunctionalEvaluationException) as excinfo:
        broken.evaluate(gen_path(3))
    assert excinfo.value.details["functional"] == "broken"


def test_vcount_is_almost_additive():
    """Vertex count matches exactly on balanced multiples."""
    report = verify_almost_additive(builtin_functional("vcount"), [(gen_path(3), gen_path(6))])

    assert report.passed
    assert report.rows[0]["p"] == 2
    assert report.rows[0]["q"] == 1
    assert report.rows[0]["lhs"] == 0.0


def test_ecount_bound_on_path_and_cycle():
    """|e(P4) - e(C4)| = 1 is within (d/2) * delta * 4 with delta = 1/2."""
    report = verify_almost_additive(builtin_functional("ecount"), [(gen_path(4), gen_cycle(4))])

    assert report.passed
    assert report.rows[0]["delta"] == pytest.approx(0.5)
    assert report.empirical_D == pytest.approx(0.5)


def test_undeclared_constant_reports_no_verdict():
    """Without D the bound cannot be checked."""
    report = verify_almost_additive(builtin_functional("log-indep-sets"), [(gen_path(4), gen_cycle(4))])

    assert report.passed is None
    assert report.rows[0]["rhs"] is None


def test_normalized_limit_of_vertex_count():
    """F(G)/|V(G)| is identically one for the vertex count."""
    report = normalized_limit(builtin_functional("vcount"), [gen_path(n) for n in (3, 5, 8)])

    assert report.limit == ScalarValue(1.0)
    assert report.converged_at == 0


def test_normalized_limit_of_edge_count():
    """Paths have (n - 1)/n edges per vertex."""
    report = normalized_limit(builtin_functional("ecount"), [gen_path(n) for n in (10, 20, 40, 80)])

    assert report.limit.value == pytest.approx(79 / 80)
    assert report.profile.tail_sup[0] >= report.profile.tail_sup[-1]
    with pytest.raises(SequenceTooShortException):
        normalized_limit(builtin_functional("ecount"), [])


def test_independent_sets_satisfy_axioms():
    """log2 of the independent-set count passes every axiom on small graphs."""
    report = check_subadditive_axioms(
        builtin_functional("log-indep-sets"),
        [gen_path(3), gen_path(4), gen_cycle(4), gen_cycle(5)],
    )

    assert report.passed
    assert report.violations == []
    assert report.checked["subadditivity"] > 0
    assert report.results["boundedness"] is True


def test_edge_count_violates_subadditivity():
    """Cut edges make e(G) exceed the sum over the pieces."""
    report = check_subadditive_axioms(builtin_functional("ecount"), [gen_path(3)])

    assert report.results["subadditivity"] is False
    assert report.results["monotonicity"] is True
    assert report.results["boundedness"] is None
    assert not report.passed
    assert all(v.axiom == "subadditivity" for v in report.violations)


def test_axioms_require_scalar_values():
    """Step-function functionals have no subadditive reading."""
    with pytest.raises(NonScalarFunctionalException):
        check_subadditive_axioms(builtin_functional("eig-count:adjacency"), [gen_path(3)])


def test_subadditive_limit_of_independent_sets():
    """Paths approach log2 of the golden ratio from above."""
    seq = [gen_path(n) for n in (10, 20, 40, 80)]
    report = subadditive_limit(builtin_functional("log-indep-sets"), seq)

    assert report.lam == pytest.approx(math.log2((1 + math.sqrt(5)) / 2), abs=5e-3)
    assert report.liminf == report.normalized[-1]
    assert report.gap > 0


def test_subadditive_limit_diverging_to_minus_infinity():
    """Values falling below the floor and still decreasing give -inf."""
    seq = [gen_path(n) for n in (10, 20, 40, 80)]
    report = subadditive_limit(_neg_square(), seq, floor=-10)

    assert report.lam == -math.inf
    assert not report.converged


def test_fekete_ceiling_sequence():
    """ceil(n/2) + 3: Richardson recovers 1/2 while the infimum lags."""
    a = [math.ceil(n / 2) + 3 for n in range(1, 1001)]
    report = fekete_limit(a)

    assert report.subadditive
    assert report.richardson == pytest.approx(0.5)
    assert report.infimum == pytest.approx(0.503)
    assert report.last_ratio == pytest.approx(0.503)


def test_fekete_squares_are_not_subadditive():
    """n^2 fails first at (1, 1)."""
    report = fekete_limit([n * n for n in range(1, 11)])

    assert not report.subadditive
    assert report.violations[0] == (1, 1)
    assert report.violation_count == len(report.violations)


def test_fekete_linear_sequence():
    """a_n = n is additive with limit one."""
    report = fekete_limit([float(n) for n in range(1, 51)])

    assert report.infimum == 1.0
    assert report.violation_count == 0
    with pytest.raises(SequenceTooShortException):
        fekete_limit([])


def test_fekete_long_sequence_scans_row_by_row(mocker):
    """Twenty thousand terms: one bumped last term breaks every pair that sums to it."""
    meshgrid = mocker.patch.object(np, "meshgrid", side_effect=AssertionError("pair grid materialized"))
    length = 20_000
    a = np.sqrt(np.arange(1, length + 1, dtype=float))
    a[-1] += length

    report = fekete_limit(a.tolist())

    assert not report.subadditive
    assert report.violation_count == length // 2
    assert report.violations[0] == (1, length - 1)
    assert len(report.violations) == 100
    assert fekete_limit(np.sqrt(np.arange(1, length + 1, dtype=float)).tolist()).subadditive
    meshgrid.assert_not_called()
