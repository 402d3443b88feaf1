"""Tests for scalar and step-function values."""

import numpy as np
import pytest

from core.domain.values import ScalarValue, StepFunctionValue
from core.exceptions import InvalidInputException


def test_scalar_arithmetic():
    """Scalars form a normed space under abs."""
    a, b = ScalarValue(2.0), ScalarValue(-5.0)

    assert a + b == ScalarValue(-3.0)
    assert 3 * a == ScalarValue(6.0)
    assert (a / 4).value == 0.5
    assert (a - b).norm() == 7.0
    assert a.distance(b) == 7.0
    assert float(-a) == -2.0


def test_scalar_does_not_add_step_functions():
    """Values from different spaces do not mix."""
    with pytest.raises(TypeError):
        ScalarValue(1.0) + StepFunctionValue.constant(1.0)


def test_counting_function_is_right_continuous():
    """The value at a jump point already includes the jump."""
    f = StepFunctionValue.counting([0.0, 0.0, 1.0], weight=0.5)

    assert f(-1.0) == 0.0
    assert f(0.0) == 1.0
    assert f(0.5) == 1.0
    assert f(1.0) == 1.5
    assert np.array_equal(f(np.array([-1.0, 2.0])), np.array([0.0, 1.5]))
    assert f.norm() == 1.5


def test_step_function_sum_and_sup_norm():
    """Sums merge jump points; the norm is the supremum of |f|."""
    f = StepFunctionValue.counting([0.0])
    g = StepFunctionValue.constant(1.0)

    assert f + g == StepFunctionValue(1.0, [0.0], [2.0])
    assert (f - f).norm() == 0.0
    assert StepFunctionValue(-3.0, [1.0], [2.0]).norm() == 3.0


def test_simplified_drops_flat_jumps():
    """Equal consecutive values collapse."""
    f = StepFunctionValue(0.0, [0.0, 1.0], [1.0, 1.0]).simplified()

    assert f.points.tolist() == [0.0]
    assert f == StepFunctionValue(0.0, [0.0, 1.0], [1.0, 1.0])


def test_step_function_validation():
    """Jump points must increase strictly and match the values."""
    with pytest.raises(InvalidInputException):
        StepFunctionValue(0.0, [1.0, 1.0], [1.0, 2.0])
    with pytest.raises(InvalidInputException):
        StepFunctionValue(0.0, [1.0], [1.0, 2.0])
