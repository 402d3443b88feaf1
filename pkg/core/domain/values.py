"""The two concrete normed spaces: real scalars and bounded right-continuous step functions."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from core.exceptions import InvalidInputException


class NormedValue(ABC):
    """Element of a normed vector space over the reals."""

    @abstractmethod
    def __add__(self, other: "NormedValue") -> "NormedValue":
        """Vector sum."""
        pass

    @abstractmethod
    def scale(self, factor: float) -> "NormedValue":
        """Scalar multiple."""
        pass

    @abstractmethod
    def norm(self) -> float:
        """Norm of the value."""
        pass

    def __mul__(self, factor: float) -> "NormedValue":
        return self.scale(factor)

    __rmul__ = __mul__

    def __truediv__(self, divisor: float) -> "NormedValue":
        return self.scale(1.0 / divisor)

    def __neg__(self) -> "NormedValue":
        return self.scale(-1.0)

    def __sub__(self, other: "NormedValue") -> "NormedValue":
        return self + other.scale(-1.0)

    def distance(self, other: "NormedValue") -> float:
        return (self - other).norm()

    def is_close(self, other: "NormedValue", tolerance: float = 1e-12) -> bool:
        return self.distance(other) <= tolerance


@dataclass(frozen=True)
class ScalarValue(NormedValue):
    """A real number with the absolute value as norm."""

    value: float

    def __add__(self, other: NormedValue) -> "ScalarValue":
        if not isinstance(other, ScalarValue):
            return NotImplemented
        return ScalarValue(self.value + other.value)

    def scale(self, factor: float) -> "ScalarValue":
        return ScalarValue(self.value * factor)

    def norm(self) -> float:
        return abs(self.value)

    def __float__(self) -> float:
        return float(self.value)


class StepFunctionValue(NormedValue):
    """Right-continuous step function on the real line with the supremum norm.

    The function equals `left` on (-inf, points[0]) and values[k] on
    [points[k], points[k+1]).
    """

    def __init__(self, left: float, points: Sequence[float], values: Sequence[float]):
        points = np.asarray(points, dtype=float)
        values = np.asarray(values, dtype=float)
        if points.shape != values.shape or points.ndim != 1:
            raise InvalidInputException("points", len(points), "one value per jump point required")
        if points.size and np.any(np.diff(points) <= 0):
            raise InvalidInputException("points", points.tolist(), "jump points must be strictly increasing")
        self.left = float(left)
        self.points = points
        self.values = values

    @classmethod
    def constant(cls, value: float) -> "StepFunctionValue":
        return cls(value, [], [])

    @classmethod
    def counting(cls, jumps: Sequence[float], weight: float = 1.0) -> "StepFunctionValue":
        """weight times the number of jumps <= x, jumps given with multiplicity."""
        points, counts = np.unique(np.asarray(jumps, dtype=float), return_counts=True)
        return cls(0.0, points, weight * np.cumsum(counts))

    def __call__(self, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        positions = np.searchsorted(self.points, x, side="right") - 1
        extended = np.concatenate(([self.left], self.values))
        result = extended[positions + 1]
        return float(result) if np.ndim(result) == 0 else result

    def __add__(self, other: NormedValue) -> "StepFunctionValue":
        if not isinstance(other, StepFunctionValue):
            return NotImplemented
        merged = np.union1d(self.points, other.points)
        values = np.asarray(self(merged)) + np.asarray(other(merged))
        return StepFunctionValue(self.left + other.left, merged, values).simplified()

    def scale(self, factor: float) -> "StepFunctionValue":
        return StepFunctionValue(self.left * factor, self.points, self.values * factor)

    def norm(self) -> float:
        if not self.values.size:
            return abs(self.left)
        return float(max(abs(self.left), np.max(np.abs(self.values))))

    def simplified(self) -> "StepFunctionValue":
        """Drop jump points where the value does not change."""
        previous = np.concatenate(([self.left], self.values[:-1]))
        keep = self.values != previous
        return StepFunctionValue(self.left, self.points[keep], self.values[keep])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepFunctionValue):
            return NotImplemented
        a, b = self.simplified(), other.simplified()
        return (
            a.left == b.left
            and np.array_equal(a.points, b.points)
            and np.array_equal(a.values, b.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"StepFunctionValue(left={self.left}, jumps={self.points.size})"
